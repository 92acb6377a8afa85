"""Spectrum functors on finite-dimensional commutative algebras and the no-go pipeline.

A commutative algebra C^k is modeled by its k characters. Its Gelfand,
Zariski and Pierce spectra are all the discrete frame on those characters; each
is kept as its own functor so reports can name the route taken. The pipeline
pastes a frame complex, computes colorings, the Boolean colimit of its total
subalgebras and the limit of the spectrum diagram, cross-checks every count,
and runs the obstruction theorem on a materialized square of finite discrete
locales.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Any, Hashable, Optional, Sequence

from obstructa.boolean import BoolHom, BooleanColimit, FinBoolAlg, boolean_colimit, enumerate_models, stone_on_hom, stone_spectrum
from obstructa.cat import (
    Arrow,
    CommutingSquare,
    ConcreteCategory,
    DiagramData,
    Diagram,
    FunctorData,
    Morphism,
    ObstructionReport,
    ObstructionTheoremViolation,
    check_commutes,
    check_obstruction_theorem,
    identity_functor,
    reflects_initial,
    thin_category,
    thin_functor,
    validate_functor,
)
from obstructa.complexes import (
    ConfigurationError,
    FrameComplex,
    PastedPBA,
    color_search,
    models_to_colorings,
    paste,
    subalgebra_diagram,
    to_cnf,
    validate_complex,
)
from obstructa.locale import (
    FinFrame,
    LocaleLimit,
    LocaleMap,
    compose_maps,
    discrete_frame,
    frame_as_quantale,
    identity_map,
    is_initial_locale,
    loc_limit,
    point_at,
    points,
    validate_locale_map,
    validate_quantale,
)
from obstructa.order import compatible_families
from obstructa.pba import PartialBooleanAlgebra, PBAHom, TWO_PBA, SubalgebraDiagram, pba_homs_to_two, total_subalgebra_diagram, validate_pba, validate_pba_hom
from obstructa.reports import CheckReport, PropertyViolation

logger = logging.getLogger(__name__)

# Largest limit (in points) for which the obstruction square is materialized.
SQUARE_POINT_LIMIT = 6

# Largest limit frame whose quantale laws are checked exhaustively.
QUANTALE_CHECK_LIMIT = 64


class SpectrumFunctor(str, Enum):
    GELFAND = "gelfand"
    ZARISKI = "zariski"
    STONE = "stone"
    PIERCE = "pierce"


# =============================================================================
# Algebra models
# =============================================================================

@dataclass(frozen=True)
class CommAlgObject:
    """C^k, carried by its k labeled characters; elements are its idempotents as bitmasks."""
    k: int
    labels: tuple

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("CommAlgObject needs at least one character")
        if len(self.labels) != self.k or len(set(self.labels)) != self.k:
            raise ValueError("character labels must be distinct, one per character")

    @classmethod
    def of(cls, k: int) -> "CommAlgObject":
        return cls(k, tuple(range(k)))

    @property
    def elements(self) -> tuple:
        return tuple(range(1 << self.k))


@dataclass(frozen=True)
class AlgHom:
    """Algebra hom C^k -> C^m given by its character map {0..m-1} -> {0..k-1}."""
    source: CommAlgObject
    target: CommAlgObject
    dual: tuple

    def __post_init__(self):
        if len(self.dual) != self.target.k or any(not 0 <= s < self.source.k for s in self.dual):
            raise ValueError("dual must map every target character to a source character")

    def __call__(self, idempotent: int) -> int:
        return sum(1 << j for j, s in enumerate(self.dual) if idempotent >> s & 1)


def compose_alg_homs(g: AlgHom, f: AlgHom) -> AlgHom:
    """g after f; characters compose the other way."""
    return AlgHom(f.source, g.target, tuple(f.dual[s] for s in g.dual))


def identity_alg_hom(A: CommAlgObject) -> AlgHom:
    return AlgHom(A, A, tuple(range(A.k)))


@dataclass(frozen=True)
class AlgebraDiagram(Diagram):
    """Diagram of CommAlgObject nodes and AlgHom arrows."""

    def __post_init__(self):
        super().__post_init__()
        for n, node in self.nodes.items():
            if not isinstance(node, CommAlgObject):
                raise TypeError(f"Node {n!r} is not a CommAlgObject")
        for a in self.arrows:
            if not isinstance(a.morphism, AlgHom):
                raise TypeError(f"Arrow {a.source!r} -> {a.target!r} does not carry an AlgHom")


def idempotents(A: CommAlgObject) -> FinBoolAlg:
    """Boolean algebra of idempotents of C^k: one atom per character."""
    return FinBoolAlg(A.k, atom_labels=A.labels)


def idempotent_hom(h: AlgHom) -> BoolHom:
    S, T = idempotents(h.source), idempotents(h.target)
    return BoolHom(S, T, tuple(h(e) for e in S.elements))


def character_families(D: AlgebraDiagram) -> list[tuple]:
    """Families of characters, one per node, restricting along every arrow."""
    ids = D.node_ids
    arrows = [Arrow(a.target, a.source, a.morphism.dual.__getitem__) for a in D.arrows]
    return compatible_families(ids, {n: list(range(D.nodes[n].k)) for n in ids}, arrows)


# =============================================================================
# Spectra
# =============================================================================

def _discrete_map(source: FinFrame, target: FinFrame, h: AlgHom) -> LocaleMap:
    """Locale map Spec(target of h) -> Spec(source of h) dual to the character map."""
    S, T = h.source, h.target
    pairs = [(T.labels[j], S.labels[s]) for j, s in enumerate(h.dual)]
    return LocaleMap(source, target, lambda U: frozenset(t for t, s in pairs if s in U))


def gelfand(A: CommAlgObject) -> FinFrame:
    """Closed ideals of C^k: the discrete frame on its characters."""
    return discrete_frame(A.labels, name=f"Gelfand(C^{A.k})")


def gelfand_on(h: AlgHom) -> LocaleMap:
    return _discrete_map(gelfand(h.target), gelfand(h.source), h)


def zariski(A: CommAlgObject) -> FinFrame:
    """Radical ideals of C^k; every prime is maximal, so the spectrum is discrete on the characters."""
    return discrete_frame(A.labels, name=f"Zariski(C^{A.k})")


def zariski_on(h: AlgHom) -> LocaleMap:
    return _discrete_map(zariski(h.target), zariski(h.source), h)


def pierce(A: CommAlgObject) -> FinFrame:
    """Stone spectrum of the Boolean algebra of idempotents."""
    return stone_spectrum(idempotents(A))


def pierce_on(h: AlgHom) -> LocaleMap:
    return stone_on_hom(idempotent_hom(h))


_OBJECTS = {
    SpectrumFunctor.GELFAND: gelfand,
    SpectrumFunctor.ZARISKI: zariski,
    SpectrumFunctor.STONE: pierce,
    SpectrumFunctor.PIERCE: pierce,
}
_MORPHISMS = {
    SpectrumFunctor.GELFAND: gelfand_on,
    SpectrumFunctor.ZARISKI: zariski_on,
    SpectrumFunctor.STONE: pierce_on,
    SpectrumFunctor.PIERCE: pierce_on,
}


def spectrum(functor: SpectrumFunctor, A: CommAlgObject) -> FinFrame:
    return _OBJECTS[SpectrumFunctor(functor)](A)


def spectrum_on(functor: SpectrumFunctor, h: AlgHom) -> LocaleMap:
    return _MORPHISMS[SpectrumFunctor(functor)](h)


def spectrum_diagram(functor: SpectrumFunctor, D: AlgebraDiagram) -> Diagram:
    """Apply a spectrum functor to every node; arrows reverse."""
    frames = {n: spectrum(functor, D.nodes[n]) for n in D.node_ids}
    arrows = []
    for a in D.arrows:
        m = spectrum_on(functor, a.morphism)
        arrows.append(Arrow(a.target, a.source, LocaleMap(frames[a.target], frames[a.source], m.frame_hom)))
    return Diagram(frames, tuple(arrows))


def stone_diagram(D: Diagram) -> Diagram:
    """Stone spectra of a diagram of finite Boolean algebras; arrows reverse."""
    frames = {n: stone_spectrum(D.nodes[n]) for n in D.node_ids}
    arrows = []
    for a in D.arrows:
        m = stone_on_hom(a.morphism)
        arrows.append(Arrow(a.target, a.source, LocaleMap(frames[a.target], frames[a.source], m.frame_hom)))
    return Diagram(frames, tuple(arrows))


def check_functoriality(functor: SpectrumFunctor, D: AlgebraDiagram) -> CheckReport:
    """Identities go to identities and composable arrow pairs to composites."""
    report = CheckReport(name=f"functoriality:{SpectrumFunctor(functor).value}")
    for n in D.node_ids:
        A = D.nodes[n]
        if spectrum_on(functor, identity_alg_hom(A)).signature() != identity_map(spectrum(functor, A)).signature():
            return report.fail("identity", (n,))
    pairs = 0
    for f in D.arrows:
        for g in D.arrows:
            if f.target != g.source:
                continue
            pairs += 1
            whole = spectrum_on(functor, compose_alg_homs(g.morphism, f.morphism))
            parts = compose_maps(spectrum_on(functor, f.morphism), spectrum_on(functor, g.morphism))
            if whole.signature() != parts.signature():
                return report.fail("composition", (f.source, f.target, g.target))
    report.detail["composable_pairs"] = pairs
    return report


def spectra_agree(D: AlgebraDiagram) -> CheckReport:
    """Gelfand, Zariski and Pierce give the same frames and the same maps on every node and arrow."""
    report = CheckReport(name="spectra-agree")
    tags = (SpectrumFunctor.GELFAND, SpectrumFunctor.ZARISKI, SpectrumFunctor.PIERCE)
    for n in D.node_ids:
        frames = [spectrum(t, D.nodes[n]).elements for t in tags]
        if any(f != frames[0] for f in frames):
            return report.fail("objects", (n,))
    for a in D.arrows:
        sigs = [spectrum_on(t, a.morphism).signature() for t in tags]
        if any(s != sigs[0] for s in sigs):
            return report.fail("morphisms", (a.source, a.target))
    return report


def pierce_vs_gelfand_nat(D: AlgebraDiagram) -> CheckReport:
    """Comparison maps Pierce(A) -> Gelfand(A), one per node, with every naturality square checked.

    Each component sends a set of characters to the same set of atoms of the
    idempotent algebra; it must be a locale isomorphism.

    Raises:
        NonCommutingDiagramError: If D does not commute
    """
    check_commutes(D)
    report = CheckReport(name="pierce-gelfand-natural")
    components = {}
    for n in D.node_ids:
        A = D.nodes[n]
        eta = LocaleMap(pierce(A), gelfand(A), lambda U: U)
        inverse = LocaleMap(gelfand(A), pierce(A), lambda U: U)
        if not validate_locale_map(eta).ok or not validate_locale_map(inverse).ok:
            return report.fail("component", (n,))
        if compose_maps(eta, inverse).signature() != identity_map(gelfand(A)).signature():
            return report.fail("component-iso", (n,))
        components[n] = eta
    for a in D.arrows:
        # arrow S -> T of algebras; both spectra map T's spectrum to S's
        via_gelfand = compose_maps(gelfand_on(a.morphism), components[a.target])
        via_pierce = compose_maps(components[a.source], pierce_on(a.morphism))
        if via_gelfand.signature() != via_pierce.signature():
            return report.fail("naturality", (a.source, a.target))
    report.detail["squares"] = len(D.arrows)
    return report


# =============================================================================
# Partial Boolean algebra routes
# =============================================================================

@dataclass
class StoneReport:
    """Limit of Stone spectra over the total subalgebras of a partial Boolean algebra."""
    subalgebras: SubalgebraDiagram
    limit: LocaleLimit

    @property
    def initial(self) -> bool:
        return is_initial_locale(self.limit.frame)

    @property
    def points(self) -> int:
        return self.limit.point_count

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": len(self.subalgebras.diagram.nodes),
            "arrows": len(self.subalgebras.diagram.arrows),
            "limitOpens": self.limit.frame.size,
            "limitPoints": self.points,
            "initial": self.initial,
        }


def stone_pipeline(P: PartialBooleanAlgebra, exhaustive: bool = False) -> StoneReport:
    sub = total_subalgebra_diagram(P, exhaustive=exhaustive)
    limit = loc_limit(stone_diagram(sub.diagram))
    logger.info("stone_pipeline: %d subalgebras, %d points", len(sub.diagram.nodes), limit.point_count)
    return StoneReport(sub, limit)


def projection_restriction(pasted: PastedPBA, sub: SubalgebraDiagram, family: Sequence[int]) -> PBAHom:
    """Restrict a character family on the subalgebra diagram to the projections: a morphism paste -> 2.

    `family` holds one atom index per node of `sub`, in node-id order.
    """
    P = pasted.pba
    ids = sub.diagram.node_ids
    chosen = {n: sub.diagram.nodes[n].atom_labels[i] for n, i in zip(ids, family)}
    mapping = {}
    for x in P.carrier:
        node = next(n for n in ids if x in sub.members[n])
        mapping[x] = 1 if P.leq(chosen[node], x) else 0
    return PBAHom(P, TWO_PBA, mapping)


def complex_boolean_colimit(c: FrameComplex, threads: int = 1) -> BooleanColimit:
    """Boolean colimit of the total subalgebras of paste(c)."""
    sub = total_subalgebra_diagram(paste(c).pba)
    return boolean_colimit(sub.diagram, threads=threads)


def complex_spectrum_limit(c: FrameComplex, functor: SpectrumFunctor = SpectrumFunctor.GELFAND) -> LocaleLimit:
    """Limit of one spectrum functor over the subalgebra diagram of c.

    Stone goes through the Boolean subalgebras of the pasting; the other
    functors go through the commutative algebra models.
    """
    functor = SpectrumFunctor(functor)
    pasted = paste(c)
    if functor is SpectrumFunctor.STONE:
        return stone_pipeline(pasted.pba).limit
    return loc_limit(spectrum_diagram(functor, subalgebra_diagram(c, pasted)))


# =============================================================================
# The obstruction square on finite discrete locales
# =============================================================================

def finite_sets_category(sizes: Sequence[int]) -> ConcreteCategory:
    """Finite discrete locales up to isomorphism: objects are point counts, morphisms are functions."""
    return ConcreteCategory(
        sorted(set(sizes)),
        lambda a, b: product(range(b), repeat=a),
        lambda g, f: tuple(g.label[i] for i in f.label),
        lambda a: tuple(range(a)),
        name="FinDiscLoc",
    )


@dataclass
class MaterializedSquare:
    square: CommutingSquare
    apex: Hashable
    diagram: DiagramData
    limit_points: int


def materialize_square(frames: Diagram, limit: LocaleLimit) -> MaterializedSquare:
    """Commuting square whose lower-right corner is the category of finite discrete locales.

    The shape of the spectrum diagram maps in by point counts; its extension by
    an apex M sends M to the limit and M -> node to the limit projection.
    """
    ids = frames.node_ids
    tags = {n: [p.tag for p in points(frames.nodes[n])] for n in ids}
    size = {n: len(tags[n]) for n in ids}

    step = {}
    for a in frames.arrows:
        target_index = {point_at(frames.nodes[a.target], j).signature(): i for i, j in enumerate(tags[a.target])}
        step[(a.source, a.target)] = tuple(
            target_index[compose_maps(a.morphism, point_at(frames.nodes[a.source], j)).signature()]
            for j in tags[a.source]
        )

    # The shape is thin, so a composite is fixed by its endpoints.
    composites: dict[tuple, tuple] = {}

    def along(u: Morphism) -> tuple:
        key = (u.source, u.target)
        if key not in composites:
            fn = tuple(range(size[u.source]))
            for arrow in frames.path(u.source, u.target):
                table = step[(arrow.source, arrow.target)]
                fn = tuple(table[i] for i in fn)
            composites[key] = fn
        return composites[key]

    families = limit.point_families
    count = len(families)
    projection = {
        n: tuple(tags[n].index(fam[i]) for fam in families)
        for i, n in enumerate(limit.node_order)
    }

    D = finite_sets_category([0, 1, count, *size.values()])
    A_cat = frames.shape()
    F = FunctorData(A_cat, D, size.__getitem__,
                    lambda u: Morphism(size[u.source], size[u.target], along(u)), name="F")
    reach = {(u.source, u.target) for u in A_cat.morphisms()}
    apex = "M"
    C_cat = thin_category(
        [*ids, apex],
        lambda a, b: a == b or a == apex or (a, b) in reach,
        name="C",
    )
    H = thin_functor(A_cat, C_cat, {n: n for n in ids}, name="H")

    def g_ob(x):
        return count if x == apex else size[x]

    def g_mor(u: Morphism) -> Morphism:
        if u.source == apex:
            label = tuple(range(count)) if u.target == apex else projection[u.target]
            return Morphism(count, g_ob(u.target), label)
        return F.mor(u)

    G = FunctorData(C_cat, D, g_ob, g_mor, name="G")
    square = CommutingSquare(F=F, H=H, G=G, K=identity_functor(D))
    return MaterializedSquare(square, apex, DiagramData(A_cat, identity_functor(A_cat)), count)


def square_commutes(square: CommutingSquare) -> CheckReport:
    """Functor laws for F, H and G and the equation G.H = K.F on the source category.

    K is the identity here, so its laws are not re-enumerated over every
    function between finite sets.
    """
    report = CheckReport(name="commuting-square")
    for functor in (square.F, square.H, square.G):
        sub = validate_functor(functor)
        if not sub.ok:
            return report.fail(f"functor {functor.name}: {sub.law}", sub.witness or ())
    A = square.F.source
    for a in A.objects:
        if square.G.ob(square.H.ob(a)) != square.K.ob(square.F.ob(a)):
            return report.fail("objects", (a,))
    for f in A.morphisms():
        if square.G.mor(square.H.mor(f)) != square.K.mor(square.F.mor(f)):
            return report.fail("morphisms", (f,))
    return report


FUNCTIONS = "C"
DUAL_NUMBERS = "C[e]"


def _stalk_maps(source: str, target: str) -> tuple[int, ...]:
    """Local homs between stalks, as the coefficient a in e -> a*e.

    Only C[e] -> C[e] has a choice: keep e or kill it. Every other pair has one hom.
    """
    return (0, 1) if source == target == DUAL_NUMBERS else (0,)


def _ringed_hom(X: tuple, Y: tuple):
    for f in product(range(len(Y)), repeat=len(X)):
        for sharp in product(*(_stalk_maps(Y[f[x]], X[x]) for x in range(len(X)))):
            yield (f, sharp)


def _ringed_compose(g: Morphism, f: Morphism) -> tuple:
    f_map, f_sharp = f.label
    g_map, g_sharp = g.label
    return (
        tuple(g_map[i] for i in f_map),
        tuple(f_sharp[x] * g_sharp[f_map[x]] for x in range(len(f_map))),
    )


def ringed_toy(D: ConcreteCategory) -> tuple[ConcreteCategory, FunctorData]:
    """Finite discrete ringed spaces over the point counts of D, and the forgetful functor U to D.

    A space with n points carries a stalk at each point: C, or the dual numbers
    C[e] whose ring is not one of functions. Objects list the stalks, C first.
    A morphism is a pair (f, f#) of a point map and one local hom of stalks per
    point, O_Y(f(x)) -> O_X(x). U keeps f and drops f#, so it merges objects
    with the same point count and is not faithful on dual-number stalks.
    """
    objects = [
        (FUNCTIONS,) * k + (DUAL_NUMBERS,) * (n - k)
        for n in D.objects
        for k in range(n, -1, -1)
    ]
    R = ConcreteCategory(
        objects,
        _ringed_hom,
        _ringed_compose,
        lambda X: (tuple(range(len(X))), tuple(1 if s == DUAL_NUMBERS else 0 for s in X)),
        name="Ringed",
    )
    U = FunctorData(R, D, len, lambda m: Morphism(len(m.source), len(m.target), m.label[0]), name="U")
    return R, U


# =============================================================================
# No-go pipeline
# =============================================================================

@dataclass
class PipelineReport:
    """Counts, limit data and every cross-check of one pipeline run."""
    functor: SpectrumFunctor
    colorings: int
    boolean_colimit_size: int
    limit_opens: int
    limit_points: int
    initial: bool
    checks: list[CheckReport] = field(default_factory=list)
    obstruction: Optional[ObstructionReport] = None
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "colorings": self.colorings,
            "booleanColimitSize": self.boolean_colimit_size,
            "limitOpens": self.limit_opens,
            "limitPoints": self.limit_points,
            "initial": self.initial,
            "functor": self.functor.value,
            "checks": [c.to_dict() for c in self.checks],
        }


def _equal_check(name: str, **counts: int) -> CheckReport:
    report = CheckReport(name=name, detail=dict(counts))
    values = list(counts.values())
    if any(v != values[0] for v in values):
        report.fail("counts-equal", tuple(values))
    return report


def nogo_pipeline(
    c: FrameComplex,
    functor: SpectrumFunctor = SpectrumFunctor.GELFAND,
    threads: int = 1,
) -> PipelineReport:
    """Run every stage on a frame complex and cross-check the results.

    Raises:
        ConfigurationError: If the complex fails validation
        PropertyViolation: If any cross-check fails
        ObstructionTheoremViolation: If the obstruction theorem's conclusion fails
    """
    functor = SpectrumFunctor(functor)
    started = time.perf_counter()
    valid = validate_complex(c)
    if not valid.ok:
        raise ConfigurationError(f"Invalid frame complex: {valid.law} at {valid.witness}")
    checks: list[CheckReport] = [
        CheckReport(name="dimension-hypothesis", detail={"dimension": c.dimension, "theoremsApply": c.dimension >= 3}),
    ]

    colorings = color_search(c, mode="enumerate", threads=threads).colorings
    logger.info("pipeline: %d colorings", len(colorings))

    presentation, _ = to_cnf(c)
    cnf = models_to_colorings(c, enumerate_models(presentation, threads=threads))
    checks.append(_equal_check("cnf-models", colorings=len(colorings), models=len(cnf)))
    if cnf != colorings:
        checks[-1].fail("same-colorings", ())

    pasted = paste(c)
    checks.append(validate_pba(pasted.pba))
    homs = pba_homs_to_two(pasted.pba)
    checks.append(_equal_check("pba-morphisms", colorings=len(colorings), morphisms=len(homs)))
    if sorted(pasted.hom_to_coloring(h) for h in homs) != colorings:
        checks[-1].fail("same-colorings", ())

    sub = total_subalgebra_diagram(pasted.pba)
    colimit = boolean_colimit(sub.diagram, threads=threads)
    colimit_check = CheckReport(name="boolean-colimit", detail={"atoms": colimit.algebra.atom_count})
    if colimit.algebra.atom_count != len(colorings):
        colimit_check.fail("size-is-power-of-colorings", (colimit.algebra.atom_count, len(colorings)))
    checks.append(colimit_check)

    algebras = subalgebra_diagram(c, pasted)
    families = character_families(algebras)
    checks.append(_equal_check("character-families", colorings=len(colorings), families=len(families)))
    restricted = CheckReport(name="projection-restriction")
    restricted_colorings = []
    for family in families:
        h = projection_restriction(pasted, sub, family)
        hom_check = validate_pba_hom(h)
        if not hom_check.ok:
            restricted.fail(hom_check.law or "pba-hom", tuple(family))
            break
        restricted_colorings.append(pasted.hom_to_coloring(h))
    if restricted.ok and sorted(restricted_colorings) != colorings:
        restricted.fail("same-colorings", ())
    checks.append(restricted)

    if functor is SpectrumFunctor.STONE:
        frames = stone_diagram(sub.diagram)
    else:
        frames = spectrum_diagram(functor, algebras)
        checks.append(check_functoriality(functor, algebras))
    checks.append(spectra_agree(algebras))
    checks.append(pierce_vs_gelfand_nat(algebras))

    limit = loc_limit(frames)
    initial = is_initial_locale(limit.frame)
    checks.append(_equal_check("limit-points", colorings=len(colorings), points=limit.point_count))
    initial_check = CheckReport(name="initial-iff-uncolorable", detail={"initial": initial})
    if initial != (len(colorings) == 0):
        initial_check.fail("initial-iff-uncolorable", (initial, len(colorings)))
    checks.append(initial_check)

    checks.extend(_derived_checks(limit, initial))
    obstruction = _obstruction_checks(frames, limit, checks)

    report = PipelineReport(
        functor=functor,
        colorings=len(colorings),
        boolean_colimit_size=colimit.size,
        limit_opens=limit.frame.size,
        limit_points=limit.point_count,
        initial=initial,
        checks=checks,
        obstruction=obstruction,
        elapsed=time.perf_counter() - started,
    )
    failed = [ch for ch in checks if not ch.ok]
    if failed:
        raise PropertyViolation(f"Pipeline cross-check failed: {failed[0].name} ({failed[0].law})", checks)
    logger.info("pipeline finished in %.3fs: colorings=%d initial=%s", report.elapsed, report.colorings, initial)
    return report


def _derived_checks(limit: LocaleLimit, initial: bool) -> list[CheckReport]:
    count = limit.point_count
    R, U = ringed_toy(finite_sets_category([0, 1, count]))
    ringed = CheckReport(name="derived:ringed-space", detail={
        "reflectsInitial": reflects_initial(U),
        "ringedObjects": len(R.objects),
    })
    if not ringed.detail["reflectsInitial"]:
        ringed.fail("reflects-initial", ())
    elif R.is_initial((FUNCTIONS,) * count) != initial:
        ringed.fail("ringed-initial", (count,))

    quantale = CheckReport(name="derived:quantale")
    Q = frame_as_quantale(limit.frame)
    if limit.frame.size <= QUANTALE_CHECK_LIMIT:
        laws = validate_quantale(Q)
        if not laws.ok:
            quantale.fail(laws.law or "quantale", laws.witness or ())
    else:
        quantale.detail["lawsChecked"] = False
    if (Q.unit == Q.lattice.bottom) != initial:
        quantale.fail("trivial-iff-initial", (initial,))
    return [ringed, quantale]


def _obstruction_checks(frames: Diagram, limit: LocaleLimit, checks: list[CheckReport]) -> Optional[ObstructionReport]:
    if limit.point_count > SQUARE_POINT_LIMIT:
        checks.append(CheckReport(
            name="obstruction-theorem",
            detail={"skipped": f"limit has {limit.point_count} points (more than {SQUARE_POINT_LIMIT})"},
        ))
        return None
    materialized = materialize_square(frames, limit)
    square_check = square_commutes(materialized.square)
    checks.append(square_check)
    if not square_check.ok:
        return None
    try:
        result = check_obstruction_theorem(materialized.square, materialized.apex, materialized.diagram)
    except ObstructionTheoremViolation as e:
        checks.append(CheckReport(name="obstruction-theorem").fail("conclusion", (str(e),)))
        return None
    summary = CheckReport(name="obstruction-theorem", detail={
        "applicable": result.applicable,
        "hypotheses": {h.name: h.ok for h in result.hypotheses},
    })
    if result.conclusion is not None:
        summary.detail["conclusion"] = result.conclusion.ok
        if not result.conclusion.ok:
            summary.fail("conclusion", (materialized.apex,))
    checks.append(summary)
    return result
