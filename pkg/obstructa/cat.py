"""Finite-category kernel.

Finite categories, functors, diagrams and cones, exhaustive limit search, and the
obstruction machinery built on them: the mediating morphism induced by a
commuting square of functors, obstructed objects, and the check that a functor
sends obstructed objects to initial objects.

Concrete diagrams of posets, lattices, Boolean algebras and frames are presented
as graphs (`Diagram`) whose commutativity is checked by `check_commutes`; their
shape is the thin category of reachability between nodes.
"""

import logging
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Optional, Sequence

from obstructa.reports import CheckReport

logger = logging.getLogger(__name__)


class CategoryError(Exception):
    """Base exception for categorical constructions."""
    pass


class NonCommutingDiagramError(CategoryError):
    """Two parallel paths of a diagram act differently."""

    def __init__(self, message: str, source: Hashable = None, target: Hashable = None):
        super().__init__(message)
        self.source = source
        self.target = target


class PreconditionError(CategoryError):
    """A hypothesis of a categorical construction does not hold."""
    pass


class ObstructionTheoremViolation(CategoryError):
    """The hypotheses of the obstruction theorem held but its conclusion failed."""
    pass


def sort_key(value: Any) -> tuple:
    """Total order on the opaque ids used across the workbench (ints, strings, tuples, frozensets)."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, (int, Fraction)):
        return (1, value)
    if isinstance(value, str):
        return (2, value)
    if isinstance(value, tuple):
        return (3, tuple(sort_key(v) for v in value))
    if isinstance(value, frozenset):
        return (4, len(value), tuple(sorted(sort_key(v) for v in value)))
    return (5, repr(value))


def sorted_ids(values: Iterable[Any]) -> list:
    return sorted(values, key=sort_key)


# =============================================================================
# Categories
# =============================================================================

@dataclass(frozen=True)
class Morphism:
    """A morphism; `label` identifies it within its hom-set."""
    source: Hashable
    target: Hashable
    label: Hashable


class FinCategory(ABC):
    """A finite category given by hom-sets, composition and identities."""

    name: str = ""

    @property
    @abstractmethod
    def objects(self) -> tuple:
        """Objects in a fixed deterministic order."""

    @abstractmethod
    def hom(self, a: Hashable, b: Hashable) -> tuple[Morphism, ...]:
        """All morphisms a -> b in a fixed order."""

    @abstractmethod
    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        """The composite g . f (f first)."""

    @abstractmethod
    def identity(self, a: Hashable) -> Morphism:
        """Identity morphism on a."""

    def morphisms(self) -> list[Morphism]:
        return [m for a in self.objects for b in self.objects for m in self.hom(a, b)]

    def is_iso(self, f: Morphism) -> bool:
        ida, idb = self.identity(f.source), self.identity(f.target)
        return any(
            self.compose(g, f) == ida and self.compose(f, g) == idb
            for g in self.hom(f.target, f.source)
        )

    def is_initial(self, a: Hashable) -> bool:
        return all(len(self.hom(a, b)) == 1 for b in self.objects)

    def is_terminal(self, a: Hashable) -> bool:
        return all(len(self.hom(b, a)) == 1 for b in self.objects)

    def initial_objects(self) -> list:
        return [a for a in self.objects if self.is_initial(a)]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name or len(self.objects)})"


class TabulatedCategory(FinCategory):
    """A category with explicit morphism list and composition table.

    Args:
        objects: Objects in order
        morphisms: label -> (source, target)
        identities: object -> identity label
        table: (g_label, f_label) -> label of g . f, for every composable pair
        name: Optional display name
    """

    def __init__(
        self,
        objects: Sequence[Hashable],
        morphisms: Mapping[Hashable, tuple[Hashable, Hashable]],
        identities: Mapping[Hashable, Hashable],
        table: Mapping[tuple[Hashable, Hashable], Hashable],
        name: str = "",
    ):
        self._objects = tuple(objects)
        self._morphisms = dict(morphisms)
        self._identities = dict(identities)
        self._table = dict(table)
        self.name = name
        self._homs: dict[tuple, list[Morphism]] = {(a, b): [] for a in self._objects for b in self._objects}
        for label, (s, t) in self._morphisms.items():
            if (s, t) not in self._homs:
                raise CategoryError(f"Morphism {label!r} has unknown endpoints {s!r} -> {t!r}")
            self._homs[(s, t)].append(Morphism(s, t, label))

    @property
    def objects(self) -> tuple:
        return self._objects

    def hom(self, a, b):
        return tuple(self._homs[(a, b)])

    def identity(self, a):
        return Morphism(a, a, self._identities[a])

    def compose(self, g, f):
        if f.target != g.source:
            raise CategoryError(f"Cannot compose {g} after {f}")
        try:
            label = self._table[(g.label, f.label)]
        except KeyError:
            raise CategoryError(f"Composition table has no entry for {g.label!r} . {f.label!r}")
        return Morphism(f.source, g.target, label)


class ConcreteCategory(FinCategory):
    """A category whose hom-sets and composition are computed on demand and cached."""

    def __init__(
        self,
        objects: Sequence[Hashable],
        hom_fn: Callable[[Hashable, Hashable], Iterable[Hashable]],
        compose_fn: Callable[[Morphism, Morphism], Hashable],
        identity_fn: Callable[[Hashable], Hashable],
        name: str = "",
    ):
        self._objects = tuple(objects)
        self._hom_fn = hom_fn
        self._compose_fn = compose_fn
        self._identity_fn = identity_fn
        self.name = name
        self._hom_cache: dict[tuple, tuple[Morphism, ...]] = {}
        self._compose_cache: dict[tuple, Morphism] = {}

    @property
    def objects(self) -> tuple:
        return self._objects

    def hom(self, a, b):
        key = (a, b)
        if key not in self._hom_cache:
            self._hom_cache[key] = tuple(Morphism(a, b, label) for label in self._hom_fn(a, b))
        return self._hom_cache[key]

    def identity(self, a):
        return Morphism(a, a, self._identity_fn(a))

    def compose(self, g, f):
        if f.target != g.source:
            raise CategoryError(f"Cannot compose {g} after {f}")
        key = (g, f)
        cached = self._compose_cache.get(key)
        if cached is None:
            cached = Morphism(f.source, g.target, self._compose_fn(g, f))
            self._compose_cache[key] = cached
        return cached


def thin_category(objects: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool], name: str = "") -> TabulatedCategory:
    """The preorder `leq` on `objects` viewed as a category (one morphism a -> b iff a <= b)."""
    objects = tuple(objects)
    morphisms = {(a, b): (a, b) for a in objects for b in objects if leq(a, b)}
    identities = {a: (a, a) for a in objects}
    missing = [a for a in objects if (a, a) not in morphisms]
    if missing:
        raise CategoryError(f"Relation is not reflexive at {missing[0]!r}")
    table = {}
    for (a, b) in morphisms:
        for (b2, c) in morphisms:
            if b2 == b:
                if (a, c) not in morphisms:
                    raise CategoryError(f"Relation is not transitive at {a!r} <= {b!r} <= {c!r}")
                table[((b, c), (a, b))] = (a, c)
    return TabulatedCategory(objects, morphisms, identities, table, name=name)


def discrete_category(objects: Sequence[Hashable], name: str = "") -> TabulatedCategory:
    return thin_category(objects, lambda a, b: a == b, name=name)


def validate_category(C: FinCategory) -> CheckReport:
    """Check identity and associativity laws exhaustively."""
    report = CheckReport(name="category")
    morphisms = C.morphisms()
    for f in morphisms:
        if C.compose(C.identity(f.target), f) != f or C.compose(f, C.identity(f.source)) != f:
            return report.fail("identity", (f,))
    by_source: dict[Hashable, list[Morphism]] = {}
    for m in morphisms:
        by_source.setdefault(m.source, []).append(m)
    for f in morphisms:
        for g in by_source.get(f.target, ()):
            gf = C.compose(g, f)
            if gf.source != f.source or gf.target != g.target:
                return report.fail("composite-endpoints", (g, f))
            for h in by_source.get(g.target, ()):
                if C.compose(h, gf) != C.compose(C.compose(h, g), f):
                    return report.fail("associativity", (h, g, f))
    report.detail["morphisms"] = len(morphisms)
    return report


# =============================================================================
# Functors, diagrams, cones
# =============================================================================

@dataclass(frozen=True)
class FunctorData:
    """A functor between finite categories, given by its object and morphism maps."""
    source: FinCategory
    target: FinCategory
    on_objects: Callable[[Hashable], Hashable]
    on_morphisms: Callable[[Morphism], Morphism]
    name: str = ""

    def ob(self, a: Hashable) -> Hashable:
        return self.on_objects(a)

    def mor(self, f: Morphism) -> Morphism:
        return self.on_morphisms(f)

    @classmethod
    def from_tables(
        cls,
        source: FinCategory,
        target: FinCategory,
        objects: Mapping[Hashable, Hashable],
        morphisms: Mapping[Hashable, Hashable],
        name: str = "",
    ) -> "FunctorData":
        """Functor from an object table and a morphism-label table (source label -> target label)."""
        def on_morphisms(f: Morphism) -> Morphism:
            return Morphism(objects[f.source], objects[f.target], morphisms[f.label])
        return cls(source, target, objects.__getitem__, on_morphisms, name=name)


def thin_functor(source: FinCategory, target: FinCategory, objects: Mapping[Hashable, Hashable], name: str = "") -> FunctorData:
    """Functor into a category with at most one morphism between any two objects."""
    def on_morphisms(f: Morphism) -> Morphism:
        images = target.hom(objects[f.source], objects[f.target])
        if len(images) != 1:
            raise CategoryError(f"{name or 'functor'}: no unique image for {f}")
        return images[0]
    return FunctorData(source, target, objects.__getitem__, on_morphisms, name=name)


def identity_functor(C: FinCategory) -> FunctorData:
    return FunctorData(C, C, lambda a: a, lambda f: f, name=f"id_{C.name}")


def compose_functors(G: FunctorData, F: FunctorData) -> FunctorData:
    """G after F."""
    return FunctorData(
        F.source, G.target,
        lambda a: G.ob(F.ob(a)),
        lambda f: G.mor(F.mor(f)),
        name=f"{G.name}{F.name}",
    )


def validate_functor(F: FunctorData) -> CheckReport:
    """Check that F respects endpoints, identities and composition."""
    report = CheckReport(name=f"functor {F.name}".strip())
    S, T = F.source, F.target
    for a in S.objects:
        if F.mor(S.identity(a)) != T.identity(F.ob(a)):
            return report.fail("identity", (a,))
    morphisms = S.morphisms()
    for f in morphisms:
        image = F.mor(f)
        if image.source != F.ob(f.source) or image.target != F.ob(f.target):
            return report.fail("endpoints", (f,))
    for f in morphisms:
        for b in S.objects:
            for g in S.hom(f.target, b):
                if F.mor(S.compose(g, f)) != T.compose(F.mor(g), F.mor(f)):
                    return report.fail("composition", (g, f))
    return report


@dataclass(frozen=True)
class DiagramData:
    """A diagram: a functor from a finite shape category into `functor.target`."""
    shape: FinCategory
    functor: FunctorData

    @property
    def category(self) -> FinCategory:
        return self.functor.target

    def at(self, j: Hashable) -> Hashable:
        return self.functor.ob(j)

    def arrows(self) -> list[Morphism]:
        """Non-identity shape morphisms."""
        return [u for u in self.shape.morphisms() if u != self.shape.identity(u.source)]


def transport(F: FunctorData, D: DiagramData) -> DiagramData:
    """The diagram F . D."""
    return DiagramData(D.shape, compose_functors(F, D.functor))


@dataclass(frozen=True)
class ConeData:
    """A cone: apex plus one leg apex -> D(j) per shape object j."""
    apex: Hashable
    legs: Mapping[Hashable, Morphism]


def is_cone(D: DiagramData, cone: ConeData) -> bool:
    C = D.category
    for j in D.shape.objects:
        leg = cone.legs.get(j)
        if leg is None or leg.source != cone.apex or leg.target != D.at(j):
            return False
    for u in D.arrows():
        if C.compose(D.functor.mor(u), cone.legs[u.source]) != cone.legs[u.target]:
            return False
    return True


def transport_cone(F: FunctorData, cone: ConeData) -> ConeData:
    return ConeData(F.ob(cone.apex), {j: F.mor(leg) for j, leg in cone.legs.items()})


def cones_from(D: DiagramData, apex: Hashable, first_only: bool = False) -> list[ConeData]:
    """All cones from `apex` over D, by backtracking with forward checking.

    Shape objects are assigned most-constrained first; every assignment of a leg
    forces or filters the legs at the other end of each shape arrow.
    """
    C = D.category
    shape_objects = D.shape.objects
    arrows = D.arrows()
    images = {id(u): D.functor.mor(u) for u in arrows}
    outgoing: dict[Hashable, list[Morphism]] = {j: [] for j in shape_objects}
    incoming: dict[Hashable, list[Morphism]] = {j: [] for j in shape_objects}
    for u in arrows:
        outgoing[u.source].append(u)
        incoming[u.target].append(u)

    domains = {j: list(C.hom(apex, D.at(j))) for j in shape_objects}
    results: list[ConeData] = []

    def search(assigned: dict, domains: dict) -> bool:
        free = [j for j in shape_objects if j not in assigned]
        if not free:
            results.append(ConeData(apex, dict(assigned)))
            return first_only
        j = min(free, key=lambda x: len(domains[x]))
        for leg in domains[j]:
            narrowed = _narrow(j, leg, assigned, domains)
            if narrowed is None:
                continue
            assigned[j] = leg
            if search(assigned, narrowed):
                return True
            del assigned[j]
        return False

    def _narrow(j, leg, assigned, domains):
        narrowed = dict(domains)
        for u in outgoing[j]:
            forced = C.compose(images[id(u)], leg)
            k = u.target
            if k in assigned or k == j:
                if (assigned.get(k) if k != j else leg) != forced:
                    return None
                continue
            if forced not in narrowed[k]:
                return None
            narrowed[k] = [forced]
        for u in incoming[j]:
            i = u.source
            if i in assigned or i == j:
                continue
            image = images[id(u)]
            keep = [m for m in narrowed[i] if C.compose(image, m) == leg]
            if not keep:
                return None
            narrowed[i] = keep
        return narrowed

    if all(domains[j] for j in shape_objects):
        search({}, domains)
    return results


class _ConeIndex:
    """Cones per apex, computed lazily, skipping apexes that map into a cone-free object."""

    def __init__(self, D: DiagramData):
        self.D = D
        self._cones: dict[Hashable, list[ConeData]] = {}

    def cones(self, apex: Hashable) -> list[ConeData]:
        if apex not in self._cones:
            C = self.D.category
            witness = next(
                (w for w, cs in self._cones.items() if not cs and C.hom(w, apex)),
                None,
            )
            if witness is not None:
                logger.debug("No cones from %r: it receives a map from cone-free %r", apex, witness)
                self._cones[apex] = []
            else:
                self._cones[apex] = cones_from(self.D, apex)
        return self._cones[apex]


def factorizations(D: DiagramData, limit_cone: ConeData, other: ConeData) -> list[Morphism]:
    """Morphisms m: other.apex -> limit apex with leg_j . m = other.leg_j for every j."""
    C = D.category
    return [
        m for m in C.hom(other.apex, limit_cone.apex)
        if all(C.compose(limit_cone.legs[j], m) == other.legs[j] for j in D.shape.objects)
    ]


def _is_limiting(D: DiagramData, cone: ConeData, index: _ConeIndex) -> bool:
    C = D.category
    shape_objects = D.shape.objects
    for apex in C.objects:
        competing = index.cones(apex)
        if not competing:
            continue
        counts: dict[tuple, int] = {}
        for m in C.hom(apex, cone.apex):
            key = tuple(C.compose(cone.legs[j], m) for j in shape_objects)
            counts[key] = counts.get(key, 0) + 1
        for other in competing:
            if counts.get(tuple(other.legs[j] for j in shape_objects), 0) != 1:
                return False
    return True


def is_limiting(D: DiagramData, cone: ConeData) -> bool:
    """True iff every cone over D factors uniquely through `cone`."""
    return is_cone(D, cone) and _is_limiting(D, cone, _ConeIndex(D))


def limit(C: FinCategory, D: DiagramData) -> Optional[ConeData]:
    """A limiting cone of D in C, or None when no limit exists.

    Apexes are tried in object order and each cone is tested against every cone
    from every object.
    """
    if D.category is not C:
        raise CategoryError("Diagram does not land in the given category")
    index = _ConeIndex(D)
    for apex in C.objects:
        for cone in index.cones(apex):
            if _is_limiting(D, cone, index):
                logger.debug("Limit of %s found at apex %r", C, apex)
                return cone
    return None


def verify_limit(D: DiagramData, cone: ConeData) -> CheckReport:
    """Universal-property oracle: enumerates every cone from every object without pruning."""
    report = CheckReport(name="limit-universal-property")
    if not is_cone(D, cone):
        return report.fail("cone", (cone.apex,))
    checked = 0
    for apex in D.category.objects:
        for other in cones_from(D, apex):
            checked += 1
            count = len(factorizations(D, cone, other))
            if count != 1:
                return report.fail("unique-factorization", (apex,), factorizations=count)
    report.detail["cones_checked"] = checked
    return report


# =============================================================================
# Commuting squares and obstructions
# =============================================================================

@dataclass(frozen=True)
class CommutingSquare:
    """Functors F: A -> B, H: A -> C, G: C -> D, K: B -> D with G.H = K.F."""
    F: FunctorData
    H: FunctorData
    G: FunctorData
    K: FunctorData


def validate_square(square: CommutingSquare) -> CheckReport:
    report = CheckReport(name="commuting-square")
    F, H, G, K = square.F, square.H, square.G, square.K
    if not (F.source is H.source and G.source is H.target and K.source is F.target and G.target is K.target):
        return report.fail("shape", ())
    for functor in (F, H, G, K):
        sub = validate_functor(functor)
        if not sub.ok:
            return report.fail(f"functor {functor.name}: {sub.law}", sub.witness or ())
    A = F.source
    for a in A.objects:
        if G.ob(H.ob(a)) != K.ob(F.ob(a)):
            return report.fail("objects", (a,))
    for f in A.morphisms():
        if G.mor(H.mor(f)) != K.mor(F.mor(f)):
            return report.fail("morphisms", (f,))
    return report


@dataclass
class Mediation:
    """The mediating morphism G(X) -> K(Y) and the limit it factors through."""
    morphism: Morphism
    limit_cone: ConeData
    transported: ConeData


def mediating_morphism(
    square: CommutingSquare,
    A: DiagramData,
    cone: ConeData,
    limit_cone: Optional[ConeData] = None,
) -> Mediation:
    """Unique morphism G(X) -> K(Y) through which the transported cone factors.

    Args:
        square: Commuting square (F, H, G, K)
        A: Diagram in the common source category of F and H
        cone: Cone from X to H.A in the target of H
        limit_cone: Limiting cone of F.A (computed when omitted)

    Raises:
        PreconditionError: If the square does not commute, the cone is not a cone,
            F.A has no limit, or K does not preserve that limit
    """
    sq = validate_square(square)
    if not sq.ok:
        raise PreconditionError(f"Square does not commute: {sq.law} at {sq.witness}")
    HA = transport(square.H, A)
    if not is_cone(HA, cone):
        raise PreconditionError(f"Not a cone over H.A from {cone.apex!r}")
    FA = transport(square.F, A)
    if limit_cone is None:
        limit_cone = limit(square.F.target, FA)
        if limit_cone is None:
            raise PreconditionError("F.A has no limit")
    elif not is_limiting(FA, limit_cone):
        raise PreconditionError("Given cone is not a limit of F.A")

    KFA = transport(square.K, FA)
    image_cone = transport_cone(square.K, limit_cone)
    if not is_limiting(KFA, image_cone):
        raise PreconditionError("K does not preserve the limit of F.A")

    transported = transport_cone(square.G, cone)
    candidates = factorizations(KFA, image_cone, transported)
    if len(candidates) != 1:
        raise PreconditionError(f"Expected a unique mediating morphism, found {len(candidates)}")
    return Mediation(morphism=candidates[0], limit_cone=limit_cone, transported=transported)


def preserves_initial(K: FunctorData) -> bool:
    return all(K.target.is_initial(K.ob(a)) for a in K.source.initial_objects())


def reflects_initial(U: FunctorData) -> bool:
    return all(U.source.is_initial(a) for a in U.source.objects if U.target.is_initial(U.ob(a)))


def strict_initials(C: FinCategory) -> CheckReport:
    """Every morphism into an initial object is an isomorphism."""
    report = CheckReport(name="strict-initial-objects")
    initials = C.initial_objects()
    for i in initials:
        for x in C.objects:
            for m in C.hom(x, i):
                if not C.is_iso(m):
                    return report.fail("strictness", (m,))
    report.detail["initial_objects"] = len(initials)
    return report


def is_obstructed(X: Hashable, A: DiagramData, square: CommutingSquare) -> bool:
    """A cone from X to H.A exists and the limit of F.A is initial."""
    if not cones_from(transport(square.H, A), X, first_only=True):
        return False
    limit_cone = limit(square.F.target, transport(square.F, A))
    return limit_cone is not None and square.F.target.is_initial(limit_cone.apex)


@dataclass
class ObstructionReport:
    """Hypotheses of the obstruction theorem and, when they hold, its conclusion."""
    hypotheses: list[CheckReport] = field(default_factory=list)
    conclusion: Optional[CheckReport] = None

    @property
    def applicable(self) -> bool:
        return all(h.ok for h in self.hypotheses)

    @property
    def ok(self) -> bool:
        return self.conclusion is None or self.conclusion.ok

    def to_dict(self) -> dict[str, Any]:
        return {
            "applicable": self.applicable,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "conclusion": self.conclusion.to_dict() if self.conclusion else None,
        }


def check_obstruction_theorem(square: CommutingSquare, X: Hashable, A: DiagramData) -> ObstructionReport:
    """Check that G sends the obstructed object X to an initial object.

    Hypotheses (K preserves initial objects and the limit of F.A, initial objects
    of the target are strict, X is obstructed) are reported individually. The
    conclusion is only evaluated when all of them pass.

    Raises:
        ObstructionTheoremViolation: If every hypothesis holds but G(X) is not initial
    """
    result = ObstructionReport()
    D = square.K.target

    result.hypotheses.append(CheckReport(name="K-preserves-initial", ok=preserves_initial(square.K)))

    FA = transport(square.F, A)
    limit_cone = limit(square.F.target, FA)
    preserves = CheckReport(name="K-preserves-limit")
    if limit_cone is None:
        preserves.fail("limit-exists", ())
    elif not is_limiting(transport(square.K, FA), transport_cone(square.K, limit_cone)):
        preserves.fail("limit-preserved", (limit_cone.apex,))
    result.hypotheses.append(preserves)

    result.hypotheses.append(strict_initials(D))

    obstructed = CheckReport(name="obstructed")
    if not cones_from(transport(square.H, A), X, first_only=True):
        obstructed.fail("cone-from-X", (X,))
    elif limit_cone is None or not square.F.target.is_initial(limit_cone.apex):
        obstructed.fail("limit-initial", (limit_cone.apex if limit_cone else None,))
    result.hypotheses.append(obstructed)

    if not result.applicable:
        logger.info("Obstruction theorem not applicable: %s",
                    [h.name for h in result.hypotheses if not h.ok])
        return result

    image = square.G.ob(X)
    conclusion = CheckReport(name="G(X)-initial", ok=D.is_initial(image))
    conclusion.detail["image"] = image
    result.conclusion = conclusion
    if not conclusion.ok:
        raise ObstructionTheoremViolation(f"G({X!r}) = {image!r} is not initial although X is obstructed")
    return result


# =============================================================================
# Concrete diagrams presented as graphs
# =============================================================================

@dataclass(frozen=True)
class Arrow:
    """A diagram arrow between node ids, carrying a concrete morphism."""
    source: Hashable
    target: Hashable
    morphism: Any


@dataclass(frozen=True)
class Diagram:
    """A finite diagram presented as a graph of nodes and arrows.

    Nodes are concrete structures exposing `elements`; arrow morphisms are
    callables on the elements of their source node.
    """
    nodes: Mapping[Hashable, Any]
    arrows: tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arrows", tuple(self.arrows))
        for a in self.arrows:
            if a.source not in self.nodes or a.target not in self.nodes:
                raise CategoryError(f"Arrow {a.source!r} -> {a.target!r} names an unknown node")

    @cached_property
    def outgoing(self) -> dict[Hashable, tuple[Arrow, ...]]:
        """Arrows grouped by source node, in arrow order."""
        grouped: dict[Hashable, list[Arrow]] = {n: [] for n in self.nodes}
        for a in self.arrows:
            grouped[a.source].append(a)
        return {n: tuple(arrows) for n, arrows in grouped.items()}

    @property
    def node_ids(self) -> list:
        return sorted_ids(self.nodes)

    def reachable(self, a: Hashable, b: Hashable) -> bool:
        return self.path(a, b) is not None

    def path(self, a: Hashable, b: Hashable) -> Optional[tuple[Arrow, ...]]:
        """Some directed path of arrows from a to b (empty for a == b), found breadth first."""
        if a == b:
            return ()
        parent: dict[Hashable, Arrow] = {}
        queue = deque([a])
        seen = {a}
        while queue:
            node = queue.popleft()
            for arrow in self.outgoing[node]:
                if arrow.target not in seen:
                    parent[arrow.target] = arrow
                    if arrow.target == b:
                        steps = []
                        cur = b
                        while cur != a:
                            steps.append(parent[cur])
                            cur = parent[cur].source
                        return tuple(reversed(steps))
                    seen.add(arrow.target)
                    queue.append(arrow.target)
        return None

    def shape(self) -> TabulatedCategory:
        """Thin shape category: one morphism a -> b exactly when b is reachable from a."""
        ids = self.node_ids
        reach = {a: self._reachable_from(a) for a in ids}
        return thin_category(ids, lambda a, b: b in reach[a], name="shape")

    def _reachable_from(self, a: Hashable) -> set:
        seen = {a}
        queue = deque([a])
        while queue:
            node = queue.popleft()
            for arrow in self.outgoing[node]:
                if arrow.target not in seen:
                    seen.add(arrow.target)
                    queue.append(arrow.target)
        return seen

    def reversed(self, morphism_map: Callable[[Arrow], Any]) -> "Diagram":
        """Opposite diagram with each arrow's morphism replaced by `morphism_map(arrow)`."""
        return Diagram(
            nodes=self.nodes,
            arrows=tuple(Arrow(a.target, a.source, morphism_map(a)) for a in self.arrows),
        )


def check_commutes(
    diagram: Diagram,
    elements_of: Callable[[Any], Sequence[Hashable]] = lambda node: node.elements,
) -> None:
    """Verify that all parallel composite paths act identically, and every loop is the identity.

    Composites are tracked by their action on the source elements until no new
    composite appears.

    Raises:
        NonCommutingDiagramError: On the first pair of nodes with two distinct composites
    """
    elements = {n: tuple(elements_of(diagram.nodes[n])) for n in diagram.node_ids}
    for start in diagram.node_ids:
        base = elements[start]
        actions: dict[Hashable, tuple] = {start: base}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            current = actions[node]
            for arrow in diagram.outgoing[node]:
                image = tuple(arrow.morphism(x) for x in current)
                known = actions.get(arrow.target)
                if known is None:
                    actions[arrow.target] = image
                    queue.append(arrow.target)
                elif known != image:
                    raise NonCommutingDiagramError(
                        f"Paths from {start!r} to {arrow.target!r} disagree",
                        source=start, target=arrow.target,
                    )
