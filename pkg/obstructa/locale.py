"""Finite frames read as finite locales.

A locale map L -> M is carried by its frame homomorphism on opens, which runs
the other way (opens of M -> opens of L). Points are locale maps out of the
one-point locale, i.e. frame homs into the two-element frame. Limits of locale
diagrams are computed as Idl of the colimit of the opens diagram.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from obstructa.cat import Arrow, Diagram, sort_key
from obstructa.order import (
    DLatHom,
    DownsetLattice,
    FinDistLattice,
    FinPoset,
    Lattice,
    compatible_families,
    dlat_colimit,
    downsets,
    is_boolean_lattice,
    join_irreducibles,
)
from obstructa.reports import CheckReport, PropertyViolation

logger = logging.getLogger(__name__)

# Ideals are enumerated explicitly only for lattices up to this size.
IDEAL_ENUMERATION_LIMIT = 16


@dataclass(frozen=True, eq=False)
class FinFrame:
    """A finite distributive lattice of opens, read as a locale."""
    lattice: Lattice
    name: str = ""
    role: str = "locale"

    @property
    def elements(self) -> tuple:
        return self.lattice.elements

    @property
    def size(self) -> int:
        return self.lattice.size

    @property
    def bottom(self):
        return self.lattice.bottom

    @property
    def top(self):
        return self.lattice.top

    def leq(self, a, b) -> bool:
        return self.lattice.leq(a, b)

    def meet(self, a, b):
        return self.lattice.meet(a, b)

    def join(self, a, b):
        return self.lattice.join(a, b)

    def __repr__(self) -> str:
        return f"FinFrame({self.name or self.lattice!r})"


def discrete_frame(labels: Iterable[Hashable], name: str = "") -> FinFrame:
    """Frame of all subsets of a finite set of points; opens are frozensets of labels."""
    return FinFrame(downsets(FinPoset.antichain(labels)), name=name)


ONE_POINT = discrete_frame(["*"], name="point")
EMPTY_LOCALE = discrete_frame([], name="empty")


@dataclass(frozen=True, eq=False)
class LocaleMap:
    """A locale map source -> target, given by its frame hom target.opens -> source.opens."""
    source: FinFrame
    target: FinFrame
    frame_hom: Callable[[Hashable], Hashable]
    tag: Hashable = None

    def __call__(self, u: Hashable) -> Hashable:
        return self.frame_hom(u)

    def signature(self) -> tuple:
        """Images of all target opens, in the target's canonical order."""
        return tuple(self.frame_hom(u) for u in self.target.elements)


def compose_maps(g: LocaleMap, f: LocaleMap) -> LocaleMap:
    """g . f as locale maps; on opens this is f* . g*."""
    return LocaleMap(f.source, g.target, lambda u: f.frame_hom(g.frame_hom(u)))


def identity_map(L: FinFrame) -> LocaleMap:
    return LocaleMap(L, L, lambda u: u)


def validate_locale_map(m: LocaleMap) -> CheckReport:
    """Check that the frame hom preserves binary meets, top, binary joins and bottom."""
    report = CheckReport(name="locale-map")
    S, T, h = m.source, m.target, m.frame_hom
    if h(T.top) != S.top:
        return report.fail("top", (T.top,))
    if h(T.bottom) != S.bottom:
        return report.fail("bottom", (T.bottom,))
    opens = T.elements
    for a in opens:
        for b in opens:
            if h(T.meet(a, b)) != S.meet(h(a), h(b)):
                return report.fail("meet", (a, b))
            if h(T.join(a, b)) != S.join(h(a), h(b)):
                return report.fail("join", (a, b))
    return report


# =============================================================================
# Points and predicates
# =============================================================================

def point_at(L: FinFrame, j: Hashable) -> LocaleMap:
    """The point whose frame hom sends u to top iff the join-irreducible j lies below u."""
    on, off = ONE_POINT.top, ONE_POINT.bottom
    return LocaleMap(ONE_POINT, L, lambda u: on if L.leq(j, u) else off, tag=j)


def points(L: FinFrame) -> list[LocaleMap]:
    """All points of L, one per join-irreducible (prime filters of a finite lattice are principal)."""
    return [point_at(L, j) for j in join_irreducibles(L.lattice).elements]


def well_inside(L: FinFrame, a: Hashable, b: Hashable) -> bool:
    """a is well inside b: some c has c meet a = bottom and c join b = top."""
    return any(L.meet(c, a) == L.bottom and L.join(c, b) == L.top for c in L.elements)


def is_regular(L: FinFrame) -> bool:
    """Every open is the join of the opens well inside it."""
    opens = L.elements
    return all(
        L.lattice.join_all(b for b in opens if well_inside(L, b, a)) == a
        for a in opens
    )


def is_compact(L: FinFrame) -> bool:
    """Every cover of top has a finite subcover.

    A finite frame has finitely many opens, so every cover is its own finite
    subcover. What remains is that the opens together reach top.
    """
    return L.lattice.join_all(L.elements) == L.top


def is_initial_locale(L: FinFrame) -> bool:
    """The initial locale has a single open (0 = 1)."""
    return L.size == 1


def is_boolean_frame(L: FinFrame) -> bool:
    return is_boolean_lattice(L.lattice)


# =============================================================================
# Idl and limits
# =============================================================================

@dataclass
class IdealFrame:
    """Idl(D) with the isomorphism D -> Idl(D) sending x to its principal ideal."""
    frame: FinFrame
    to_ideal: Callable[[Hashable], Hashable]
    from_ideal: Callable[[Hashable], Hashable]
    enumerated: bool


def idl_finite(D: Lattice) -> IdealFrame:
    """Frame of ideals of a finite distributive lattice.

    Ideals of a finite lattice are principal. Up to IDEAL_ENUMERATION_LIMIT
    elements the ideals are enumerated and the isomorphism is built explicitly;
    beyond that D itself is returned with the identity.
    """
    if D.size > IDEAL_ENUMERATION_LIMIT:
        return IdealFrame(FinFrame(D, name="Idl"), lambda x: x, lambda x: x, enumerated=False)
    elements = D.elements
    order = FinPoset(elements, frozenset((a, b) for a in elements for b in elements if D.leq(a, b)))
    ideals = [
        d for d in downsets(order).elements
        if d and all(D.join(a, b) in d for a in d for b in d)
    ]
    principal = {x: frozenset(y for y in elements if D.leq(y, x)) for x in elements}
    inverse = {i: x for x, i in principal.items()}
    stray = [i for i in ideals if i not in inverse]
    if stray or len(ideals) != len(elements):
        raise PropertyViolation(f"Finite lattice has a non-principal ideal: {stray[:1]!r}")
    lattice = FinDistLattice.from_order(sorted(ideals, key=sort_key), lambda a, b: a <= b, name="Idl")
    return IdealFrame(FinFrame(lattice, name="Idl"), principal.__getitem__, inverse.__getitem__, enumerated=True)


@dataclass
class LocaleLimit:
    """Limit locale with its projections and the point-family cross-check."""
    frame: FinFrame
    projections: dict[Hashable, LocaleMap]
    point_families: list[tuple] = field(default_factory=list)
    node_order: list = field(default_factory=list)

    @property
    def point_count(self) -> int:
        return len(self.point_families)


def opens_diagram(D: Diagram) -> Diagram:
    """Opens of each node with every locale map replaced by its frame hom, arrows reversed."""
    return Diagram(
        nodes={n: frame.lattice for n, frame in D.nodes.items()},
        arrows=tuple(
            Arrow(a.target, a.source, DLatHom(a.morphism.target.lattice, a.morphism.source.lattice, a.morphism.frame_hom))
            for a in D.arrows
        ),
    )


def compatible_point_families(D: Diagram) -> list[tuple]:
    """Families of points, one per node, carried along every arrow; each point named by its join-irreducible."""
    ids = D.node_ids
    point_lists = {n: points(D.nodes[n]) for n in ids}
    by_signature = {
        n: {p.signature(): p.tag for p in point_lists[n]}
        for n in ids
    }

    def push(arrow: Arrow) -> Callable:

        def image(j: Hashable) -> Hashable:
            p = point_at(D.nodes[arrow.source], j)
            moved = compose_maps(arrow.morphism, p)
            return by_signature[arrow.target].get(moved.signature())
        return image

    arrows = [Arrow(a.source, a.target, push(a)) for a in D.arrows]
    domains = {n: [p.tag for p in point_lists[n]] for n in ids}
    return compatible_families(ids, domains, arrows)


def loc_limit(D: Diagram, verify_points: bool = True) -> LocaleLimit:
    """Limit of a diagram of finite locales, as Idl of the colimit of opens.

    With `verify_points`, the limit's points are matched one-to-one with the
    compatible families of node points.

    Raises:
        NonCommutingDiagramError: If the diagram does not commute
        PropertyViolation: If the point bijection fails
    """
    opens = opens_diagram(D)
    colimit = dlat_colimit(opens)
    ideal = idl_finite(colimit.lattice)
    Y = ideal.frame
    ids = D.node_ids

    projections = {}
    for n in ids:
        inject = colimit.cocone[n]
        cache: dict = {}

        def frame_hom(u, inject=inject, cache=cache):
            if u not in cache:
                cache[u] = ideal.to_ideal(inject(u))
            return cache[u]
        projections[n] = LocaleMap(Y, D.nodes[n], frame_hom)

    result = LocaleLimit(Y, projections, node_order=list(ids))
    if not verify_points:
        return result

    families = compatible_point_families(D)
    limit_poset = colimit.dual_limit.poset
    traced = []
    for family in limit_poset.elements:
        # point of Y at the principal downset of `family`; its image at node n is the point at family[n]
        generator = ideal.to_ideal(colimit.lattice.principal(family)) if isinstance(colimit.lattice, DownsetLattice) else None
        if generator is None:
            raise PropertyViolation("Colimit lattice lost its downset representation")
        y_point = point_at(Y, generator)
        row = []
        for i, n in enumerate(ids):
            pushed = compose_maps(projections[n], y_point)
            expected = point_at(D.nodes[n], family[i])
            if pushed.signature() != expected.signature():
                raise PropertyViolation(f"Projection of limit point disagrees at node {n!r}")
            row.append(family[i])
        traced.append(tuple(row))
    if sorted(traced, key=sort_key) != families:
        raise PropertyViolation(
            f"Limit has {len(traced)} points but {len(families)} compatible point families",
        )
    result.point_families = families
    logger.info("loc_limit: %d nodes, %d opens, %d points", len(ids), Y.size, len(families))
    return result


# =============================================================================
# Quantales
# =============================================================================

@dataclass(frozen=True, eq=False)
class FinQuantale:
    """A finite complete lattice with an associative multiplication distributing over joins."""
    lattice: Lattice
    mult: Callable[[Hashable, Hashable], Hashable]
    unit: Hashable
    name: str = ""

    @property
    def elements(self) -> tuple:
        return self.lattice.elements


def frame_as_quantale(L: FinFrame) -> FinQuantale:
    """Meet as multiplication, top as unit."""
    return FinQuantale(L.lattice, L.meet, L.top, name=f"Q({L.name})")


def validate_quantale(Q: FinQuantale) -> CheckReport:
    """Associativity, two-sided unit, and distribution over binary and empty joins."""
    report = CheckReport(name="quantale")
    L, m, E = Q.lattice, Q.mult, Q.elements
    for x in E:
        if m(Q.unit, x) != x or m(x, Q.unit) != x:
            return report.fail("unit", (x,))
        if m(x, L.bottom) != L.bottom:
            return report.fail("left-distributive-empty", (x,))
        if m(L.bottom, x) != L.bottom:
            return report.fail("right-distributive-empty", (x,))
    for x in E:
        for y in E:
            for z in E:
                if m(m(x, y), z) != m(x, m(y, z)):
                    return report.fail("associative", (x, y, z))
                if m(x, L.join(y, z)) != L.join(m(x, y), m(x, z)):
                    return report.fail("left-distributive", (x, y, z))
                if m(L.join(y, z), x) != L.join(m(y, x), m(z, x)):
                    return report.fail("right-distributive", (x, y, z))
    return report


@dataclass(frozen=True, eq=False)
class QuantaleMap:
    """A quantale morphism source -> target, carried by a function target -> source."""
    source: FinQuantale
    target: FinQuantale
    fn: Callable[[Hashable], Hashable]


def validate_quantale_map(f: QuantaleMap) -> CheckReport:
    """Check unit, binary and empty joins, and multiplication are preserved by f: target -> source."""
    report = CheckReport(name="quantale-map")
    S, T = f.source, f.target
    if f.fn(T.unit) != S.unit:
        return report.fail("unit", (T.unit,))
    if f.fn(T.lattice.bottom) != S.lattice.bottom:
        return report.fail("empty-join", ())
    for x in T.elements:
        for y in T.elements:
            if f.fn(T.lattice.join(x, y)) != S.lattice.join(f.fn(x), f.fn(y)):
                return report.fail("join", (x, y))
            if f.fn(T.mult(x, y)) != S.mult(f.fn(x), f.fn(y)):
                return report.fail("mult", (x, y))
    return report


def locale_map_as_quantale_map(m: LocaleMap) -> QuantaleMap:
    return QuantaleMap(frame_as_quantale(m.source), frame_as_quantale(m.target), m.frame_hom)
