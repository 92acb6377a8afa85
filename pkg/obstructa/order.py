"""Finite posets and finite distributive lattices.

Birkhoff duality (join-irreducibles and downsets), colimits of
distributive-lattice diagrams computed as downsets of the limit of the dual
poset diagram, and a brute-force presentation oracle for those colimits.

Two lattice representations share the `Lattice` interface. `TableLattice`
holds explicit meet/join tables, with `FinDistLattice` for the distributive
ones. `DownsetLattice` is the downset lattice of a poset with union and
intersection, enumerated only on demand so that large Boolean limits can be
counted without being listed.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property, reduce
from itertools import product
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

from obstructa.cat import Arrow, Diagram, check_commutes, sort_key, sorted_ids
from obstructa.reports import CheckReport

logger = logging.getLogger(__name__)


class NotALatticeError(ValueError):
    """An order has a pair without meet or join."""
    pass


# =============================================================================
# Posets
# =============================================================================

@dataclass(frozen=True, eq=False)
class FinPoset:
    """A finite poset over opaque, hashable ids.

    Attributes:
        elements: Elements in canonical order
        leq: The order relation as a set of pairs, reflexive pairs included
    """
    elements: tuple
    leq: frozenset

    @classmethod
    def from_relation(cls, elements: Iterable[Hashable], relation: Iterable[tuple]) -> "FinPoset":
        """Reflexive-transitive closure of `relation` on `elements` (antisymmetry is not enforced)."""
        elements = tuple(sorted_ids(set(elements)))
        above: dict[Hashable, set] = {e: {e} for e in elements}
        for a, b in relation:
            above[a].add(b)
        changed = True
        while changed:
            changed = False
            for a in elements:
                extra = set().union(*(above[b] for b in above[a])) - above[a]
                if extra:
                    above[a] |= extra
                    changed = True
        return cls(elements, frozenset((a, b) for a in elements for b in above[a]))

    @classmethod
    def antichain(cls, elements: Iterable[Hashable]) -> "FinPoset":
        return cls.from_relation(elements, ())

    @classmethod
    def chain(cls, n: int) -> "FinPoset":
        return cls.from_relation(range(n), ((i, i + 1) for i in range(n - 1)))

    def le(self, a: Hashable, b: Hashable) -> bool:
        return (a, b) in self.leq

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def _down(self) -> dict:
        down = {e: set() for e in self.elements}
        for a, b in self.leq:
            down[b].add(a)
        return {e: frozenset(s) for e, s in down.items()}

    @cached_property
    def _up(self) -> dict:
        up = {e: set() for e in self.elements}
        for a, b in self.leq:
            up[a].add(b)
        return {e: frozenset(s) for e, s in up.items()}

    def down(self, a: Hashable) -> frozenset:
        return self._down[a]

    def up(self, a: Hashable) -> frozenset:
        return self._up[a]

    def is_antichain(self) -> bool:
        return all(a == b for a, b in self.leq)

    def validate(self) -> CheckReport:
        """Machine-check reflexivity, antisymmetry and transitivity."""
        report = CheckReport(name="poset")
        elements = set(self.elements)
        for a, b in self.leq:
            if a not in elements or b not in elements:
                return report.fail("carrier", (a, b))
        for a in self.elements:
            if (a, a) not in self.leq:
                return report.fail("reflexive", (a,))
        for a, b in self.leq:
            if a != b and (b, a) in self.leq:
                return report.fail("antisymmetric", (a, b))
        for a, b in self.leq:
            for c in self.up(b):
                if (a, c) not in self.leq:
                    return report.fail("transitive", (a, b, c))
        return report

    def __repr__(self) -> str:
        return f"FinPoset({len(self.elements)} elements)"


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    """An order-preserving map between finite posets."""
    source: FinPoset
    target: FinPoset
    fn: Callable[[Hashable], Hashable]

    def __call__(self, x: Hashable) -> Hashable:
        return self.fn(x)

    def is_monotone(self) -> bool:
        return all(self.target.le(self(a), self(b)) for a, b in self.source.leq)


def poset_isomorphism(P: FinPoset, Q: FinPoset) -> Optional[dict]:
    """An order isomorphism P -> Q, or None (backtracking on down/up-set sizes)."""
    if len(P) != len(Q) or len(P.leq) != len(Q.leq):
        return None
    sig = lambda R, x: (len(R.down(x)), len(R.up(x)))
    p_order = sorted(P.elements, key=lambda x: (sig(P, x), sort_key(x)))
    if sorted(sig(P, x) for x in P.elements) != sorted(sig(Q, y) for y in Q.elements):
        return None
    mapping: dict = {}
    used: set = set()

    def extend(i: int) -> bool:
        if i == len(p_order):
            return True
        x = p_order[i]
        for y in Q.elements:
            if y in used or sig(Q, y) != sig(P, x):
                continue
            if all(P.le(a, x) == Q.le(b, y) and P.le(x, a) == Q.le(y, b) for a, b in mapping.items()):
                mapping[x] = y
                used.add(y)
                if extend(i + 1):
                    return True
                del mapping[x]
                used.discard(y)
        return False

    return dict(mapping) if extend(0) else None


# =============================================================================
# Lattices
# =============================================================================

class Lattice(ABC):
    """Common interface of finite lattices."""

    @property
    @abstractmethod
    def elements(self) -> tuple:
        """All elements in canonical order."""

    @abstractmethod
    def leq(self, a: Hashable, b: Hashable) -> bool: ...

    @abstractmethod
    def meet(self, a: Hashable, b: Hashable) -> Hashable: ...

    @abstractmethod
    def join(self, a: Hashable, b: Hashable) -> Hashable: ...

    @property
    @abstractmethod
    def bottom(self) -> Hashable: ...

    @property
    @abstractmethod
    def top(self) -> Hashable: ...

    @property
    def size(self) -> int:
        return len(self.elements)

    def join_all(self, items: Iterable[Hashable]) -> Hashable:
        return reduce(self.join, items, self.bottom)

    def meet_all(self, items: Iterable[Hashable]) -> Hashable:
        return reduce(self.meet, items, self.top)

    def lower_covers(self, x: Hashable) -> list:
        below = [y for y in self.elements if y != x and self.leq(y, x)]
        return [y for y in below if not any(z != y and self.leq(y, z) for z in below)]

    def complement(self, x: Hashable) -> Optional[Hashable]:
        return next(
            (y for y in self.elements if self.meet(x, y) == self.bottom and self.join(x, y) == self.top),
            None,
        )


class TableLattice(Lattice):
    """A finite lattice stored with explicit meet and join tables.

    Nothing here assumes distributivity: the pentagon, M3 and orthomodular
    lattices are table lattices too. The constructor trusts the tables;
    `validate_distributive` checks them.
    """

    def __init__(
        self,
        carrier: Sequence[Hashable],
        leq: Iterable[tuple],
        meet: Mapping[tuple, Hashable],
        join: Mapping[tuple, Hashable],
        bottom: Hashable,
        top: Hashable,
        name: str = "",
    ):
        self._elements = tuple(carrier)
        self._leq = frozenset(leq)
        self.meet_table = dict(meet)
        self.join_table = dict(join)
        self._bottom = bottom
        self._top = top
        self.name = name

    @classmethod
    def from_order(cls, carrier: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool], name: str = "") -> "TableLattice":
        """Tabulate meets and joins of a finite order.

        Raises:
            NotALatticeError: If some pair lacks a greatest lower or least upper bound
        """
        carrier = tuple(carrier)
        pairs = {(a, b) for a in carrier for b in carrier if leq(a, b)}
        rel = lambda a, b: (a, b) in pairs

        def extreme(candidates: list, greatest: bool) -> Hashable:
            for c in candidates:
                if all((rel(d, c) if greatest else rel(c, d)) for d in candidates):
                    return c
            raise NotALatticeError("no extreme bound")

        meet, join = {}, {}
        for a in carrier:
            for b in carrier:
                try:
                    meet[(a, b)] = extreme([c for c in carrier if rel(c, a) and rel(c, b)], True)
                    join[(a, b)] = extreme([c for c in carrier if rel(a, c) and rel(b, c)], False)
                except NotALatticeError:
                    raise NotALatticeError(f"{a!r} and {b!r} lack a meet or join") from None
        bottom = extreme(list(carrier), False) if carrier else None
        top = extreme(list(carrier), True) if carrier else None
        return cls(carrier, pairs, meet, join, bottom, top, name=name)

    @property
    def elements(self) -> tuple:
        return self._elements

    def leq(self, a, b) -> bool:
        return (a, b) in self._leq

    def meet(self, a, b):
        return self.meet_table[(a, b)]

    def join(self, a, b):
        return self.join_table[(a, b)]

    @property
    def bottom(self):
        return self._bottom

    @property
    def top(self):
        return self._top

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name or len(self._elements)})"


class FinDistLattice(TableLattice):
    """A table lattice that is distributive, such as a frame of opens or a colimit of distributive lattices."""


class DownsetLattice(Lattice):
    """Downsets of a finite poset under union and intersection; elements are frozensets."""

    def __init__(self, poset: FinPoset, name: str = ""):
        self.poset = poset
        self.name = name
        self._count_memo: dict[frozenset, int] = {}

    def leq(self, a, b) -> bool:
        return a <= b

    def meet(self, a, b):
        return a & b

    def join(self, a, b):
        return a | b

    @property
    def bottom(self):
        return frozenset()

    @property
    def top(self):
        return frozenset(self.poset.elements)

    def principal(self, p: Hashable) -> frozenset:
        return self.poset.down(p)

    @property
    def size(self) -> int:
        """Number of downsets, counted without enumerating them."""
        return self._count(frozenset(self.poset.elements))

    def _count(self, rest: frozenset) -> int:
        if not rest:
            return 1
        if rest in self._count_memo:
            return self._count_memo[rest]
        m = max(rest, key=lambda x: (len(self.poset.down(x) & rest), sort_key(x)))
        total = self._count(rest - {m}) + self._count(rest - self.poset.down(m))
        self._count_memo[rest] = total
        return total

    @cached_property
    def elements(self) -> tuple:
        found = list(self._enumerate(frozenset(self.poset.elements)))
        return tuple(sorted(found, key=sort_key))

    def _enumerate(self, rest: frozenset) -> Iterator[frozenset]:
        if not rest:
            yield frozenset()
            return
        m = max(rest, key=lambda x: (len(self.poset.down(x) & rest), sort_key(x)))
        yield from self._enumerate(rest - {m})
        below = self.poset.down(m) & rest
        for d in self._enumerate(rest - self.poset.down(m)):
            yield d | below

    def __repr__(self) -> str:
        return f"DownsetLattice({self.name or len(self.poset)})"


@dataclass(frozen=True, eq=False)
class DLatHom:
    """A map of distributive lattices (source -> target)."""
    source: Lattice
    target: Lattice
    fn: Callable[[Hashable], Hashable]

    def __call__(self, x: Hashable) -> Hashable:
        return self.fn(x)


def validate_dlat_hom(h: DLatHom) -> CheckReport:
    """Exhaustively check preservation of meet, join, bottom and top."""
    report = CheckReport(name="dlat-hom")
    S, T = h.source, h.target
    if h(S.bottom) != T.bottom:
        return report.fail("bottom", (S.bottom,))
    if h(S.top) != T.top:
        return report.fail("top", (S.top,))
    for a in S.elements:
        for b in S.elements:
            if h(S.meet(a, b)) != T.meet(h(a), h(b)):
                return report.fail("meet", (a, b))
            if h(S.join(a, b)) != T.join(h(a), h(b)):
                return report.fail("join", (a, b))
    return report


def identity_hom(L: Lattice) -> DLatHom:
    return DLatHom(L, L, lambda x: x)


def validate_distributive(L: Lattice) -> CheckReport:
    """Check lattice laws, bounds and distributivity; the report names the first failing tuple."""
    report = CheckReport(name="distributive-lattice")
    E = L.elements
    try:
        for a in E:
            if not L.leq(L.bottom, a):
                return report.fail("bottom", (a,))
            if not L.leq(a, L.top):
                return report.fail("top", (a,))
            for b in E:
                m, j = L.meet(a, b), L.join(a, b)
                if m != L.meet(b, a):
                    return report.fail("meet-commutative", (a, b))
                if j != L.join(b, a):
                    return report.fail("join-commutative", (a, b))
                if L.join(a, m) != a:
                    return report.fail("absorption", (a, b))
                if L.meet(a, j) != a:
                    return report.fail("absorption", (a, b))
                if L.leq(a, b) != (m == a):
                    return report.fail("order-meet", (a, b))
                for c in E:
                    if L.meet(a, L.meet(b, c)) != L.meet(m, c):
                        return report.fail("meet-associative", (a, b, c))
                    if L.join(a, L.join(b, c)) != L.join(j, c):
                        return report.fail("join-associative", (a, b, c))
                    if L.meet(a, L.join(b, c)) != L.join(m, L.meet(a, c)):
                        return report.fail("distributive", (a, b, c))
    except KeyError as e:
        return report.fail("total-tables", (e.args[0],))
    report.detail["size"] = len(E)
    return report


def materialize(L: Lattice, relabel: bool = False) -> TableLattice:
    """Explicit tables for any lattice; with `relabel`, elements become 0..n-1 in canonical order."""
    E = L.elements
    index = {x: i for i, x in enumerate(E)} if relabel else {x: x for x in E}
    carrier = [index[x] for x in E]
    leq = [(index[a], index[b]) for a in E for b in E if L.leq(a, b)]
    meet = {(index[a], index[b]): index[L.meet(a, b)] for a in E for b in E}
    join = {(index[a], index[b]): index[L.join(a, b)] for a in E for b in E}
    return TableLattice(carrier, leq, meet, join, index[L.bottom], index[L.top],
                        name=getattr(L, "name", ""))


def join_irreducibles(L: Lattice) -> FinPoset:
    """Subposet of elements other than bottom with exactly one lower cover."""
    if isinstance(L, DownsetLattice):
        P = L.poset
        return FinPoset(
            tuple(sorted((P.down(p) for p in P.elements), key=sort_key)),
            frozenset((P.down(a), P.down(b)) for a, b in P.leq),
        )
    irreducibles = [x for x in L.elements if x != L.bottom and len(L.lower_covers(x)) == 1]
    return FinPoset(
        tuple(irreducibles),
        frozenset((a, b) for a in irreducibles for b in irreducibles if L.leq(a, b)),
    )


def downsets(P: FinPoset, name: str = "") -> DownsetLattice:
    """Birkhoff inverse: the lattice of downward-closed subsets of P."""
    return DownsetLattice(P, name=name)


def is_boolean_lattice(L: Lattice) -> bool:
    if isinstance(L, DownsetLattice):
        return L.poset.is_antichain()
    return all(L.complement(x) is not None for x in L.elements)


def lattice_isomorphism(L1: Lattice, L2: Lattice) -> Optional[dict]:
    """An order isomorphism between two lattices, or None.

    Candidates are matched on (rank, downset size, upset size) and extended by
    backtracking in canonical order.
    """
    P1 = FinPoset(L1.elements, frozenset((a, b) for a in L1.elements for b in L1.elements if L1.leq(a, b)))
    P2 = FinPoset(L2.elements, frozenset((a, b) for a in L2.elements for b in L2.elements if L2.leq(a, b)))
    if _ranks(L1) != _ranks(L2):
        return None
    return poset_isomorphism(P1, P2)


def _ranks(L: Lattice) -> list:
    rank: dict = {}
    for x in sorted(L.elements, key=lambda e: sum(1 for y in L.elements if L.leq(y, e))):
        covers = L.lower_covers(x)
        rank[x] = 1 + max((rank[c] for c in covers), default=-1)
    return sorted(rank.values())


# =============================================================================
# Limits of posets, colimits of distributive lattices
# =============================================================================

@dataclass
class PosetLimit:
    """Limit poset of a diagram with its projections, indexed by node id."""
    poset: FinPoset
    projections: dict[Hashable, MonotoneMap]
    node_order: list = field(default_factory=list)


def compatible_families(
    node_ids: Sequence[Hashable],
    domains: Mapping[Hashable, Sequence[Hashable]],
    arrows: Sequence[Arrow],
    equal: Callable[[Any, Any], bool] = lambda a, b: a == b,
) -> list[tuple]:
    """All choices of one domain element per node with arrow(choice[src]) == choice[tgt].

    Backtracking, most-constrained node first, forward-checking each arrow.
    Families are returned as tuples in `node_ids` order, sorted canonically.
    """
    position = {n: i for i, n in enumerate(node_ids)}
    outgoing: dict = {n: [] for n in node_ids}
    incoming: dict = {n: [] for n in node_ids}
    for a in arrows:
        outgoing[a.source].append(a)
        incoming[a.target].append(a)
    results: list[tuple] = []

    def narrow(n, value, assigned, doms):
        doms = dict(doms)
        for a in outgoing[n]:
            image = a.morphism(value)
            t = a.target
            if t in assigned or t == n:
                if not equal(image, value if t == n else assigned[t]):
                    return None
                continue
            keep = [v for v in doms[t] if equal(v, image)]
            if not keep:
                return None
            doms[t] = keep
        for a in incoming[n]:
            s = a.source
            if s in assigned or s == n:
                continue
            keep = [v for v in doms[s] if equal(a.morphism(v), value)]
            if not keep:
                return None
            doms[s] = keep
        return doms

    def search(assigned, doms):
        free = [n for n in node_ids if n not in assigned]
        if not free:
            family = [None] * len(node_ids)
            for n, v in assigned.items():
                family[position[n]] = v
            results.append(tuple(family))
            return
        n = min(free, key=lambda x: (len(doms[x]), position[x]))
        for value in doms[n]:
            narrowed = narrow(n, value, assigned, doms)
            if narrowed is None:
                continue
            assigned[n] = value
            search(assigned, narrowed)
            del assigned[n]

    start = {n: list(domains[n]) for n in node_ids}
    if all(start.values()) or not node_ids:
        search({}, start)
    return sorted(results, key=sort_key)


def poset_limit(D: Diagram) -> PosetLimit:
    """Limit of a diagram of finite posets and monotone maps.

    Elements are compatible families (tuples in node-id order) ordered
    componentwise.

    Raises:
        NonCommutingDiagramError: If the diagram does not commute
    """
    check_commutes(D)
    ids = D.node_ids
    families = compatible_families(ids, {n: D.nodes[n].elements for n in ids}, D.arrows)
    leq = frozenset(
        (f, g) for f in families for g in families
        if all(D.nodes[n].le(f[i], g[i]) for i, n in enumerate(ids))
    )
    limit_poset = FinPoset(tuple(families), leq)
    projections = {
        n: MonotoneMap(limit_poset, D.nodes[n], (lambda i: lambda fam: fam[i])(i))
        for i, n in enumerate(ids)
    }
    logger.debug("poset_limit: %d nodes, %d families", len(ids), len(families))
    return PosetLimit(limit_poset, projections, node_order=list(ids))


def dual_map(h: DLatHom) -> MonotoneMap:
    """Birkhoff dual J(target) -> J(source): j maps to the least x with j <= h(x)."""
    J_source = join_irreducibles(h.source)
    J_target = join_irreducibles(h.target)
    source_elements = h.source.elements
    table = {}
    for j in J_target.elements:
        table[j] = h.source.meet_all(x for x in source_elements if h.target.leq(j, h(x)))
    return MonotoneMap(J_target, J_source, table.__getitem__)


@dataclass
class LatticeColimit:
    """Colimit lattice with its cocone maps, indexed by node id."""
    lattice: DownsetLattice
    cocone: dict[Hashable, DLatHom]
    dual_limit: PosetLimit


def dlat_colimit(D: Diagram) -> LatticeColimit:
    """Colimit of finite distributive lattices via downsets of the dual poset limit.

    Raises:
        NonCommutingDiagramError: If the diagram does not commute
    """
    check_commutes(D)
    ids = D.node_ids
    duals = {n: join_irreducibles(D.nodes[n]) for n in ids}
    dual_arrows = tuple(Arrow(a.target, a.source, dual_map(a.morphism)) for a in D.arrows)
    dual = Diagram(nodes=duals, arrows=dual_arrows)
    limit = poset_limit(dual)
    colimit = downsets(limit.poset, name="colimit")

    def cocone_map(i: int, node: Lattice) -> Callable:
        families = limit.poset.elements
        return lambda x: frozenset(p for p in families if node.leq(p[i], x))

    cocone = {n: DLatHom(D.nodes[n], colimit, cocone_map(i, D.nodes[n])) for i, n in enumerate(ids)}
    return LatticeColimit(colimit, cocone, limit)


def homs_to_two(L: Lattice) -> list[dict]:
    """All lattice homs L -> {0,1}, by brute force over every 0/1 assignment."""
    E = L.elements
    result = []
    for bits in product((0, 1), repeat=len(E)):
        v = dict(zip(E, bits))
        if v[L.bottom] != 0 or v[L.top] != 1:
            continue
        if all(v[L.meet(a, b)] == (v[a] & v[b]) and v[L.join(a, b)] == (v[a] | v[b]) for a in E for b in E):
            result.append(v)
    return result


def dlat_colimit_oracle(D: Diagram) -> FinDistLattice:
    """Brute-force colimit: the sublattice of the powerset of models generated by all node elements.

    A model assigns 0/1 to every element of every node, respecting each node's
    tables and every arrow equality. Intended for diagrams with few, small nodes.
    """
    check_commutes(D)
    ids = D.node_ids
    per_node = {n: homs_to_two(D.nodes[n]) for n in ids}
    models = []
    for choice in product(*(per_node[n] for n in ids)):
        v = dict(zip(ids, choice))
        if all(v[a.target][a.morphism(x)] == v[a.source][x] for a in D.arrows for x in D.nodes[a.source].elements):
            models.append(v)
    everything = frozenset(range(len(models)))
    generated = {frozenset(), everything}
    for n in ids:
        for x in D.nodes[n].elements:
            generated.add(frozenset(i for i, m in enumerate(models) if m[n][x]))
    changed = True
    while changed:
        changed = False
        for a in list(generated):
            for b in list(generated):
                for c in (a | b, a & b):
                    if c not in generated:
                        generated.add(c)
                        changed = True
    carrier = sorted(generated, key=sort_key)
    return FinDistLattice.from_order(carrier, lambda a, b: a <= b, name="colimit-oracle")


# =============================================================================
# Enumeration of small posets (test and selftest suites)
# =============================================================================

def small_posets(max_downsets: int) -> list[FinPoset]:
    """All posets up to isomorphism whose downset lattice has at most `max_downsets` elements.

    Posets are grown one new maximal element at a time (natural labelings);
    adding elements never decreases the downset count, which bounds the search.
    """
    found: list[FinPoset] = []
    seen_keys: dict[tuple, list[FinPoset]] = {}

    def key(P: FinPoset) -> tuple:
        return (len(P), len(P.leq), downsets(P).size,
                tuple(sorted((len(P.down(x)), len(P.up(x))) for x in P.elements)))

    def grow(P: FinPoset):
        k = key(P)
        bucket = seen_keys.setdefault(k, [])
        if any(poset_isomorphism(P, Q) is not None for Q in bucket):
            return
        bucket.append(P)
        found.append(P)
        n = len(P)
        for below in downsets(P).elements:
            relation = [(a, b) for a, b in P.leq] + [(x, n) for x in below]
            Q = FinPoset.from_relation(list(P.elements) + [n], relation)
            if downsets(Q).size <= max_downsets:
                grow(Q)

    grow(FinPoset((), frozenset()))
    return found
