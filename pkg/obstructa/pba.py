"""Partial Boolean algebras and orthomodular lattices.

A partial Boolean algebra carries a reflexive, symmetric commeasurability
relation; meet and join are defined exactly on commeasurable pairs and every
set of pairwise commeasurable elements lies inside a total Boolean algebra.
The maximal commeasurable cliques (blocks) are found with networkx.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

import networkx as nx

from obstructa.boolean import TWO, BoolHom, FinBoolAlg
from obstructa.cat import Arrow, Diagram, sort_key, sorted_ids
from obstructa.order import NotALatticeError, TableLattice
from obstructa.reports import CheckReport

logger = logging.getLogger(__name__)


class NotOrthomodularError(ValueError):
    """An ortholattice fails orthomodularity."""

    def __init__(self, message: str, pair: tuple = ()):
        super().__init__(message)
        self.pair = pair


def _pair(a: Hashable, b: Hashable) -> frozenset:
    return frozenset((a, b))


class PartialBooleanAlgebra:
    """Finite partial Boolean algebra with sparse operation tables.

    Args:
        carrier: Elements in canonical order
        zero: Bottom element
        one: Top element
        neg: Total complement table
        meet: Partial meet table keyed by unordered commeasurable pairs
        join: Partial join table keyed by unordered commeasurable pairs
        name: Display name

    Commeasurability is read off the tables: a and b are commeasurable exactly
    when the pair {a, b} has a meet entry.
    """

    def __init__(
        self,
        carrier: Sequence[Hashable],
        zero: Hashable,
        one: Hashable,
        neg: Mapping[Hashable, Hashable],
        meet: Mapping[frozenset, Hashable],
        join: Mapping[frozenset, Hashable],
        name: str = "",
    ):
        self.carrier = tuple(carrier)
        self.zero = zero
        self.one = one
        self.neg = dict(neg)
        self.meet_table = dict(meet)
        self.join_table = dict(join)
        self.name = name
        self._blocks: Optional[list[frozenset]] = None

    @property
    def elements(self) -> tuple:
        return self.carrier

    @property
    def size(self) -> int:
        return len(self.carrier)

    def commeasurable(self, a: Hashable, b: Hashable) -> bool:
        return _pair(a, b) in self.meet_table

    def meet(self, a: Hashable, b: Hashable) -> Hashable:
        try:
            return self.meet_table[_pair(a, b)]
        except KeyError:
            raise ValueError(f"{a!r} and {b!r} are not commeasurable") from None

    def join(self, a: Hashable, b: Hashable) -> Hashable:
        try:
            return self.join_table[_pair(a, b)]
        except KeyError:
            raise ValueError(f"{a!r} and {b!r} are not commeasurable") from None

    def leq(self, a: Hashable, b: Hashable) -> bool:
        return self.commeasurable(a, b) and self.meet(a, b) == a

    def graph(self) -> nx.Graph:
        """Commeasurability graph (self-loops omitted)."""
        g = nx.Graph()
        g.add_nodes_from(range(len(self.carrier)))
        index = {x: i for i, x in enumerate(self.carrier)}
        for key in self.meet_table:
            if len(key) == 2:
                a, b = tuple(key)
                g.add_edge(index[a], index[b])
        return g

    def blocks(self) -> list[frozenset]:
        """Maximal sets of pairwise commeasurable elements, in deterministic order."""
        if self._blocks is None:
            cliques = [frozenset(self.carrier[i] for i in clique) for clique in nx.find_cliques(self.graph())]
            self._blocks = sorted(cliques, key=lambda c: sorted_key_of(c))
        return self._blocks

    def __repr__(self) -> str:
        return f"PartialBooleanAlgebra({self.name or self.size})"


def sorted_key_of(elements: Iterable[Hashable]) -> tuple:
    return tuple(sorted(sort_key(x) for x in elements))


def validate_pba(P: PartialBooleanAlgebra) -> CheckReport:
    """Check the partial Boolean algebra axioms.

    Commeasurability must be reflexive with 0 and 1 commeasurable to everything,
    meet and join must be defined on the same pairs, and every maximal clique must
    be closed under the operations and satisfy the Boolean laws.
    """
    report = CheckReport(name="partial-boolean-algebra")
    carrier = set(P.carrier)
    if P.zero not in carrier or P.one not in carrier:
        return report.fail("constants", (P.zero, P.one))
    for x in P.carrier:
        if P.neg.get(x) not in carrier:
            return report.fail("negation-total", (x,))
        if not P.commeasurable(x, x):
            return report.fail("reflexive", (x,))
        if not (P.commeasurable(P.zero, x) and P.commeasurable(P.one, x)):
            return report.fail("constants-commeasurable", (x,))
    if set(P.meet_table) != set(P.join_table):
        odd = next(iter(set(P.meet_table) ^ set(P.join_table)))
        return report.fail("domain", tuple(sorted_ids(odd)))
    for key in P.meet_table:
        if not key <= carrier:
            return report.fail("domain", tuple(sorted_ids(key)))

    blocks = P.blocks()
    for block in blocks:
        failure = _block_failure(P, block)
        if failure is not None:
            law, witness = failure
            return report.fail(law, witness, clique=sorted_ids(block))
    covered = frozenset().union(*blocks) if blocks else frozenset()
    if covered != carrier:
        return report.fail("cover", tuple(sorted_ids(carrier - covered)))
    report.detail["blocks"] = len(blocks)
    report.detail["elements"] = P.size
    return report


def _block_failure(P: PartialBooleanAlgebra, block: frozenset) -> Optional[tuple[str, tuple]]:
    items = sorted_ids(block)
    for a in items:
        if P.neg[a] not in block:
            return "clique-closed", (a,)
    for a in items:
        for b in items:
            if P.meet(a, b) not in block or P.join(a, b) not in block:
                return "clique-closed", (a, b)
    for a in items:
        if P.meet(a, P.neg[a]) != P.zero or P.join(a, P.neg[a]) != P.one:
            return "complement", (a,)
        if P.meet(a, P.one) != a or P.join(a, P.zero) != a:
            return "bounds", (a,)
        for b in items:
            if P.meet(a, P.join(a, b)) != a or P.join(a, P.meet(a, b)) != a:
                return "absorption", (a, b)
            for c in items:
                if P.meet(a, P.meet(b, c)) != P.meet(P.meet(a, b), c):
                    return "meet-associative", (a, b, c)
                if P.join(a, P.join(b, c)) != P.join(P.join(a, b), c):
                    return "join-associative", (a, b, c)
                if P.meet(a, P.join(b, c)) != P.join(P.meet(a, b), P.meet(a, c)):
                    return "distributive", (a, b, c)
    return None


def pba_from_boolean(B: FinBoolAlg) -> PartialBooleanAlgebra:
    """A total Boolean algebra as a partial one with every pair commeasurable."""
    meet, join = {}, {}
    for a in B.elements:
        for b in B.elements:
            meet[_pair(a, b)] = a & b
            join[_pair(a, b)] = a | b
    return PartialBooleanAlgebra(
        B.elements, 0, B.full, {a: B.neg(a) for a in B.elements}, meet, join, name=B.name,
    )


TWO_PBA = pba_from_boolean(TWO)


# =============================================================================
# Morphisms
# =============================================================================

@dataclass(frozen=True, eq=False)
class PBAHom:
    source: PartialBooleanAlgebra
    target: PartialBooleanAlgebra
    mapping: Mapping[Hashable, Hashable]

    def __call__(self, x: Hashable) -> Hashable:
        return self.mapping[x]


def validate_pba_hom(f: PBAHom) -> CheckReport:
    """Check that f preserves commeasurability, 0, 1, negation, and meets and joins of commeasurable pairs."""
    report = CheckReport(name="pba-hom")
    S, T = f.source, f.target
    if any(x not in f.mapping or f.mapping[x] not in T.neg for x in S.carrier):
        return report.fail("total", ())
    if f(S.zero) != T.zero:
        return report.fail("zero", (S.zero,))
    if f(S.one) != T.one:
        return report.fail("one", (S.one,))
    for x in S.carrier:
        if f(S.neg[x]) != T.neg[f(x)]:
            return report.fail("negation", (x,))
    for key in sorted(S.meet_table, key=sorted_key_of):
        a, b = (tuple(key) * 2)[:2]
        if not T.commeasurable(f(a), f(b)):
            return report.fail("commeasurability", (a, b))
        if f(S.meet(a, b)) != T.meet(f(a), f(b)):
            return report.fail("meet", (a, b))
        if f(S.join(a, b)) != T.join(f(a), f(b)):
            return report.fail("join", (a, b))
    return report


def identity_pba_hom(P: PartialBooleanAlgebra) -> PBAHom:
    return PBAHom(P, P, {x: x for x in P.carrier})


def compose_pba_homs(g: PBAHom, f: PBAHom) -> PBAHom:
    return PBAHom(f.source, g.target, {x: g(f(x)) for x in f.source.carrier})


def pba_homs_to_two(P: PartialBooleanAlgebra) -> list[PBAHom]:
    """All morphisms P -> 2, ordered by their values along the carrier.

    On each block a morphism to 2 is fixed by the block atom sent to 1; the
    search picks one atom per block, consistent on shared elements.
    """
    blocks = P.blocks()
    block_atoms = [_block_atoms(P, b) for b in blocks]
    found: list[dict] = []

    def extend(i: int, values: dict) -> None:
        if i == len(blocks):
            found.append(dict(values))
            return
        block = blocks[i]
        for atom in block_atoms[i]:
            image = {x: 1 if P.leq(atom, x) else 0 for x in block}
            if any(values.get(x, v) != v for x, v in image.items()):
                continue
            added = [x for x in image if x not in values]
            values.update(image)
            extend(i + 1, values)
            for x in added:
                del values[x]

    extend(0, {})
    homs = [PBAHom(P, TWO_PBA, v) for v in found]
    homs.sort(key=lambda h: tuple(h(x) for x in P.carrier))
    logger.debug("pba_homs_to_two: %d blocks, %d morphisms", len(blocks), len(homs))
    return homs


def _block_atoms(P: PartialBooleanAlgebra, block: Iterable[Hashable]) -> list:
    nonzero = [x for x in block if x != P.zero]
    minimal = [x for x in nonzero if not any(y != x and P.leq(y, x) for y in nonzero)]
    return sorted_ids(minimal)


# =============================================================================
# Diagram of total subalgebras
# =============================================================================

@dataclass
class SubalgebraDiagram:
    """Total subalgebras of a partial Boolean algebra as a Boolean diagram.

    Each node is a FinBoolAlg whose atom labels are the subalgebra's atoms;
    `encode[node][x]` is the bitmask of element x and `decode` inverts it.
    """
    diagram: Diagram
    members: dict[Hashable, frozenset]
    encode: dict[Hashable, dict[Hashable, int]]
    decode: dict[Hashable, dict[int, Hashable]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.decode:
            self.decode = {n: {m: x for x, m in enc.items()} for n, enc in self.encode.items()}


def _as_boolean(P: PartialBooleanAlgebra, members: frozenset, name: str) -> tuple[FinBoolAlg, dict]:
    atom_list = _block_atoms(P, members)
    B = FinBoolAlg(len(atom_list), atom_labels=atom_list, name=name)
    encode = {
        x: sum(1 << i for i, a in enumerate(atom_list) if P.leq(a, x))
        for x in members
    }
    return B, encode


def _partitions(items: list) -> Iterable[list[list]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]
        yield [[head]] + part


def _subalgebras_of_block(P: PartialBooleanAlgebra, block: frozenset) -> list[frozenset]:
    B, encode = _as_boolean(P, block, "")
    decode = {m: x for x, m in encode.items()}
    result = []
    for part in _partitions(list(range(B.atom_count))):
        cells = [sum(1 << i for i in cell) for cell in part]
        masks = {sum(c for j, c in enumerate(cells) if pick >> j & 1) for pick in range(1 << len(cells))}
        result.append(frozenset(decode[m] for m in masks))
    return result


def total_subalgebra_diagram(P: PartialBooleanAlgebra, exhaustive: bool = False) -> SubalgebraDiagram:
    """Diagram of total subalgebras of P and the inclusions between them.

    By default the nodes are the blocks plus their pairwise intersections; with
    exhaustive=True every total subalgebra appears. Arrows are all proper
    inclusions between nodes.
    """
    blocks = P.blocks()
    if exhaustive:
        seen: set[frozenset] = set()
        for block in blocks:
            seen.update(_subalgebras_of_block(P, block))
        ordered = sorted(seen, key=lambda s: (-len(s), sorted_key_of(s)))
        named = [(f"S{i:04d}", s) for i, s in enumerate(ordered)]
    else:
        named = [(f"B{i:03d}", b) for i, b in enumerate(blocks)]
        known = set(blocks)
        intersections = []
        for a, b in combinations(blocks, 2):
            common = a & b
            if common not in known:
                known.add(common)
                intersections.append(common)
        intersections.sort(key=lambda s: (-len(s), sorted_key_of(s)))
        named += [(f"I{i:03d}", s) for i, s in enumerate(intersections)]

    nodes, members, encode = {}, {}, {}
    for node_id, s in named:
        nodes[node_id], encode[node_id] = _as_boolean(P, s, node_id)
        members[node_id] = s
    decode = {n: {m: x for x, m in enc.items()} for n, enc in encode.items()}

    arrows = []
    for small_id, small in named:
        for big_id, big in named:
            if small_id != big_id and small < big:
                images = tuple(encode[big_id][decode[small_id][m]] for m in nodes[small_id].elements)
                arrows.append(Arrow(small_id, big_id, BoolHom(nodes[small_id], nodes[big_id], images)))
    logger.debug("total_subalgebra_diagram: %d nodes, %d arrows (exhaustive=%s)", len(nodes), len(arrows), exhaustive)
    return SubalgebraDiagram(Diagram(nodes, tuple(arrows)), members, encode, decode)


# =============================================================================
# Orthomodular lattices
# =============================================================================

class OrthoLattice:
    """Finite lattice with an orthocomplementation.

    Args:
        carrier: Elements
        leq: Order predicate
        perp: Orthocomplement table
        name: Display name

    Raises:
        NotALatticeError: If the order is not a lattice
    """

    def __init__(self, carrier: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool],
                 perp: Mapping[Hashable, Hashable], name: str = ""):
        self.lattice = TableLattice.from_order(carrier, leq, name=name)
        self.perp = dict(perp)
        self.name = name

    @property
    def elements(self) -> tuple:
        return self.lattice.elements

    def leq(self, a, b) -> bool:
        return self.lattice.leq(a, b)

    def meet(self, a, b):
        return self.lattice.meet(a, b)

    def join(self, a, b):
        return self.lattice.join(a, b)

    @property
    def bottom(self):
        return self.lattice.bottom

    @property
    def top(self):
        return self.lattice.top

    def __repr__(self) -> str:
        return f"OrthoLattice({self.name or len(self.elements)})"


def oml_commeasurable(L: OrthoLattice, a: Hashable, b: Hashable) -> bool:
    """a and b are commeasurable when a = (a meet b) join (a meet b-perp)."""
    return a == L.join(L.meet(a, b), L.meet(a, L.perp[b]))


def orthocomplement_laws(L: OrthoLattice) -> CheckReport:
    report = CheckReport(name="orthocomplement")
    for a in L.elements:
        pa = L.perp.get(a)
        if pa not in L.perp:
            return report.fail("total", (a,))
        if L.perp[pa] != a:
            return report.fail("involutive", (a,))
        if L.meet(a, pa) != L.bottom or L.join(a, pa) != L.top:
            return report.fail("complement", (a,))
        for b in L.elements:
            if L.leq(a, b) and not L.leq(L.perp[b], pa):
                return report.fail("antitone", (a, b))
    return report


def orthomodular_law_holds(L: OrthoLattice) -> Optional[tuple]:
    """Returns None when a <= b implies b = a join (b meet a-perp) for all pairs, else a failing pair."""
    for a in L.elements:
        for b in L.elements:
            if L.leq(a, b) and b != L.join(a, L.meet(b, L.perp[a])):
                return (a, b)
    return None


def oml_validate(L: OrthoLattice) -> CheckReport:
    """Orthocomplement laws plus symmetry of commeasurability; also cross-checks the orthomodular law."""
    report = orthocomplement_laws(L)
    report.name = "orthomodular-lattice"
    if not report.ok:
        return report
    asymmetric = None
    for a in L.elements:
        for b in L.elements:
            if oml_commeasurable(L, a, b) != oml_commeasurable(L, b, a):
                asymmetric = (a, b)
                break
        if asymmetric:
            break
    law_failure = orthomodular_law_holds(L)
    report.detail["orthomodular_law"] = law_failure is None
    if asymmetric is not None:
        return report.fail("commeasurability-symmetric", asymmetric)
    if law_failure is not None:
        return report.fail("orthomodular-law", law_failure)
    return report


def oml_to_pba(L: OrthoLattice) -> PartialBooleanAlgebra:
    """The partial Boolean algebra of an orthomodular lattice: commeasurable pairs get its meet and join.

    Raises:
        NotOrthomodularError: If L fails the orthomodular lattice checks
    """
    check = oml_validate(L)
    if not check.ok:
        raise NotOrthomodularError(f"{L!r} is not orthomodular: {check.law}", check.witness or ())
    meet, join = {}, {}
    for a in L.elements:
        for b in L.elements:
            if oml_commeasurable(L, a, b):
                meet[_pair(a, b)] = L.meet(a, b)
                join[_pair(a, b)] = L.join(a, b)
    return PartialBooleanAlgebra(L.elements, L.bottom, L.top, L.perp, meet, join, name=L.name)


@dataclass(frozen=True, eq=False)
class OrthoHom:
    source: OrthoLattice
    target: OrthoLattice
    mapping: Mapping[Hashable, Hashable]

    def __call__(self, x):
        return self.mapping[x]


def validate_ortho_hom(f: OrthoHom) -> CheckReport:
    """Check preservation of 0, 1, orthocomplement and binary joins (hence meets)."""
    report = CheckReport(name="ortho-hom")
    S, T = f.source, f.target
    if f(S.bottom) != T.bottom:
        return report.fail("zero", (S.bottom,))
    if f(S.top) != T.top:
        return report.fail("one", (S.top,))
    for a in S.elements:
        if f(S.perp[a]) != T.perp[f(a)]:
            return report.fail("orthocomplement", (a,))
        for b in S.elements:
            if f(S.join(a, b)) != T.join(f(a), f(b)):
                return report.fail("join", (a, b))
    return report


def pba_hom_from_ortho_hom(f: OrthoHom) -> PBAHom:
    """The morphism of induced partial Boolean algebras."""
    return PBAHom(oml_to_pba(f.source), oml_to_pba(f.target), dict(f.mapping))


def boolean_ortholattice(B: FinBoolAlg) -> OrthoLattice:
    return OrthoLattice(B.elements, B.leq, {a: B.neg(a) for a in B.elements}, name=B.name)


def mo(n: int) -> OrthoLattice:
    """The horizontal sum of n four-element Boolean algebras (0, 1 and pairs a, a-perp)."""
    if n < 1:
        raise NotALatticeError("mo needs at least one pair")
    atoms = [f"{chr(ord('a') + i)}" for i in range(n)]
    carrier = ["0"] + [x for a in atoms for x in (a, a + "'")] + ["1"]
    perp = {"0": "1", "1": "0"}
    for a in atoms:
        perp[a], perp[a + "'"] = a + "'", a
    leq = lambda x, y: x == y or x == "0" or y == "1"
    return OrthoLattice(carrier, leq, perp, name=f"MO{n}")
