"""Finite Boolean algebras, finite Stone duality, and Lindenbaum colimits.

A FinBoolAlg with k atoms has the bitmasks 0..2^k-1 as elements. Colimits of
Boolean-algebra diagrams are computed by writing the diagram as a CNF
presentation, enumerating its models, and taking the powerset algebra on the
models (the Lindenbaum algebra of a finite theory).
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Optional, Sequence

from obstructa.cat import Diagram, check_commutes, sort_key
from obstructa.locale import FinFrame, LocaleMap, discrete_frame
from obstructa.order import Lattice
from obstructa.reports import CheckReport

logger = logging.getLogger(__name__)

# A 0/1 value for each presentation variable, in variable order.
Valuation = tuple[int, ...]


class InvalidHomomorphismError(ValueError):
    """A map between Boolean algebras is not a homomorphism."""
    pass


class FinBoolAlg(Lattice):
    """The Boolean algebra of subsets of k atoms, as bitmasks.

    Args:
        atom_count: Number of atoms; 0 gives the terminal algebra (0 = 1)
        atom_labels: Optional labels, one per atom
        name: Display name
    """

    def __init__(self, atom_count: int, atom_labels: Optional[Sequence[Hashable]] = None, name: str = ""):
        if atom_count < 0:
            raise ValueError("atom_count must be non-negative")
        self.atom_count = atom_count
        self.atom_labels = tuple(atom_labels) if atom_labels is not None else tuple(range(atom_count))
        if len(self.atom_labels) != atom_count or len(set(self.atom_labels)) != atom_count:
            raise ValueError("atom_labels must be distinct and one per atom")
        self.name = name
        self.full = (1 << atom_count) - 1

    @property
    def elements(self) -> tuple:
        return tuple(range(1 << self.atom_count))

    @property
    def size(self) -> int:
        return 1 << self.atom_count

    def leq(self, a, b) -> bool:
        return a & ~b == 0

    def meet(self, a, b):
        return a & b

    def join(self, a, b):
        return a | b

    def neg(self, a):
        return self.full ^ a

    @property
    def bottom(self):
        return 0

    @property
    def top(self):
        return self.full

    def atoms_of(self, a: int) -> list[int]:
        return [i for i in range(self.atom_count) if a >> i & 1]

    def __repr__(self) -> str:
        return f"FinBoolAlg({self.name or self.atom_count})"


TWO = FinBoolAlg(1, name="2")
TERMINAL = FinBoolAlg(0, name="1")


@dataclass(frozen=True, eq=False)
class BoolHom:
    """A map source -> target given by the image of every element."""
    source: FinBoolAlg
    target: FinBoolAlg
    images: tuple

    def __call__(self, a: int) -> int:
        return self.images[a]

    @classmethod
    def from_dual(cls, source: FinBoolAlg, target: FinBoolAlg, dual: Sequence[int]) -> "BoolHom":
        """Hom determined by a map atoms(target) -> atoms(source): e goes to the target atoms landing in e."""
        images = tuple(
            sum(1 << t for t, s in enumerate(dual) if e >> s & 1)
            for e in range(source.size)
        )
        return cls(source, target, images)


def validate_bool_hom(h: BoolHom) -> CheckReport:
    """Check preservation of 0, 1, complement, meet and join."""
    report = CheckReport(name="boolean-hom")
    S, T = h.source, h.target
    if len(h.images) != S.size or any(not 0 <= x < T.size for x in h.images):
        return report.fail("total", ())
    if h(0) != 0:
        return report.fail("zero", (0,))
    if h(S.full) != T.full:
        return report.fail("one", (S.full,))
    for a in S.elements:
        if h(S.neg(a)) != T.neg(h(a)):
            return report.fail("complement", (a,))
        for b in S.elements:
            if h(a & b) != h(a) & h(b):
                return report.fail("meet", (a, b))
            if h(a | b) != h(a) | h(b):
                return report.fail("join", (a, b))
    return report


def bool_homs(source: FinBoolAlg, target: FinBoolAlg) -> list[BoolHom]:
    """Every homomorphism source -> target, one per map atoms(target) -> atoms(source)."""
    return [
        BoolHom.from_dual(source, target, dual)
        for dual in product(range(source.atom_count), repeat=target.atom_count)
    ]


def atoms(B: FinBoolAlg) -> list[int]:
    return [1 << i for i in range(B.atom_count)]


def characters(B: FinBoolAlg) -> list[BoolHom]:
    """Homs B -> 2, one per atom, in atom order."""
    return [BoolHom(B, TWO, tuple((e >> i) & 1 for e in B.elements)) for i in range(B.atom_count)]


# =============================================================================
# Stone duality
# =============================================================================

def stone_spectrum(B: FinBoolAlg) -> FinFrame:
    """Discrete frame on the atoms (characters) of B; opens are sets of atom labels."""
    return discrete_frame(B.atom_labels, name=f"Stone({B.name})")


def stone_on_hom(h: BoolHom) -> LocaleMap:
    """Locale map Stone(target) -> Stone(source), by precomposing characters with h.

    Raises:
        InvalidHomomorphismError: If h is not a Boolean homomorphism
    """
    check = validate_bool_hom(h)
    if not check.ok:
        raise InvalidHomomorphismError(f"Not a Boolean hom: {check.law} at {check.witness}")
    S, T = h.source, h.target
    # character of T at atom t, precomposed with h, is the character of S at the unique atom s with h(s) containing t
    dual = {}
    for t in range(T.atom_count):
        s = next(i for i in range(S.atom_count) if h(1 << i) >> t & 1)
        dual[T.atom_labels[t]] = S.atom_labels[s]
    return LocaleMap(
        stone_spectrum(T),
        stone_spectrum(S),
        lambda U: frozenset(t for t, s in dual.items() if s in U),
    )


@dataclass
class ComplementedAlgebra:
    """Boolean algebra of complemented opens of a frame, with its embedding into the opens."""
    algebra: FinBoolAlg
    embed: dict[int, Hashable]


def complemented_elements(L: FinFrame) -> ComplementedAlgebra:
    """The complemented opens of L as a FinBoolAlg (atoms = minimal nonzero complemented opens)."""
    lattice = L.lattice
    complemented = [x for x in L.elements if lattice.complement(x) is not None]
    nonzero = [x for x in complemented if x != L.bottom]
    minimal = [x for x in nonzero if not any(y != x and L.leq(y, x) for y in nonzero)]
    minimal.sort(key=sort_key)
    B = FinBoolAlg(len(minimal), name=f"Comp({L.name})")
    embed = {mask: lattice.join_all(minimal[i] for i in B.atoms_of(mask)) for mask in B.elements}
    return ComplementedAlgebra(B, embed)


def stone_round_trip(B: FinBoolAlg) -> CheckReport:
    """Complemented opens of Stone(B) form an algebra isomorphic to B."""
    report = CheckReport(name="stone-round-trip")
    spectrum = stone_spectrum(B)
    comp = complemented_elements(spectrum)
    if comp.algebra.atom_count != B.atom_count:
        return report.fail("atom-count", (B.atom_count, comp.algebra.atom_count))
    opens = set(comp.embed.values())
    if len(opens) != comp.algebra.size or len(opens) != sum(1 for x in spectrum.elements if spectrum.lattice.complement(x) is not None):
        return report.fail("embedding", ())
    for a in comp.algebra.elements:
        for b in comp.algebra.elements:
            if comp.embed[a & b] != spectrum.meet(comp.embed[a], comp.embed[b]):
                return report.fail("meet", (a, b))
            if comp.embed[a | b] != spectrum.join(comp.embed[a], comp.embed[b]):
                return report.fail("join", (a, b))
    report.detail["atoms"] = B.atom_count
    return report


# =============================================================================
# Presentations and model enumeration
# =============================================================================

@dataclass(frozen=True)
class Presentation:
    """Propositional theory in CNF over named generators.

    Clauses hold signed 1-based variable indices (DIMACS convention). The empty
    clause marks an inconsistent theory.
    """
    vars: tuple[str, ...]
    clauses: tuple[tuple[int, ...], ...] = ()

    def index(self, name: str) -> int:
        return self.vars.index(name) + 1

    def to_dimacs(self, comments: Iterable[str] = ()) -> str:
        lines = [f"c {c}" for c in comments]
        lines.append(f"p cnf {len(self.vars)} {len(self.clauses)}")
        lines.extend(" ".join(str(lit) for lit in clause) + (" 0" if clause else "0") for clause in self.clauses)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "Presentation":
        """Parse DIMACS CNF; variables are named by number.

        Raises:
            ValueError: On a missing or malformed header
        """
        num_vars = None
        clauses: list[tuple[int, ...]] = []
        pending: list[int] = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise ValueError(f"Malformed DIMACS header: {line!r}")
                num_vars = int(parts[2])
                continue
            for token in line.split():
                lit = int(token)
                if lit == 0:
                    clauses.append(tuple(pending))
                    pending = []
                else:
                    pending.append(lit)
        if num_vars is None:
            raise ValueError("DIMACS input has no 'p cnf' header")
        if pending:
            clauses.append(tuple(pending))
        return cls(tuple(str(i) for i in range(1, num_vars + 1)), tuple(clauses))


class _Solver:
    """DPLL over a Presentation with occurrence-list unit propagation.

    Decisions take variables in order and try 0 before 1, so models come out in
    lexicographic order.
    """

    def __init__(self, presentation: Presentation):
        self.n = len(presentation.vars)
        self.clauses = presentation.clauses
        self.occurs: dict[int, list[int]] = {}
        for ci, clause in enumerate(self.clauses):
            for lit in set(clause):
                self.occurs.setdefault(lit, []).append(ci)
        self.values = [-1] * (self.n + 1)
        self.trail: list[int] = []
        self.decisions = 0

    def _lit_value(self, lit: int) -> int:
        v = self.values[abs(lit)]
        if v < 0:
            return -1
        return v if lit > 0 else 1 - v

    def _assign(self, var: int, value: int) -> None:
        self.values[var] = value
        self.trail.append(var)

    def _check_clause(self, ci: int) -> Optional[int]:
        """Returns 0 on conflict, a literal to force, or None when nothing follows."""
        unassigned = None
        count = 0
        for lit in self.clauses[ci]:
            val = self._lit_value(lit)
            if val == 1:
                return None
            if val < 0:
                count += 1
                unassigned = lit
        if count == 0:
            return 0
        if count == 1:
            return unassigned
        return None

    def propagate(self, start: int) -> bool:
        head = start
        while head < len(self.trail):
            var = self.trail[head]
            head += 1
            false_lit = -var if self.values[var] == 1 else var
            for ci in self.occurs.get(false_lit, ()):
                result = self._check_clause(ci)
                if result == 0:
                    return False
                if result is not None:
                    self._assign(abs(result), 1 if result > 0 else 0)
        return True

    def initial(self, fixed: Sequence[tuple[int, int]] = ()) -> bool:
        for var, value in fixed:
            if self.values[var] >= 0:
                if self.values[var] != value:
                    return False
                continue
            self._assign(var, value)
        for ci in range(len(self.clauses)):
            result = self._check_clause(ci)
            if result == 0:
                return False
            if result is not None:
                var = abs(result)
                value = 1 if result > 0 else 0
                if self.values[var] < 0:
                    self._assign(var, value)
        return self.propagate(0)

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.values[self.trail.pop()] = -1

    def _next_free(self) -> int:
        for var in range(1, self.n + 1):
            if self.values[var] < 0:
                return var
        return 0

    def models(self, first_only: bool = False) -> list[Valuation]:
        found: list[Valuation] = []
        stack: list[tuple[int, int, int]] = []  # (trail mark, var, value tried)
        while True:
            var = self._next_free()
            if var == 0:
                found.append(tuple(self.values[1:]))
                if first_only:
                    return found
                ok = False
            else:
                stack.append((len(self.trail), var, 0))
                self.decisions += 1
                mark = len(self.trail)
                self._assign(var, 0)
                ok = self.propagate(mark)
            while not ok:
                while stack and stack[-1][2] == 1:
                    self._undo(stack.pop()[0])
                if not stack:
                    return found
                mark, var, _ = stack.pop()
                self._undo(mark)
                stack.append((mark, var, 1))
                self._assign(var, 1)
                ok = self.propagate(mark)


def first_branch_variable(P: Presentation) -> int:
    """First variable left free after initial propagation (0 if none, -1 if inconsistent)."""
    solver = _Solver(P)
    if not solver.initial():
        return -1
    return solver._next_free()


def _models_with(P: Presentation, fixed: Sequence[tuple[int, int]], first_only: bool = False) -> list[Valuation]:
    solver = _Solver(P)
    if not solver.initial(fixed):
        return []
    return solver.models(first_only=first_only)


def enumerate_models(P: Presentation, threads: int = 1) -> list[Valuation]:
    """All satisfying valuations, as 0/1 tuples in variable order, sorted lexicographically.

    With more than one thread the search splits on the first free variable and
    the two halves are merged in order.
    """
    if any(len(c) == 0 for c in P.clauses):
        return []
    started = time.perf_counter()
    split = first_branch_variable(P) if threads > 1 else 0
    if split > 0:
        with ThreadPoolExecutor(max_workers=2) as pool:
            halves = list(pool.map(lambda value: _models_with(P, [(split, value)]), (0, 1)))
        models = halves[0] + halves[1]
    else:
        models = _models_with(P, ())
    models.sort()
    logger.debug("enumerate_models: %d vars, %d clauses, %d models in %.3fs",
                 len(P.vars), len(P.clauses), len(models), time.perf_counter() - started)
    return models


def find_model(P: Presentation) -> Optional[Valuation]:
    if any(len(c) == 0 for c in P.clauses):
        return None
    models = _models_with(P, (), first_only=True)
    return models[0] if models else None


def valuation(P: Presentation, model: Sequence[int]) -> dict[str, int]:
    return dict(zip(P.vars, model))


# =============================================================================
# Lindenbaum algebras and colimits
# =============================================================================

@dataclass
class LindenbaumAlgebra:
    """Powerset algebra on the models, with each generator sent to its truth set."""
    algebra: FinBoolAlg
    models: list[Valuation]
    interpretation: dict[str, int]

    @property
    def is_terminal(self) -> bool:
        return self.algebra.atom_count == 0


def lindenbaum(P: Presentation, threads: int = 1) -> LindenbaumAlgebra:
    models = enumerate_models(P, threads=threads)
    algebra = FinBoolAlg(len(models), name="Lindenbaum")
    interpretation = {
        name: sum(1 << m for m, model in enumerate(models) if model[i])
        for i, name in enumerate(P.vars)
    }
    return LindenbaumAlgebra(algebra, models, interpretation)


@dataclass
class BooleanColimit:
    """Colimit algebra of a Boolean diagram with its cocone and defining presentation."""
    algebra: FinBoolAlg
    cocone: dict[Hashable, BoolHom]
    presentation: Presentation
    models: list[Valuation] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.algebra.size


def element_var(node: Hashable, element: int) -> str:
    return f"{node}:{element}"


def diagram_presentation(D: Diagram) -> Presentation:
    """CNF presentation of a Boolean diagram.

    One variable per element per node (node-id major, element minor). Atoms act
    as exactly-one indicator variables, every other element is defined as the
    disjunction of its atoms, and every arrow contributes biconditionals.
    """
    names: list[str] = []
    for n in D.node_ids:
        names.extend(element_var(n, e) for e in D.nodes[n].elements)
    index = {name: i + 1 for i, name in enumerate(names)}
    clauses: list[tuple[int, ...]] = []

    for n in D.node_ids:
        B: FinBoolAlg = D.nodes[n]
        atom_vars = [index[element_var(n, 1 << i)] for i in range(B.atom_count)]
        clauses.append(tuple(atom_vars))
        for a in range(len(atom_vars)):
            for b in range(a + 1, len(atom_vars)):
                clauses.append((-atom_vars[a], -atom_vars[b]))
        for e in B.elements:
            if e and e & (e - 1) == 0:
                continue
            x = index[element_var(n, e)]
            members = [atom_vars[i] for i in B.atoms_of(e)]
            clauses.append((-x, *members))
            clauses.extend((-m, x) for m in members)

    for arrow in D.arrows:
        for e in D.nodes[arrow.source].elements:
            x = index[element_var(arrow.source, e)]
            y = index[element_var(arrow.target, arrow.morphism(e))]
            if x != y:
                clauses.append((-x, y))
                clauses.append((x, -y))
    return Presentation(tuple(names), tuple(clauses))


def boolean_colimit(D: Diagram, threads: int = 1) -> BooleanColimit:
    """Colimit of a diagram of finite Boolean algebras as a Lindenbaum algebra.

    Raises:
        NonCommutingDiagramError: If the diagram does not commute
    """
    check_commutes(D)
    P = diagram_presentation(D)
    theory = lindenbaum(P, threads=threads)
    cocone = {
        n: BoolHom(D.nodes[n], theory.algebra,
                   tuple(theory.interpretation[element_var(n, e)] for e in D.nodes[n].elements))
        for n in D.node_ids
    }
    logger.info("boolean_colimit: %d nodes, %d models, size 2^%d",
                len(D.nodes), len(theory.models), len(theory.models))
    return BooleanColimit(theory.algebra, cocone, P, theory.models)


def check_colimit_universal(D: Diagram, colimit: BooleanColimit, targets: Iterable[FinBoolAlg]) -> CheckReport:
    """Every cocone from D into each target factors uniquely through the colimit."""
    report = CheckReport(name="colimit-universal-property")
    ids = D.node_ids
    for T in targets:
        through = {}
        for h in bool_homs(colimit.algebra, T):
            key = tuple(tuple(h(colimit.cocone[n](e)) for e in D.nodes[n].elements) for n in ids)
            through[key] = through.get(key, 0) + 1
        candidates = [bool_homs(D.nodes[n], T) for n in ids]
        for family in product(*candidates):
            legs = dict(zip(ids, family))
            if any(legs[a.target](a.morphism(e)) != legs[a.source](e)
                   for a in D.arrows for e in D.nodes[a.source].elements):
                continue
            key = tuple(legs[n].images for n in ids)
            if through.get(key, 0) != 1:
                return report.fail("unique-factorization", (T,), factorizations=through.get(key, 0))
    return report
