"""Frame complexes: rays grouped into orthonormal bases.

Loading and validating configurations, pasting their bases into a partial
Boolean algebra of subspaces, the complete two-coloring search, CNF export,
and the diagram of commutative subalgebras consumed by the spectra pipeline.
"""

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations, product
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from obstructa.boolean import Presentation
from obstructa.cat import Arrow
from obstructa.exactlin import RayVector, Scalar, SubspaceClass, inner, rref, zero_space
from obstructa.pba import TWO_PBA, OrthoLattice, PartialBooleanAlgebra, PBAHom, total_subalgebra_diagram
from obstructa.reports import CheckReport

logger = logging.getLogger(__name__)

FIELDS = ("Q", "Q(sqrt2)")
REQUIRED_KEYS = ("dimension", "field", "rays", "bases")
OPTIONAL_KEYS = ("name", "description")


class ConfigurationError(Exception):
    """Base exception for unusable configuration input."""
    pass


class ConfigParseError(ConfigurationError):
    """Input is not valid JSON."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SchemaError(ConfigurationError):
    """Input is JSON but violates the configuration schema."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


@dataclass(frozen=True)
class FrameComplex:
    """Rays in dimension n grouped into bases of n mutually orthogonal rays."""
    dimension: int
    rays: tuple[RayVector, ...]
    bases: tuple[tuple[int, ...], ...]
    field: str = "Q"
    name: str = ""
    description: str = ""

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {}
        if self.name:
            data["name"] = self.name
        if self.description:
            data["description"] = self.description
        data.update({
            "dimension": self.dimension,
            "field": self.field,
            "rays": [r.to_json() for r in self.rays],
            "bases": [list(b) for b in self.bases],
        })
        return data

    def digest(self) -> str:
        """sha256 of the canonical JSON form (rays in projective normal form)."""
        payload = json.dumps({k: v for k, v in self.to_json().items() if k not in OPTIONAL_KEYS},
                             sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def degree(self, ray: int) -> int:
        return sum(1 for b in self.bases if ray in b)


# =============================================================================
# Loading
# =============================================================================

def parse_complex(text: str) -> FrameComplex:
    """Parse configuration JSON.

    Raises:
        ConfigParseError: If the text is not JSON
        SchemaError: If the document does not match the schema
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, line=e.lineno, column=e.colno) from e
    return complex_from_json(data)


def complex_from_json(data: Any) -> FrameComplex:
    if not isinstance(data, dict):
        raise SchemaError("configuration must be an object", "")
    for key in data:
        if key not in REQUIRED_KEYS + OPTIONAL_KEYS:
            raise SchemaError(f"unknown key {key!r}", f"/{key}")
    for key in REQUIRED_KEYS:
        if key not in data:
            raise SchemaError(f"missing key {key!r}", f"/{key}")
    for key in OPTIONAL_KEYS:
        if key in data and not isinstance(data[key], str):
            raise SchemaError("must be a string", f"/{key}")

    dimension = data["dimension"]
    if isinstance(dimension, bool) or not isinstance(dimension, int) or dimension < 2:
        raise SchemaError("dimension must be an integer >= 2", "/dimension")
    field_name = data["field"]
    if field_name not in FIELDS:
        raise SchemaError(f"field must be one of {list(FIELDS)}", "/field")

    raw_rays = data["rays"]
    if not isinstance(raw_rays, list):
        raise SchemaError("rays must be an array", "/rays")
    rays = []
    for i, raw in enumerate(raw_rays):
        if not isinstance(raw, list) or len(raw) != dimension:
            raise SchemaError(f"ray must have {dimension} coordinates", f"/rays/{i}")
        coords = []
        for j, coord in enumerate(raw):
            try:
                value = Scalar.parse(coord)
            except ValueError as e:
                raise SchemaError(str(e), f"/rays/{i}/{j}") from e
            if field_name == "Q" and value.irr != 0:
                raise SchemaError("sqrt2 coordinate in a field 'Q' configuration", f"/rays/{i}/{j}")
            coords.append(value)
        if all(c.is_zero() for c in coords):
            raise SchemaError("zero vector", f"/rays/{i}")
        rays.append(RayVector(tuple(coords)))

    raw_bases = data["bases"]
    if not isinstance(raw_bases, list):
        raise SchemaError("bases must be an array", "/bases")
    bases = []
    for i, raw in enumerate(raw_bases):
        if not isinstance(raw, list):
            raise SchemaError("basis must be an array of ray indices", f"/bases/{i}")
        for j, index in enumerate(raw):
            if isinstance(index, bool) or not isinstance(index, int) or not 0 <= index < len(rays):
                raise SchemaError(f"ray index out of range 0..{len(rays) - 1}", f"/bases/{i}/{j}")
        bases.append(tuple(raw))

    return FrameComplex(
        dimension=dimension,
        rays=tuple(rays),
        bases=tuple(bases),
        field=field_name,
        name=data.get("name", ""),
        description=data.get("description", ""),
    )


def list_datasets() -> list[str]:
    """Names of the bundled configurations."""
    root = resources.files("obstructa.datasets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_dataset(name: str) -> str:
    if name not in list_datasets():
        raise ConfigurationError(f"Unknown dataset {name!r}; bundled: {', '.join(list_datasets())}")
    return resources.files("obstructa.datasets").joinpath(f"{name}.json").read_text(encoding="utf-8")


def resolve_source(source: str) -> tuple[str, str]:
    """Read a configuration from a file path or a bundled dataset name.

    Returns:
        Tuple of (json text, label)

    Raises:
        ConfigurationError: If the source is neither a readable file nor a dataset
    """
    path = Path(source).expanduser()
    if path.is_file():
        try:
            return path.read_text(encoding="utf-8"), str(path)
        except OSError as e:
            raise ConfigurationError(f"Cannot read {path}: {e}") from e
    return read_dataset(source), f"dataset:{source}"


def load_complex(source: str) -> FrameComplex:
    text, label = resolve_source(source)
    c = parse_complex(text)
    logger.debug("Loaded %s: dimension %d, %d rays, %d bases", label, c.dimension, len(c.rays), len(c.bases))
    return c


# =============================================================================
# Validation
# =============================================================================

def validate_complex(c: FrameComplex) -> CheckReport:
    """Exact check that every basis consists of n distinct, pairwise orthogonal rays covering all rays."""
    report = CheckReport(name="frame-complex")
    if c.dimension < 2:
        return report.fail("dimension", (c.dimension,))
    for i, ray in enumerate(c.rays):
        if ray.dim != c.dimension:
            return report.fail("ray-dimension", (i,))
    seen: dict[RayVector, int] = {}
    for i, ray in enumerate(c.rays):
        if ray in seen:
            return report.fail("duplicate-ray", (seen[ray], i))
        seen[ray] = i
    for bi, basis in enumerate(c.bases):
        if len(basis) != c.dimension:
            return report.fail("basis-size", (bi,), size=len(basis))
        if len(set(basis)) != len(basis):
            return report.fail("duplicate-in-basis", (bi,))
        for a, b in combinations(basis, 2):
            product_ = inner(c.rays[a], c.rays[b])
            if not product_.is_zero():
                return report.fail("orthogonality", (a, b), basis=bi, inner=product_.to_json())
    covered = {i for b in c.bases for i in b}
    for i in range(len(c.rays)):
        if i not in covered:
            return report.fail("uncovered-ray", (i,))
    report.detail.update(rays=len(c.rays), bases=len(c.bases), dimension=c.dimension)
    return report


# =============================================================================
# Pasting
# =============================================================================

@dataclass
class PastedPBA:
    """Subspace-sums of subsets of single bases, identified across bases.

    Elements are ints; `subspaces[x]` is the subspace of element x and
    `expressions[x]` lists every (basis, ray subset) that spans it.
    """
    complex: FrameComplex
    pba: PartialBooleanAlgebra
    subspaces: dict[int, SubspaceClass]
    expressions: dict[int, tuple[tuple[int, frozenset], ...]]
    ray_element: dict[int, int]

    def provenance(self, x: int) -> tuple[int, frozenset]:
        return self.expressions[x][0]

    def shared(self) -> list[int]:
        """Elements other than 0 and 1 expressed by more than one basis."""
        return [x for x in self.pba.carrier
                if x not in (self.pba.zero, self.pba.one) and len({b for b, _ in self.expressions[x]}) > 1]

    def stats(self) -> dict[str, Any]:
        shared = self.shared()
        by_rank: dict[str, int] = {}
        for x in shared:
            key = str(self.subspaces[x].rank)
            by_rank[key] = by_rank.get(key, 0) + 1
        return {
            "elements": self.pba.size,
            "bases": len(self.complex.bases),
            "rays": len(self.complex.rays),
            "shared": len(shared),
            "sharedByRank": dict(sorted(by_rank.items())),
        }

    def coloring_to_hom(self, coloring: Sequence[int]) -> PBAHom:
        """The morphism to 2 sending an element to 1 when its rays contain the colored one."""
        mapping = {}
        for x in self.pba.carrier:
            _, rays = self.provenance(x)
            mapping[x] = 1 if any(coloring[r] for r in rays) else 0
        return PBAHom(self.pba, TWO_PBA, mapping)

    def hom_to_coloring(self, h: PBAHom) -> tuple[int, ...]:
        return tuple(h(self.ray_element[i]) for i in range(len(self.complex.rays)))


def paste(c: FrameComplex) -> PastedPBA:
    """Paste the Boolean algebras of the bases along shared subspaces."""
    n = c.dimension
    ids: dict[SubspaceClass, int] = {zero_space(n): 0}
    expressions: dict[int, list[tuple[int, frozenset]]] = {0: []}
    per_basis: list[dict[int, int]] = []  # mask -> element, per basis

    for bi, basis in enumerate(c.bases):
        table = {}
        for mask in range(1 << len(basis)):
            rays = frozenset(basis[k] for k in range(len(basis)) if mask >> k & 1)
            space = rref((c.rays[r] for r in rays), dim=n) if rays else zero_space(n)
            if space not in ids:
                ids[space] = len(ids)
                expressions[ids[space]] = []
            x = ids[space]
            expressions[x].append((bi, rays))
            table[mask] = x
        per_basis.append(table)

    full = per_basis[0][(1 << n) - 1] if c.bases else 0
    neg, meet, join = {}, {}, {}
    for bi, basis in enumerate(c.bases):
        table = per_basis[bi]
        top = (1 << len(basis)) - 1
        for m in table:
            neg[table[m]] = table[top ^ m]
            for k in table:
                key = frozenset((table[m], table[k]))
                meet[key] = table[m & k]
                join[key] = table[m | k]
    if not c.bases:
        neg[0] = 0
        meet[frozenset((0,))] = join[frozenset((0,))] = 0

    ray_element = {}
    for bi, basis in enumerate(c.bases):
        for k, r in enumerate(basis):
            ray_element.setdefault(r, per_basis[bi][1 << k])

    carrier = sorted(ids.values())
    pba = PartialBooleanAlgebra(carrier, 0, full, neg, meet, join, name=c.name or "pasted")
    pasted = PastedPBA(
        complex=c,
        pba=pba,
        subspaces={x: s for s, x in ids.items()},
        expressions={x: tuple(e) for x, e in expressions.items()},
        ray_element=ray_element,
    )
    logger.debug("paste: %s", pasted.stats())
    return pasted


def pasted_ortholattice(pasted: PastedPBA) -> OrthoLattice:
    """Pasted elements ordered by subspace inclusion, with orthocomplement as perp.

    Raises:
        NotALatticeError: If the fragment is not closed under the needed meets and joins
    """
    spaces = pasted.subspaces
    return OrthoLattice(
        pasted.pba.carrier,
        lambda a, b: spaces[b].contains(spaces[a]),
        pasted.pba.neg,
        name=f"L({pasted.pba.name})",
    )


# =============================================================================
# Coloring search
# =============================================================================

def ray_classes(c: FrameComplex) -> list[int]:
    """Representative (first) index of the subspace class of each ray."""
    first: dict[RayVector, int] = {}
    return [first.setdefault(r, i) for i, r in enumerate(c.rays)]


def shared_subspace_constraints(c: FrameComplex) -> list[tuple[frozenset, frozenset]]:
    """Pairs of ray sets from different bases spanning the same subspace of rank 2..n-1.

    Each subspace with several expressions contributes a chain linking
    consecutive expressions.
    """
    n = c.dimension
    spans: dict[SubspaceClass, list[frozenset]] = {}
    for basis in c.bases:
        for size in range(2, n):
            for rays in combinations(basis, size):
                key = frozenset(rays)
                space = rref((c.rays[r] for r in rays), dim=n)
                known = spans.setdefault(space, [])
                if key not in known:
                    known.append(key)
    constraints = []
    for exprs in spans.values():
        for a, b in zip(exprs, exprs[1:]):
            constraints.append((a, b))
    return constraints


class _ColoringSearch:
    """Backtracking over identified rays with propagation through bases and shared subspaces."""

    def __init__(self, c: FrameComplex):
        self.c = c
        self.cls = ray_classes(c)
        self.vars = sorted(set(self.cls))
        self.bases = [tuple(sorted({self.cls[r] for r in b})) for b in c.bases]
        self.shared = [(tuple(sorted({self.cls[r] for r in a})), tuple(sorted({self.cls[r] for r in b})))
                       for a, b in shared_subspace_constraints(c)]
        degree = {v: 0 for v in self.vars}
        for b in self.bases:
            for v in b:
                degree[v] += 1
        self.order = sorted(self.vars, key=lambda v: (-degree[v], v))
        self.watch: dict[int, list[tuple[str, int]]] = {v: [] for v in self.vars}
        for i, b in enumerate(self.bases):
            for v in b:
                self.watch[v].append(("basis", i))
        for i, (a, b) in enumerate(self.shared):
            for v in set(a) | set(b):
                self.watch[v].append(("shared", i))
        self.values: dict[int, int] = {}
        self.trail: list[int] = []
        self.nodes = 0

    def _set(self, v: int, value: int, queue: list) -> bool:
        known = self.values.get(v)
        if known is not None:
            return known == value
        self.values[v] = value
        self.trail.append(v)
        queue.append(v)
        return True

    def _or(self, vs: tuple) -> Optional[int]:
        free = False
        for v in vs:
            val = self.values.get(v)
            if val == 1:
                return 1
            if val is None:
                free = True
        return None if free else 0

    def _basis(self, vs: tuple, queue: list) -> bool:
        ones = [v for v in vs if self.values.get(v) == 1]
        if len(ones) > 1:
            return False
        if ones:
            return all(self._set(v, 0, queue) for v in vs if v != ones[0])
        free = [v for v in vs if v not in self.values]
        if not free:
            return False
        if len(free) == 1:
            return self._set(free[0], 1, queue)
        return True

    def _equiv(self, a: tuple, b: tuple, queue: list) -> bool:
        va, vb = self._or(a), self._or(b)
        if va is not None and vb is not None:
            return va == vb
        known, other = (va, b) if va is not None else (vb, a)
        if known is None:
            return True
        if known == 0:
            return all(self._set(v, 0, queue) for v in other)
        free = [v for v in other if v not in self.values]
        if len(free) == 1:
            return self._set(free[0], 1, queue)
        return True

    def propagate(self, queue: list) -> bool:
        while queue:
            v = queue.pop()
            for kind, i in self.watch[v]:
                ok = self._basis(self.bases[i], queue) if kind == "basis" else self._equiv(*self.shared[i], queue)
                if not ok:
                    return False
        return True

    def start(self, fixed: dict[int, int]) -> bool:
        queue: list[int] = []
        for v, value in fixed.items():
            if not self._set(v, value, queue):
                return False
        for b in self.bases:
            if not self._basis(b, queue):
                return False
        return self.propagate(queue)

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            del self.values[self.trail.pop()]

    def solutions(self, first_only: bool) -> list[tuple[int, ...]]:
        found: list[tuple[int, ...]] = []

        def search() -> bool:
            self.nodes += 1
            v = next((v for v in self.order if v not in self.values), None)
            if v is None:
                found.append(tuple(self.values[self.cls[r]] for r in range(len(self.c.rays))))
                return first_only
            for value in (1, 0):
                mark = len(self.trail)
                queue: list[int] = []
                if self._set(v, value, queue) and self.propagate(queue):
                    if search():
                        return True
                self._undo(mark)
            return False

        search()
        return found


@dataclass
class ColoringResult:
    """Outcome of a coloring search; colorings are 0/1 tuples indexed by ray."""
    mode: str
    count: int
    colorings: list[tuple[int, ...]] = field(default_factory=list)
    nodes: int = 0
    elapsed: float = 0.0

    @property
    def found(self) -> Optional[tuple[int, ...]]:
        return self.colorings[0] if self.colorings else None


COLOR_MODES = ("find", "count", "enumerate")


def _subtree(c: FrameComplex, fixed: dict[int, int], first_only: bool) -> tuple[list, int]:
    search = _ColoringSearch(c)
    if not search.start(fixed):
        return [], 1
    found = search.solutions(first_only)
    return found, search.nodes


def color_search(c: FrameComplex, mode: str = "count", threads: int = 1) -> ColoringResult:
    """Complete search for 2-colorings: exactly one ray per basis, consistent on shared subspaces.

    The search is split by which ray of the first basis is colored, so every mode
    returns the same result for any thread count.

    Raises:
        ValueError: On an unknown mode
    """
    if mode not in COLOR_MODES:
        raise ValueError(f"mode must be one of {COLOR_MODES}")
    started = time.perf_counter()
    cls = ray_classes(c)
    subtrees = [{cls[r]: 1} for r in dict.fromkeys(cls[r] for r in c.bases[0])] if c.bases else [{}]
    first_only = mode == "find"

    if threads > 1 and len(subtrees) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(subtrees))) as pool:
            parts = list(pool.map(lambda fixed: _subtree(c, fixed, first_only), subtrees))
    else:
        parts = []
        for fixed in subtrees:
            parts.append(_subtree(c, fixed, first_only))
            if first_only and parts[-1][0]:
                break

    nodes = sum(p[1] for p in parts)
    if first_only:
        first = next((p[0][:1] for p in parts if p[0]), [])
        colorings = first
    else:
        colorings = sorted(col for p in parts for col in p[0])
    result = ColoringResult(mode, len(colorings), colorings if mode != "count" else [], nodes,
                            time.perf_counter() - started)
    logger.debug("color_search(%s): %d colorings, %d nodes, %.3fs", mode, result.count, nodes, result.elapsed)
    return result


def brute_force_colorings(c: FrameComplex) -> list[tuple[int, ...]]:
    """All colorings by exhaustive assignment; for small complexes only."""
    cls = ray_classes(c)
    shared = shared_subspace_constraints(c)
    result = []
    for values in product((0, 1), repeat=len(c.rays)):
        if any(values[i] != values[cls[i]] for i in range(len(c.rays))):
            continue
        if any(len({cls[r] for r in b if values[r]}) != 1 for b in c.bases):
            continue
        if any(any(values[r] for r in a) != any(values[r] for r in b) for a, b in shared):
            continue
        result.append(values)
    return result


# =============================================================================
# CNF
# =============================================================================

def to_cnf(c: FrameComplex) -> tuple[Presentation, dict[int, int]]:
    """CNF whose models are the colorings.

    Returns:
        Tuple of (presentation, ray index -> 1-based variable)
    """
    cls = ray_classes(c)
    reps = sorted(set(cls))
    var_of_rep = {r: i + 1 for i, r in enumerate(reps)}
    var = {i: var_of_rep[cls[i]] for i in range(len(c.rays))}
    clauses: list[tuple[int, ...]] = []
    for basis in c.bases:
        vs = sorted({var[r] for r in basis})
        clauses.append(tuple(vs))
        clauses.extend((-a, -b) for a, b in combinations(vs, 2))
    for a, b in shared_subspace_constraints(c):
        va = sorted({var[r] for r in a})
        vb = sorted({var[r] for r in b})
        clauses.extend((-x, *vb) for x in va)
        clauses.extend((-y, *va) for y in vb)
    presentation = Presentation(tuple(f"r{r}" for r in reps), tuple(clauses))
    return presentation, var


def to_dimacs(c: FrameComplex) -> str:
    presentation, var = to_cnf(c)
    comments = [f"ray {i} = var {v}" for i, v in sorted(var.items())]
    return presentation.to_dimacs(comments)


def models_to_colorings(c: FrameComplex, models: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    _, var = to_cnf(c)
    return sorted(tuple(m[var[i] - 1] for i in range(len(c.rays))) for m in models)


# =============================================================================
# Commutative subalgebras
# =============================================================================

def subalgebra_diagram(c: FrameComplex, pasted: Optional[PastedPBA] = None):
    """Diagram of diagonal commutative algebras of the bases and their intersections.

    Characters of a node are labeled by the rays spanning each of its minimal
    projections, collected over every expression of that projection.
    """
    from obstructa.spectra import AlgebraDiagram, AlgHom, CommAlgObject

    pasted = pasted or paste(c)
    sub = total_subalgebra_diagram(pasted.pba)
    nodes = {}
    for node_id in sub.diagram.node_ids:
        B = sub.diagram.nodes[node_id]
        labels = [
            frozenset(r for _, rays in pasted.expressions[atom] for r in rays)
            for atom in B.atom_labels
        ]
        nodes[node_id] = CommAlgObject(len(labels), tuple(labels))
    arrows = []
    for arrow in sub.diagram.arrows:
        h = arrow.morphism
        dual = tuple(
            next(i for i in range(h.source.atom_count) if h(1 << i) >> j & 1)
            for j in range(h.target.atom_count)
        )
        arrows.append(Arrow(arrow.source, arrow.target, AlgHom(nodes[arrow.source], nodes[arrow.target], dual)))
    return AlgebraDiagram(nodes, tuple(arrows))

