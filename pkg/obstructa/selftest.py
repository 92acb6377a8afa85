"""Invariant suite behind `obstructa selftest` and the run_selftest tool.

Each criterion is a function returning a CriterionResult; run_selftest runs
them in order and times each one. Suite inputs are the bundled datasets, a
deterministic family of small generated complexes, every small distributive
lattice, and a handful of handcrafted finite categories.
"""

import json
import logging
import os
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Hashable, Optional

import networkx as nx

from obstructa.boolean import FinBoolAlg, enumerate_models, stone_round_trip
from obstructa.cat import (
    CategoryError,
    CommutingSquare,
    DiagramData,
    FinCategory,
    PreconditionError,
    check_obstruction_theorem,
    cones_from,
    discrete_category,
    identity_functor,
    limit,
    mediating_morphism,
    reflects_initial,
    thin_category,
    thin_functor,
    transport,
)
from obstructa.complexes import (
    FrameComplex,
    brute_force_colorings,
    color_search,
    load_complex,
    models_to_colorings,
    paste,
    to_cnf,
    validate_complex,
)
from obstructa.exactlin import RayVector
from obstructa.locale import FinFrame, is_boolean_frame, is_compact, is_regular, loc_limit
from obstructa.order import (
    dlat_colimit,
    downsets,
    is_boolean_lattice,
    join_irreducibles,
    poset_isomorphism,
    small_posets,
)
from obstructa.pba import pba_homs_to_two, total_subalgebra_diagram
from obstructa.spectra import (
    SpectrumFunctor,
    complex_boolean_colimit,
    complex_spectrum_limit,
    finite_sets_category,
    nogo_pipeline,
    ringed_toy,
    stone_diagram,
)

logger = logging.getLogger(__name__)

UNCOLORABLE_DATASETS = ("peres33_completed_d3", "peres24_d4")

# dataset -> (colorings, Boolean colimit size)
COLORABLE_DATASETS = {
    "single_basis_d3": (3, 8),
    "shared_ray_d3": (5, 32),
}

SUITE_SIZE = 50
BIRKHOFF_MAX_SIZE = 8
STONE_MAX_ATOMS = 4
REGULARITY_MAX_SIZE = 16

_BASES_D2 = (
    ((1, 0), (0, 1)),
    ((1, 1), (1, -1)),
    ((1, 2), (2, -1)),
    ((1, 3), (3, -1)),
    ((2, 3), (3, -2)),
)

_BASES_D3 = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((1, 0, 0), (0, 1, 1), (0, 1, -1)),
    ((0, 1, 0), (1, 0, 1), (1, 0, -1)),
    ((0, 0, 1), (1, 1, 0), (1, -1, 0)),
    ((1, 1, 0), (1, -1, 1), (1, -1, -2)),
    ((0, 1, 1), (1, 1, -1), (2, -1, 1)),
    ((1, 0, 1), (1, 1, -1), (1, -2, -1)),
    ((1, -1, 0), (1, 1, 1), (1, 1, -2)),
)


@dataclass
class CriterionResult:
    """Outcome of one acceptance criterion."""
    name: str
    ok: bool = True
    message: str = ""
    elapsed: float = 0.0
    detail: dict[str, Any] = field(default_factory=dict)

    def fail(self, message: str) -> "CriterionResult":
        if self.ok:
            self.ok = False
            self.message = message
        return self

    def to_dict(self) -> dict[str, Any]:
        result = {"name": self.name, "passed": self.ok, "elapsed": round(self.elapsed, 3)}
        if self.message:
            result["message"] = self.message
        if self.detail:
            result["detail"] = self.detail
        return result


@dataclass
class SelftestReport:
    results: list[CriterionResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.ok,
            "criteria": [r.to_dict() for r in self.results],
        }


# =============================================================================
# Suite inputs
# =============================================================================

def _complex_from_bases(dimension: int, bases: tuple, name: str) -> FrameComplex:
    rays: list[RayVector] = []
    index: dict[RayVector, int] = {}
    indexed_bases = []
    for basis in bases:
        members = []
        for coords in basis:
            ray = RayVector.of(*coords)
            if ray not in index:
                index[ray] = len(rays)
                rays.append(ray)
            members.append(index[ray])
        indexed_bases.append(tuple(members))
    return FrameComplex(dimension=dimension, rays=tuple(rays), bases=tuple(indexed_bases), name=name)


def _connected(bases: tuple) -> bool:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(bases)))
    for i, j in combinations(range(len(bases)), 2):
        if {RayVector.of(*v) for v in bases[i]} & {RayVector.of(*v) for v in bases[j]}:
            graph.add_edge(i, j)
    return nx.is_connected(graph)


def generate_complexes(count: int = SUITE_SIZE) -> list[FrameComplex]:
    """Deterministic small complexes: dimension 2 and 3, at most 4 bases and 12 rays.

    Dimension-3 complexes are connected selections from a fixed pool of
    rational bases, so they share rays; dimension-2 complexes are unions of
    disjoint bases.
    """
    found: list[FrameComplex] = []
    for size in (1, 2):
        for picked in combinations(range(len(_BASES_D2)), size):
            found.append(_complex_from_bases(2, tuple(_BASES_D2[i] for i in picked), f"d2-{'-'.join(map(str, picked))}"))
    for size in (1, 2, 3, 4):
        for picked in combinations(range(len(_BASES_D3)), size):
            bases = tuple(_BASES_D3[i] for i in picked)
            if size > 1 and not _connected(bases):
                continue
            found.append(_complex_from_bases(3, bases, f"d3-{'-'.join(map(str, picked))}"))
            if len(found) >= count:
                return found
    return found


@dataclass
class HandcraftedCase:
    """A commuting square with a diagram A and an object X of the square's C corner."""
    name: str
    square: CommutingSquare
    A: DiagramData
    X: Hashable
    mediates: bool
    applicable: bool


def _identity_square(C: FinCategory) -> CommutingSquare:
    I = identity_functor(C)
    return CommutingSquare(F=I, H=I, G=I, K=I)


def _diagram(C: FinCategory, shape: FinCategory, objects: dict) -> DiagramData:
    return DiagramData(shape, thin_functor(shape, C, objects, name="A"))


def handcrafted_cases() -> list[HandcraftedCase]:
    chain = thin_category([0, 1, 2], lambda a, b: a <= b, name="chain3")
    diamond_order = {("bot", "a"), ("bot", "b"), ("bot", "top"), ("a", "top"), ("b", "top")}
    diamond = thin_category(["bot", "a", "b", "top"],
                            lambda x, y: x == y or (x, y) in diamond_order, name="diamond")
    semi_order = {("0", "a"), ("0", "b"), ("0", "c"), ("a", "c"), ("b", "c")}
    semilattice = thin_category(["0", "a", "b", "c"],
                                lambda x, y: x == y or (x, y) in semi_order, name="meet-semilattice")
    five_order = {("0", x) for x in "pqr1"} | {("p", "r"), ("q", "r"), ("p", "1"), ("q", "1"), ("r", "1")}
    five = thin_category(["0", "p", "q", "r", "1"],
                         lambda x, y: x == y or (x, y) in five_order, name="poset5")
    two = thin_category(["x", "y"], lambda a, b: a <= b, name="chain2")
    discrete = discrete_category(["x", "y"], name="discrete2")

    point = discrete_category(["j"], name="point")
    pair = discrete_category(["l", "r"], name="pair")
    cospan = thin_category(["l", "r", "m"], lambda a, b: a == b or b == "m", name="cospan")
    empty = discrete_category([], name="empty")

    constant_y = thin_functor(five, two, {o: "y" for o in five.objects}, name="K")
    skewed = CommutingSquare(
        F=identity_functor(five), H=identity_functor(five), G=constant_y, K=constant_y,
    )

    return [
        HandcraftedCase("identity-square", _identity_square(chain),
                        _diagram(chain, point, {"j": 1}), 0, mediates=True, applicable=False),
        HandcraftedCase("diamond-product", _identity_square(diamond),
                        _diagram(diamond, pair, {"l": "a", "r": "b"}), "bot", mediates=True, applicable=True),
        HandcraftedCase("meet-semilattice-pullback", _identity_square(semilattice),
                        _diagram(semilattice, cospan, {"l": "a", "r": "b", "m": "c"}), "0",
                        mediates=True, applicable=True),
        HandcraftedCase("empty-diagram", _identity_square(diamond),
                        _diagram(diamond, empty, {}), "a", mediates=True, applicable=False),
        HandcraftedCase("K-not-preserving-initial", skewed,
                        _diagram(five, point, {"j": "r"}), "p", mediates=True, applicable=False),
        HandcraftedCase("discrete-no-product", _identity_square(discrete),
                        _diagram(discrete, pair, {"l": "x", "r": "y"}), "x", mediates=False, applicable=False),
    ]


def check_handcrafted_case(case: HandcraftedCase) -> Optional[str]:
    """None when the case behaves as expected, otherwise a diagnostic."""
    HA = transport(case.square.H, case.A)
    cones = cones_from(HA, case.X, first_only=True)
    if case.mediates:
        if not cones:
            return f"{case.name}: no cone from {case.X!r}"
        try:
            mediating_morphism(case.square, case.A, cones[0])
        except PreconditionError as e:
            return f"{case.name}: {e}"
    elif cones and limit(case.square.F.target, transport(case.square.F, case.A)) is not None:
        return f"{case.name}: expected no limit"
    report = check_obstruction_theorem(case.square, case.X, case.A)
    if report.applicable != case.applicable:
        return f"{case.name}: applicable={report.applicable}, expected {case.applicable}"
    if not report.ok:
        return f"{case.name}: conclusion failed"
    return None


# =============================================================================
# Criteria
# =============================================================================

def check_uncolorable_datasets(threads: int = 1) -> CriterionResult:
    result = CriterionResult("uncolorable-datasets")
    for name in UNCOLORABLE_DATASETS:
        c = load_complex(name)
        valid = validate_complex(c)
        if not valid.ok:
            return result.fail(f"{name}: {valid.law} at {valid.witness}")
        found = color_search(c, mode="count", threads=threads)
        result.detail[name] = {"colorings": found.count, "nodes": found.nodes}
        if found.count != 0:
            result.fail(f"{name}: {found.count} colorings")
    return result


def check_boolean_colimits(threads: int = 1) -> CriterionResult:
    result = CriterionResult("boolean-colimits")
    expected = {name: 1 for name in UNCOLORABLE_DATASETS}
    expected.update({name: size for name, (_, size) in COLORABLE_DATASETS.items()})
    for name, size in expected.items():
        got = complex_boolean_colimit(load_complex(name), threads=threads).size
        result.detail[name] = got
        if got != size:
            result.fail(f"{name}: colimit size {got}, expected {size}")
    return result


def check_spectrum_limits() -> CriterionResult:
    result = CriterionResult("spectrum-limits")
    expected = {name: 0 for name in UNCOLORABLE_DATASETS}
    expected.update({name: count for name, (count, _) in COLORABLE_DATASETS.items()})
    for name, count in expected.items():
        c = load_complex(name)
        for functor in SpectrumFunctor:
            limit_ = complex_spectrum_limit(c, functor)
            initial = limit_.frame.size == 1
            if limit_.point_count != count or initial != (count == 0):
                return result.fail(
                    f"{name}/{functor.value}: {limit_.point_count} points, initial={initial}"
                )
        result.detail[name] = count
    return result


def check_tri_equivalence(complexes: list[FrameComplex], threads: int = 1) -> CriterionResult:
    """colorings = CNF models = PBA morphisms to 2 = limit points, against brute force."""
    result = CriterionResult("tri-equivalence", detail={"complexes": len(complexes)})
    for c in complexes:
        oracle = brute_force_colorings(c)
        searched = color_search(c, mode="enumerate", threads=threads).colorings
        presentation, _ = to_cnf(c)
        cnf = models_to_colorings(c, enumerate_models(presentation, threads=threads))
        pasted = paste(c)
        homs = sorted(pasted.hom_to_coloring(h) for h in pba_homs_to_two(pasted.pba))
        points = complex_spectrum_limit(c, SpectrumFunctor.GELFAND).point_count
        if not (searched == cnf == homs == sorted(oracle)) or points != len(oracle):
            return result.fail(
                f"{c.name}: brute={len(oracle)} search={len(searched)} cnf={len(cnf)} "
                f"pba={len(homs)} points={points}"
            )
    return result


def check_dualities() -> CriterionResult:
    """Birkhoff round trip on small distributive lattices and Stone round trip on small Boolean algebras."""
    result = CriterionResult("duality-round-trips")
    posets = small_posets(BIRKHOFF_MAX_SIZE)
    for P in posets:
        L = downsets(P)
        if poset_isomorphism(join_irreducibles(L), P) is None:
            return result.fail(f"Birkhoff round trip failed on a poset with {len(P)} elements")
    for k in range(STONE_MAX_ATOMS + 1):
        report = stone_round_trip(FinBoolAlg(k))
        if not report.ok:
            return result.fail(f"Stone round trip failed at {k} atoms: {report.law}")
    result.detail.update(lattices=len(posets), stone_algebras=STONE_MAX_ATOMS + 1)
    return result


def check_boolean_preservation(complexes: list[FrameComplex]) -> CriterionResult:
    """Colimits of Boolean lattices and limits of Boolean frames stay Boolean."""
    result = CriterionResult("boolean-preservation")
    for c in complexes:
        sub = total_subalgebra_diagram(paste(c).pba)
        if not is_boolean_lattice(dlat_colimit(sub.diagram).lattice):
            return result.fail(f"{c.name}: distributive colimit is not Boolean")
        if not is_boolean_frame(loc_limit(stone_diagram(sub.diagram), verify_points=False).frame):
            return result.fail(f"{c.name}: locale limit is not Boolean")
    return result


def check_regularity_collapse() -> CriterionResult:
    """Finite frames are regular exactly when Boolean, and always compact."""
    result = CriterionResult("regularity-collapse")
    frames = [FinFrame(downsets(P)) for P in small_posets(REGULARITY_MAX_SIZE)]
    for L in frames:
        if is_regular(L) != is_boolean_frame(L):
            return result.fail(f"is_regular disagrees with Boolean on a frame of size {L.size}")
        if not is_compact(L):
            return result.fail(f"frame of size {L.size} is not compact")
    result.detail["frames"] = len(frames)
    return result


def check_obstruction_kernel(threads: int = 1) -> CriterionResult:
    """Handcrafted categories, the ringed toy, and the materialized square on uncolorable inputs."""
    result = CriterionResult("obstruction-kernel")
    for case in handcrafted_cases():
        try:
            problem = check_handcrafted_case(case)
        except CategoryError as e:
            problem = f"{case.name}: {e}"
        if problem:
            return result.fail(problem)
    R, U = ringed_toy(finite_sets_category([0, 1, 2]))
    if len({U.ob(X) for X in R.objects}) == len(R.objects):
        return result.fail("ringed toy: forgetful functor is injective on objects")
    if not reflects_initial(U):
        return result.fail("ringed toy: forgetful functor does not reflect initial objects")
    for name in UNCOLORABLE_DATASETS:
        report = nogo_pipeline(load_complex(name), SpectrumFunctor.GELFAND, threads=threads)
        if report.obstruction is None or not report.obstruction.applicable or not report.obstruction.ok:
            return result.fail(f"{name}: obstruction theorem did not apply to the spectra square")
    result.detail["handcrafted"] = len(handcrafted_cases())
    return result


def pipeline_json(source: str, functor: SpectrumFunctor = SpectrumFunctor.GELFAND, threads: int = 1) -> str:
    report = nogo_pipeline(load_complex(source), functor, threads=threads)
    return json.dumps(report.to_json_dict(), sort_keys=True, indent=2)


def check_determinism(max_threads: Optional[int] = None) -> CriterionResult:
    result = CriterionResult("determinism")
    counts = sorted({1, 2, max_threads or os.cpu_count() or 1})
    for name in (*COLORABLE_DATASETS, *UNCOLORABLE_DATASETS):
        outputs = {pipeline_json(name, threads=t) for t in counts}
        if len(outputs) != 1:
            return result.fail(f"{name}: output differs across thread counts {counts}")
    result.detail["threads"] = counts
    return result


def _timed(fn: Callable[[], CriterionResult]) -> CriterionResult:
    started = time.perf_counter()
    result = fn()
    result.elapsed = time.perf_counter() - started
    logger.info("selftest %s: %s (%.2fs)", result.name, "ok" if result.ok else result.message, result.elapsed)
    return result


def run_selftest(threads: int = 1) -> SelftestReport:
    """Run every criterion in order."""
    suite = generate_complexes()
    report = SelftestReport()
    for fn in (
        lambda: check_uncolorable_datasets(threads),
        lambda: check_boolean_colimits(threads),
        check_spectrum_limits,
        lambda: check_tri_equivalence(suite, threads),
        check_dualities,
        lambda: check_boolean_preservation(suite),
        check_regularity_collapse,
        lambda: check_obstruction_kernel(threads),
        lambda: check_determinism(threads),
    ):
        report.results.append(_timed(fn))
    return report
