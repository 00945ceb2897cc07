"""Piecewise-linear charts: cone extension, filling to the standard simplex,
the staged realisation of the oracle, and numeric verification.

Charts carry exact rational coordinates (cone points and barycentres are
rational), so chart compatibility across stages is an equality of fractions;
volume and coverage audits convert to floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Structure, complex_on, induced_substructure
from .errors import DegenerateCell, PreconditionFailed, VertexClash
from .sampler import DEFAULT_WITNESS_CAP, LazyLimit, realise_pattern


def _all_faces(S: Structure) -> set:
    faces = set(S.faces)
    faces.update(frozenset((v,)) for v in S.universe)
    return faces


def _maximal_faces(S: Structure) -> list[frozenset]:
    faces = _all_faces(S)
    return [f for f in faces if not any(f < g for g in faces)]


@dataclass
class PLChart:
    """Vertex coordinates determining an affine-on-faces map of a complex."""

    complex: Structure
    ambient_dim: int
    coords: dict

    def __post_init__(self):
        for v in self.complex.universe:
            if v not in self.coords:
                raise ValueError(f"vertex {v} has no coordinates")
            if len(self.coords[v]) != self.ambient_dim:
                raise ValueError(f"vertex {v} has a point of the wrong dimension")
        pts = [tuple(self.coords[v]) for v in self.complex.universe]
        if len(set(pts)) != len(pts):
            raise ValueError("vertex images must be pairwise distinct")

    def point(self, v: int) -> tuple:
        return tuple(self.coords[v])


def standard_chart(vertices: Sequence[int]) -> PLChart:
    """The full simplex on the vertices, mapped to the standard basis."""
    from .core import full_simplex

    verts = sorted(vertices)
    n = len(verts)
    sc = full_simplex(verts) if n >= 2 else complex_on(verts, [])
    coords = {v: tuple(Fraction(int(i == j)) for j in range(n)) for i, v in enumerate(verts)}
    return PLChart(sc, n, coords)


def cone_extend(SCprime: Structure, SC: Structure, v: int, chart: PLChart) -> PLChart:
    """Extend a chart over one new vertex placed on a fresh unit axis.

    Old vertices keep their coordinates with a zero appended; the new vertex
    goes to (0,...,0,1).  A homeomorphism onto its image stays one.
    """
    if v in SC.universe:
        raise VertexClash(f"vertex {v} already belongs to the base complex")
    if set(SCprime.universe) != set(SC.universe) | {v}:
        raise ValueError("the extended complex must add exactly the new vertex")
    if induced_substructure(SCprime, SC.universe) != SC:
        raise ValueError("the base must be the induced subcomplex of the extension")
    if chart.complex != SC:
        raise ValueError("the chart must chart the base complex")
    dim = chart.ambient_dim + 1
    coords = {w: tuple(chart.coords[w]) + (Fraction(0),) for w in SC.universe}
    coords[v] = tuple(Fraction(0) for _ in range(dim - 1)) + (Fraction(1),)
    return PLChart(SCprime, dim, coords)


def fill_to_simplex(SC: Structure, v: int, chart: PLChart,
                    precheck_samples: int = 2000) -> tuple[Structure, PLChart]:
    """Subdivide until the chart covers the whole standard simplex.

    Faces whose join with the apex vertex is missing are listed by increasing
    dimension; each gets a fresh vertex at the barycentre of the apex and the
    face, coned over everything already sitting on that face's boundary cone
    (tracked combinatorially: the earlier fill vertices whose face is a proper
    subset).  The result charts homeomorphically onto the standard simplex.
    """
    n = chart.ambient_dim - 1
    e_last = tuple(Fraction(0) for _ in range(n)) + (Fraction(1),)
    if tuple(chart.coords[v]) != e_last:
        raise PreconditionFailed("the apex vertex must sit on the last unit axis")
    rest = [w for w in SC.universe if w != v]
    for w in rest:
        if chart.coords[w][-1] != 0:
            raise PreconditionFailed("the base must lie in the last-coordinate-zero hyperplane")
    if rest:
        base_chart = PLChart(induced_substructure(SC, rest), n,
                             {w: tuple(chart.coords[w])[:-1] for w in rest})
        report = verify_chart(base_chart, n - 1, precheck_samples)
        if report.volume_sum_error > 1e-9 or report.coverage_failures:
            raise PreconditionFailed(
                f"the base chart is not the standard {n - 1}-simplex "
                f"(volume error {report.volume_sum_error:.2e}, "
                f"{report.coverage_failures} coverage failures)")

    original_faces = _all_faces(SC)
    deficient = sorted((f for f in original_faces if f | {v} not in original_faces),
                       key=lambda f: (len(f), tuple(sorted(f))))

    faces = set(SC.faces)
    universe = list(SC.universe)
    coords = {w: tuple(chart.coords[w]) for w in SC.universe}
    fill_vertex: list[tuple[int, frozenset]] = []
    next_id = max(universe) + 1

    def current_faces_within(W: set) -> list[frozenset]:
        out = [f for f in faces if f <= W]
        out.extend(frozenset((u,)) for u in W)
        return out

    for F in deficient:
        riders = {cv for cv, Fj in fill_vertex if Fj < F}
        W = set(F) | {v} | riders
        c = next_id
        next_id += 1
        for G in current_faces_within(W):
            faces.add(G | {c})
        universe.append(c)
        pts = [coords[v]] + [coords[u] for u in sorted(F)]
        k = len(pts)
        coords[c] = tuple(sum(p[i] for p in pts) / k for i in range(chart.ambient_dim))
        fill_vertex.append((c, F))

    filled = complex_on(universe, faces)
    return filled, PLChart(filled, chart.ambient_dim, coords)


@dataclass(frozen=True)
class VerificationReport:
    injective_on_vertices: bool
    cell_volumes: tuple
    volume_sum_error: float
    coverage_failures: int
    samples: int
    excluded: int

    @property
    def ok(self) -> bool:
        return self.injective_on_vertices and self.volume_sum_error < 1e-9 and self.coverage_failures == 0


def _cell_volume(points: np.ndarray) -> float:
    # points: rows are the n+1 vertices in ambient space
    edges = points[1:] - points[0]
    gram = edges @ edges.T
    det = np.linalg.det(gram)
    n = points.shape[0] - 1
    return math.sqrt(max(det, 0.0)) / math.factorial(n)


def verify_chart(chart: PLChart, n: int, samples: int, seed: int = 0,
                 boundary_band: float = 1e-7, degenerate_tol: float = 1e-12) -> VerificationReport:
    """Audit a chart against the standard n-simplex.

    Sums maximal-cell volumes against the simplex volume and samples uniform
    points, counting how many miss landing in exactly one open cell.  Points
    within the boundary band of any cell are excluded from that count.
    """
    maximal = _maximal_faces(chart.complex)
    for f in maximal:
        if len(f) != n + 1:
            raise PreconditionFailed(f"maximal face {sorted(f)} is not {n}-dimensional")
    pts = {v: np.array([float(x) for x in chart.coords[v]]) for v in chart.complex.universe}
    injective = len({tuple(chart.coords[v]) for v in chart.complex.universe}) == len(chart.complex.universe)

    if n == 0:
        vols = tuple(1.0 for _ in maximal)
        err = abs(sum(vols) - 1.0)
        return VerificationReport(injective, vols, err, 0 if len(maximal) == 1 else samples, samples, 0)

    ambient = chart.ambient_dim
    if ambient != n + 1:
        raise PreconditionFailed(f"expected ambient dimension {n + 1}, chart has {ambient}")
    cells = [sorted(f) for f in maximal]
    vols = []
    mats = []
    for cell in cells:
        P = np.stack([pts[v] for v in cell])
        vol = _cell_volume(P)
        if vol < degenerate_tol:
            raise DegenerateCell(f"cell {cell} has volume {vol:.3e}")
        vols.append(vol)
        mats.append(np.linalg.inv(P.T))
    standard = math.sqrt(n + 1) / math.factorial(n)
    err = abs(sum(vols) - standard)

    rng = np.random.default_rng(seed)
    sample_pts = rng.dirichlet(np.ones(n + 1), samples)  # rows in the standard simplex

    inside_count = np.zeros(samples, dtype=int)
    near_any = np.zeros(samples, dtype=bool)
    for inv in mats:
        lam = inv @ sample_pts.T  # (n+1, samples) barycentric coordinates
        geq = (lam >= -boundary_band).all(axis=0)
        strict = (lam > boundary_band).all(axis=0)
        near = geq & ~strict
        inside_count += strict
        near_any |= near
    considered = ~near_any
    failures = int(np.count_nonzero(considered & (inside_count != 1)))
    return VerificationReport(injective, tuple(vols), float(err), failures, samples,
                              int(np.count_nonzero(near_any)))


def realize_chain(L: LazyLimit, steps: int, cap: int = DEFAULT_WITNESS_CAP,
                  precheck_samples: int = 2000) -> list[tuple[Structure, PLChart]]:
    """Grow induced subcomplexes of the oracle charting onto standard simplices.

    Stage 0 is the least oracle vertex.  Each later stage absorbs the least
    unused vertex by coning, fills the chart to the next standard simplex, and
    realises the filled pattern inside the oracle by witness search; old
    vertices keep their coordinates (with a zero appended) exactly.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if L.spec.kind != "simplicial":
        raise ValueError("the realisation chain is for the simplicial class")

    sc0 = L.restriction([0])
    chart = PLChart(sc0, 1, {0: (Fraction(1),)})
    stages = [(sc0, chart)]
    used = {0}
    for _ in range(1, steps):
        current, chart = stages[-1]
        v = 0
        while v in used:
            v += 1
        scv = L.restriction(sorted(used | {v}))
        chart_v = cone_extend(scv, current, v, chart)
        pattern, pchart = fill_to_simplex(scv, v, chart_v, precheck_samples=precheck_samples)
        emb = realise_pattern(L, pattern, scv.universe, cap=cap)
        realized_vertices = sorted(emb.values())
        sc_n = L.restriction(realized_vertices)
        mapped = {frozenset(emb[x] for x in f) for f in pattern.faces}
        if mapped != set(sc_n.faces):
            raise RuntimeError("realised complex does not match the filled pattern")
        coords = {emb[p]: pchart.coords[p] for p in pattern.universe}
        chart_n = PLChart(sc_n, pchart.ambient_dim, coords)
        stages.append((sc_n, chart_n))
        used.update(realized_vertices)
    return stages


def chart_to_off(chart: PLChart) -> str:
    """An OFF mesh of the chart's maximal faces (nOFF above three dimensions)."""
    verts = list(chart.complex.universe)
    index = {v: i for i, v in enumerate(verts)}
    maximal = sorted(_maximal_faces(chart.complex), key=lambda f: tuple(sorted(f)))
    dim = chart.ambient_dim
    lines = []
    if dim <= 3:
        lines.append("OFF")
    else:
        lines.append("nOFF")
        lines.append(str(dim))
    lines.append(f"{len(verts)} {len(maximal)} 0")
    for v in verts:
        pt = [float(x) for x in chart.coords[v]]
        if dim <= 3:
            pt = pt + [0.0] * (3 - dim)
        lines.append(" ".join(f"{x:.12g}" for x in pt))
    for f in maximal:
        cell = sorted(f)
        lines.append(" ".join([str(len(cell))] + [str(index[v]) for v in cell]))
    return "\n".join(lines) + "\n"
