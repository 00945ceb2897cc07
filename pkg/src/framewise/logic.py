"""Extension axioms, their model checking, and the Monte Carlo 0-1 harness.

An extension axiom says: every embedded copy of a base structure extends, by
one fresh vertex, to a copy of a prescribed one-point extension.  These
sentences hold in the generic countable member of the class; on finite
samples their probability tends to one, which the experiment here estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Optional

from .core import (
    SIMPLICIAL,
    LocalClassSpec,
    Structure,
    face_symbol,
    induced_substructure,
    require_member,
)
from .errors import SizeLimit
from .measure import ENUMERATION_CAP, members_on
from .sampler import LazyLimit, Seed, find_witness, sample_finite
from .search import canonical_pointed_key, embeddings


@dataclass(frozen=True)
class ExtensionAxiom:
    """base -> one-point extension; the new vertex is the maximal index."""

    base: Structure
    extension: Structure

    def __post_init__(self):
        if not self.extension.universe:
            raise ValueError("the extension needs at least one vertex")
        new = self.extension.universe[-1]
        rest = [v for v in self.extension.universe if v != new]
        if tuple(rest) != self.base.universe:
            raise ValueError("base universe must be the extension universe minus its maximum")
        if induced_substructure(self.extension, rest) != self.base:
            raise ValueError("base must be the induced substructure of the extension")

    @property
    def new_vertex(self) -> int:
        return self.extension.universe[-1]

    def __repr__(self):
        return f"ExtensionAxiom(base={self.base!r}, extension={self.extension!r})"


def extension_axiom(extension: Structure, spec: Optional[LocalClassSpec] = None) -> ExtensionAxiom:
    """Build the axiom for a one-point extension; base = drop the max vertex."""
    new = extension.universe[-1]
    base = induced_substructure(extension, [v for v in extension.universe if v != new])
    ax = ExtensionAxiom(base, extension)
    if spec is not None:
        require_member(extension, spec, "extension")
    return ax


def extension_axioms_up_to(spec: LocalClassSpec, size: int,
                           cap: int = ENUMERATION_CAP) -> list[ExtensionAxiom]:
    """One representative per isomorphism type of one-point extension pairs."""
    if size > cap:
        raise SizeLimit(f"size {size} exceeds the enumeration cap {cap}")
    out = []
    seen = set()
    for n in range(1, size + 1):
        for B in members_on(range(n), spec, cap=cap):
            key = canonical_pointed_key(B, n - 1)
            if key in seen:
                continue
            seen.add(key)
            out.append(extension_axiom(B))
    return out


# ---------------------------------------------------------------------------
# Model checking on finite structures
# ---------------------------------------------------------------------------

def _extends_at(S: Structure, ax: ExtensionAxiom, emb: dict, w: int) -> bool:
    """Does mapping the new vertex to w complete emb to a copy of the extension?"""
    new = ax.new_vertex
    B = ax.extension
    full = dict(emb)
    full[new] = w
    base_vs = list(ax.base.universe)
    for r in range(len(base_vs) + 1):
        for comb in combinations(base_vs, r):
            Y = frozenset(comb) | {new}
            if (Y in B.faces) != (frozenset(full[x] for x in Y) in S.faces):
                return False
    # custom tuple relations, if any
    for name, items in B.relations:
        if items and not isinstance(next(iter(items)), frozenset):
            for item in items:
                if new in item and tuple(full[x] for x in item) not in S.interp(name):
                    return False
    for name, items in S.relations:
        if items and not isinstance(next(iter(items)), frozenset):
            image = {full[x]: x for x in full}
            for item in items:
                if w in item and set(item) <= set(image):
                    if tuple(image[y] for y in item) not in B.interp(name):
                        return False
    return True


def _is_set_family_structure(S: Structure) -> bool:
    return all(not items or isinstance(next(iter(items)), frozenset) for _, items in S.relations)


def _adjacency(S: Structure) -> dict:
    nbrs: dict[int, set] = {v: set() for v in S.universe}
    for f in S.faces_by_size.get(2, ()):
        a, b = f
        nbrs[a].add(b)
        nbrs[b].add(a)
    return nbrs


def _base_embeddings(S: Structure, base: Structure, nbrs: dict):
    """Embeddings of a set-family base, with candidates cut down by adjacency."""
    order = sorted(base.universe,
                   key=lambda v: -sum(1 for f in base.faces if v in f))
    pos_in_base = {v: [u for u in base.universe if frozenset((u, v)) in base.faces] for v in base.universe}
    singletons = {v: frozenset((v,)) in base.faces for v in base.universe}
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def status_ok(v, w):
        if singletons[v] != (frozenset((w,)) in S.faces):
            return False
        for u in mapping:
            if u == v:
                continue
            if (u in pos_in_base[v]) != (mapping[u] in nbrs[w]):
                return False
        placed = [u for u in mapping if u != v]
        for r in range(2, len(placed) + 1):
            for comb in combinations(placed, r):
                Y = frozenset(comb) | {v}
                if (Y in base.faces) != (frozenset(mapping[x] for x in Y) in S.faces):
                    return False
        return True

    def extend(k):
        if k == len(order):
            yield dict(mapping)
            return
        v = order[k]
        anchored = [u for u in pos_in_base[v] if u in mapping]
        if anchored:
            cands = set(nbrs[mapping[anchored[0]]])
            for u in anchored[1:]:
                cands &= nbrs[mapping[u]]
        else:
            cands = set(S.universe)
        for w in sorted(cands - used):
            mapping[v] = w
            used.add(w)
            if status_ok(v, w):
                yield from extend(k + 1)
            del mapping[v]
            used.discard(w)

    yield from extend(0)


def _holds_extension_fast(S: Structure, ax: ExtensionAxiom) -> bool:
    base, B, new = ax.base, ax.extension, ax.new_vertex
    nbrs = _adjacency(S)
    pos_adj = [a for a in base.universe if frozenset((a, new)) in B.faces]
    neg_adj = [a for a in base.universe if frozenset((a, new)) not in B.faces]
    singleton_new = frozenset((new,)) in B.faces
    any_singletons = any(len(f) == 1 for f in S.faces) or singleton_new
    high = []
    for r in range(2, len(base.universe) + 1):
        for comb in combinations(base.universe, r):
            high.append((comb, (frozenset(comb) | {new}) in B.faces))

    for emb in _base_embeddings(S, base, nbrs):
        image = set(emb.values())
        if pos_adj:
            cands = set(nbrs[emb[pos_adj[0]]])
            for a in pos_adj[1:]:
                cands &= nbrs[emb[a]]
        else:
            cands = set(S.universe)
        cands -= image
        for b in neg_adj:
            cands -= nbrs[emb[b]]
        found = False
        for w in cands:
            if any_singletons and singleton_new != (frozenset((w,)) in S.faces):
                continue
            ok = True
            for comb, expect in high:
                got = frozenset(emb[x] for x in comb) | {w}
                if (got in S.faces) != expect:
                    ok = False
                    break
            if ok:
                found = True
                break
        if not found:
            return False
    return True


def holds_extension(S: Structure, ax: ExtensionAxiom) -> bool:
    """True iff every embedding of the base extends inside S to the extension."""
    if _is_set_family_structure(S) and _is_set_family_structure(ax.extension):
        return _holds_extension_fast(S, ax)
    for emb in embeddings(ax.base, S):
        image = set(emb.values())
        if not any(_extends_at(S, ax, emb, w) for w in S.universe if w not in image):
            return False
    return True


def holds_extension_oracle(L: LazyLimit, ax: ExtensionAxiom, region: int,
                           cap: int = 10000) -> tuple[bool, list]:
    """Check the axiom over all base embeddings within the first ``region`` vertices.

    Witness search failures are not falsity: they raise, carrying the
    probability bound for an honest sample exhausting the candidate cap.
    """
    window = L.restriction(range(region))
    log = []
    for emb in embeddings(ax.base, window):
        w = find_witness(L, emb, ax.extension, cap=cap)
        log.append((dict(emb), w))
    return True, log


# ---------------------------------------------------------------------------
# The convergence experiment
# ---------------------------------------------------------------------------

def wilson_interval(successes: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    """Wilson score interval; well behaved near 0 and 1."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    trials: int
    satisfied: int
    estimate: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[ExperimentRow, ...]
    limit: int
    label: str = ""

    def csv_lines(self) -> list[str]:
        out = ["N,trials,satisfied,estimate,ci_lo,ci_hi,limit"]
        for r in self.rows:
            out.append(f"{r.n},{r.trials},{r.satisfied},{r.estimate:.6f},{r.ci_lo:.6f},{r.ci_hi:.6f},{self.limit}")
        return out


def zero_one_experiment(ax: ExtensionAxiom, Ns: Iterable[int], trials: int, seed: Seed,
                        spec: Optional[LocalClassSpec] = None, negate: bool = False) -> ExperimentResult:
    """Estimate the probability that samples on N vertices satisfy the axiom.

    The sentence's limiting value is 1 (0 for its negation); finite-N rows
    carry Wilson 95% intervals.
    """
    if trials < 100:
        raise ValueError("use at least 100 trials")
    spec = spec or _infer_spec(ax)
    rows = []
    for n in Ns:
        hits = 0
        for t in range(trials):
            S = sample_finite(n, spec, seed.child("zero-one", n, "trial", t))
            sat = holds_extension(S, ax)
            hits += (not sat) if negate else sat
        lo, hi = wilson_interval(hits, trials)
        rows.append(ExperimentRow(n, trials, hits, hits / trials, lo, hi))
    return ExperimentResult(tuple(rows), limit=0 if negate else 1,
                            label="negated extension axiom" if negate else "extension axiom")


def _infer_spec(ax: ExtensionAxiom) -> LocalClassSpec:
    from .core import simplicial_class

    return simplicial_class()


# ---------------------------------------------------------------------------
# Greedy collapsibility probe
# ---------------------------------------------------------------------------

def _all_faces_with_vertices(S: Structure) -> set:
    faces = set(S.faces)
    faces.update(frozenset((v,)) for v in S.universe)
    return faces


def greedy_collapse(S: Structure) -> tuple[Structure, bool]:
    """Remove free pairs until stuck; a True flag certifies contractibility.

    A face is free when exactly one other face strictly contains it, which
    forces that container to be a facet one dimension up; both are removed.
    The least free face (by size, then lexicographically) is taken each round,
    so runs are deterministic.  A False flag is inconclusive.
    """
    faces = _all_faces_with_vertices(S)
    cofaces = {f: 0 for f in faces}
    for f in faces:
        for v in f:
            g = f - {v}
            if g in cofaces:
                cofaces[g] += 1

    def free_faces():
        return [f for f, c in cofaces.items() if c == 1]

    while True:
        frees = free_faces()
        if not frees:
            break
        f = min(frees, key=lambda x: (len(x), tuple(sorted(x))))
        g = next(h for h in faces if len(h) == len(f) + 1 and f < h)
        for x in (f, g):
            faces.discard(x)
            del cofaces[x]
            for v in x:
                y = x - {v}
                if y in cofaces:
                    cofaces[y] -= 1

    remaining_vertices = sorted(v for f in faces for v in f)
    interp: dict[str, set] = {}
    for f in faces:
        if len(f) >= 2:
            interp.setdefault(face_symbol(len(f)), set()).add(f)
    reduced = Structure.make(sorted(set(remaining_vertices)), interp)
    collapsed = len(faces) == 1 and len(reduced.universe) == 1
    return reduced, collapsed


def collapse_probe(n: int, trials: int, seed: Seed,
                   spec: Optional[LocalClassSpec] = None) -> tuple[int, int]:
    """Fraction of samples on n vertices that greedily collapse to a point."""
    from .core import simplicial_class

    spec = spec or simplicial_class()
    hits = 0
    for t in range(trials):
        S = sample_finite(n, spec, seed.child("collapse", n, "trial", t))
        _, flag = greedy_collapse(S)
        hits += flag
    return hits, trials
