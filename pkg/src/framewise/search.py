"""Backtracking search for embeddings and isomorphisms of finite structures.

An embedding preserves and reflects every relation (an isomorphism onto its
image).  The search assigns vertices one at a time; the consistency check
walks subsets of the assigned part, so its cost scales with the pattern, not
with the host structure.
"""

from __future__ import annotations

from itertools import combinations, permutations
from typing import Iterator, Optional

from .core import Structure


def vertex_profile(S: Structure, v: int) -> tuple:
    """Incidence counts of a vertex, per relation item shape."""
    counts: dict = {}
    for name, items in S.relations:
        for item in items:
            if isinstance(item, frozenset):
                if v in item:
                    key = (name, len(item))
                    counts[key] = counts.get(key, 0) + 1
            else:
                for pos, entry in enumerate(item):
                    if entry == v:
                        key = (name, pos)
                        counts[key] = counts.get(key, 0) + 1
    return tuple(sorted(counts.items()))


def _tuple_names(S: Structure) -> list[str]:
    return [name for name, items in S.relations if items and not isinstance(next(iter(items)), frozenset)]


def _consistent(A: Structure, S: Structure, mapping: dict, v: int) -> bool:
    """Match of face/relation status on assigned vertices through v, both ways."""
    others = [u for u in mapping if u != v]
    a_faces = A.faces
    s_faces = S.faces
    for r in range(len(others) + 1):
        for comb in combinations(others, r):
            Y = frozenset(comb) | {v}
            if (Y in a_faces) != (frozenset(mapping[x] for x in Y) in s_faces):
                return False
    names = set(_tuple_names(A)) | set(_tuple_names(S))
    if names:
        image = {mapping[x] for x in mapping}
        inverse = {b: a for a, b in mapping.items()}
        for name in sorted(names):
            for item in A.interp(name):
                if isinstance(item, frozenset):
                    continue
                if v in item and set(item) <= set(mapping):
                    if tuple(mapping[x] for x in item) not in S.interp(name):
                        return False
            for item in S.interp(name):
                if isinstance(item, frozenset):
                    continue
                if mapping[v] in item and set(item) <= image:
                    if tuple(inverse[y] for y in item) not in A.interp(name):
                        return False
    return True


def embeddings(A: Structure, S: Structure, pinned: Optional[dict] = None) -> Iterator[dict]:
    """All embeddings of A into S extending ``pinned``, as vertex maps."""
    order = [v for v in A.universe if not pinned or v not in pinned]
    # most-constrained first: vertices in many relations fail fast
    order.sort(key=lambda v: vertex_profile(A, v), reverse=True)

    same_size = len(A.universe) == len(S.universe)
    profiles_S = {w: vertex_profile(S, w) for w in S.universe} if same_size else {}

    mapping = dict(pinned or {})
    if pinned:
        if len(set(pinned.values())) != len(pinned):
            return
        for v in pinned:
            if not _consistent(A, S, mapping, v):
                return
    used = set(mapping.values())

    def extend(idx) -> Iterator[dict]:
        if idx == len(order):
            yield dict(mapping)
            return
        v = order[idx]
        need = vertex_profile(A, v) if same_size else None
        for w in S.universe:
            if w in used:
                continue
            if same_size and profiles_S[w] != need:
                continue
            mapping[v] = w
            used.add(w)
            if _consistent(A, S, mapping, v):
                yield from extend(idx + 1)
            del mapping[v]
            used.discard(w)

    yield from extend(0)


def isomorphisms(A: Structure, B: Structure) -> Iterator[dict]:
    if len(A.universe) != len(B.universe):
        return
    if sorted(len(items) for _, items in A.relations) != sorted(len(items) for _, items in B.relations):
        return
    yield from embeddings(A, B)


def find_isomorphism(A: Structure, B: Structure) -> Optional[dict]:
    for iso in isomorphisms(A, B):
        return iso
    return None


def automorphisms(S: Structure) -> Iterator[dict]:
    yield from embeddings(S, S)


def canonical_pointed_key(B: Structure, point: int) -> tuple:
    """A canonical form of (B, point) under relabelings fixing the point.

    Brute force over permutations; meant for the small structures that occur
    when deduplicating one-point extensions up to isomorphism.
    """
    others = [v for v in B.universe if v != point]
    best = None
    for p in permutations(range(len(others))):
        relab = {v: p[i] for i, v in enumerate(others)}
        relab[point] = len(others)
        key = []
        for name, items in B.relations:
            mapped = sorted(
                tuple(sorted(relab[x] for x in item)) if isinstance(item, frozenset)
                else tuple(relab[x] for x in item)
                for item in items
            )
            key.append((name, tuple(mapped)))
        key = tuple(sorted(key))
        if best is None or key < best:
            best = key
    return (len(B.universe), best)
