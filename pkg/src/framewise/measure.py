"""Exact rational computation of the frame-wise uniform measure.

The measure of a base set is built level by level: each step divides by the
number of admissible next-level frames over the fixed lower frame.  All
arithmetic in this module is exact (``fractions.Fraction``); no floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Iterator, Optional

from .core import (
    LocalClassSpec,
    Structure,
    empty_structure,
    face_symbol,
    induced_substructure,
    k_frame,
    require_member,
    validate,
)
from .errors import SizeLimit

ENUMERATION_CAP = 7


@dataclass(frozen=True)
class BaseSet:
    """The open set of structures whose level-k frame restricts to the anchor.

    ``ambient`` is the size of the ambient vertex set; ``None`` means the
    countable ambient.  The measure does not depend on it.
    """

    anchor: Structure
    level: int
    ambient: Optional[int] = None

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if self.ambient is not None and self.anchor.universe and max(self.anchor.universe) >= self.ambient:
            raise ValueError("anchor universe does not fit the ambient")


@dataclass(frozen=True)
class FrameExtensionFamily:
    """All level-l frames on an ambient set agreeing with an anchor's k-frame."""

    ambient_set: tuple[int, ...]
    level: int
    anchor: Structure
    anchor_level: int
    members: tuple[Structure, ...]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def keys(self) -> frozenset:
        return frozenset(self.members)


# ---------------------------------------------------------------------------
# Per-subset choice enumeration
# ---------------------------------------------------------------------------

def subset_assignments(spec: LocalClassSpec, X: Iterable[int], lower: Structure) -> list[dict]:
    """All admissible top-level assignments on the subset X over a fixed lower frame.

    X has size m; an assignment maps arity-m symbol names to the items on X
    that hold.  Admissibility is membership of the locally assembled structure
    in the class, which locality makes decidable on X alone.
    """
    X = tuple(sorted(X))
    m = len(X)
    if spec.is_set_family:
        faces = lower.faces
        if spec.admissible_face(frozenset(X), faces.__contains__):
            return [{}, {face_symbol(m): frozenset([frozenset(X)])}]
        return [{}]

    per_symbol = []
    for sym in spec.signature.symbols_of_arity(m):
        if sym.symmetric:
            per_symbol.append((sym.name, [frozenset(X)]))
        else:
            per_symbol.append((sym.name, [tuple(p) for p in permutations(X)]))
    total = sum(len(c) for _, c in per_symbol)
    if total > 16:
        raise SizeLimit(f"{total} candidate items on a {m}-subset is beyond the enumeration cap")
    local_base = induced_substructure(lower, X)
    assignments = []

    def build(idx, chosen):
        if idx == len(per_symbol):
            interp = {name: set(items) for name, items in local_base.relations}
            for name, items in chosen.items():
                if items:
                    interp.setdefault(name, set()).update(items)
            if not validate(Structure.make(X, interp), spec):
                assignments.append({n: i for n, i in chosen.items() if i})
            return
        name, cands = per_symbol[idx]
        for mask in range(1 << len(cands)):
            chosen[name] = frozenset(c for i, c in enumerate(cands) if mask >> i & 1)
            build(idx + 1, chosen)
        del chosen[name]

    build(0, {})
    return assignments


def _subset_choice_count(spec: LocalClassSpec, X: Iterable[int], lower: Structure) -> int:
    if spec.is_set_family:
        return 2 if spec.admissible_face(frozenset(X), lower.faces.__contains__) else 1
    return len(subset_assignments(spec, X, lower))


def count_frame_extensions(S: Structure, k: int, spec: LocalClassSpec, check: bool = True) -> int:
    """The number of distinct (k+1)-frames of class members over S's k-frame.

    Factorises over the (k+1)-subsets of the universe: choices on distinct
    subsets never interact in a local class.
    """
    if check:
        require_member(S, spec, "S")
    if k < 0:
        raise ValueError("k must be nonnegative")
    lower = k_frame(S, k)
    total = 1
    for X in combinations(S.universe, k + 1):
        total *= _subset_choice_count(spec, X, lower)
    return total


def mu_base(b: BaseSet, spec: LocalClassSpec, check: bool = True) -> Fraction:
    """Exact measure of a base set: one over the product of extension counts.

    Stabilises once the level passes the anchor size, since no larger subsets
    remain to decide.
    """
    if check:
        require_member(b.anchor, spec, "anchor")
    value = Fraction(1)
    for j in range(min(b.level, len(b.anchor.universe))):
        value /= count_frame_extensions(b.anchor, j, spec, check=False)
    return value


def singleton_measure(S: Structure, spec: LocalClassSpec, check: bool = True) -> Fraction:
    """Measure of {S} among structures on S's own universe."""
    return mu_base(BaseSet(S, len(S.universe)), spec, check=check)


def face_probability(face: Iterable[int], spec: LocalClassSpec) -> Fraction:
    """Probability that a given vertex set is a face of a sampled structure.

    Ambient-independent: summing singleton measures over the members on the
    face's own vertex set that contain it.
    """
    face = frozenset(face)
    if len(face) < spec.min_face_size:
        raise ValueError(f"faces have size >= {spec.min_face_size}")
    total = Fraction(0)
    for S in members_on(face, spec):
        if face in S.faces:
            total += singleton_measure(S, spec, check=False)
    return total


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _extend_by_level(partial: Structure, level: int, spec: LocalClassSpec,
                     forced: Optional[Structure] = None,
                     forced_within: frozenset = frozenset()) -> Iterator[Structure]:
    """All ways to choose the arity-``level`` items on top of ``partial``.

    Subsets inside ``forced_within`` copy the items of ``forced`` instead of
    being free choices.
    """
    subsets = list(combinations(partial.universe, level))
    choices = []
    for X in subsets:
        if forced is not None and set(X) <= forced_within:
            assignment = {}
            for name, elems in forced.relations:
                kept = frozenset(i for i in elems if len(i) == level and set(i) <= set(X))
                if kept:
                    assignment[name] = kept
            choices.append([assignment])
        else:
            choices.append(subset_assignments(spec, X, partial))

    base = {name: set(items) for name, items in partial.relations}

    def build(idx):
        if idx == len(subsets):
            yield Structure.make(partial.universe, base)
            return
        for assignment in choices[idx]:
            added = []
            for name, items in assignment.items():
                bucket = base.setdefault(name, set())
                for it in items:
                    bucket.add(it)
                    added.append((name, it))
            yield from build(idx + 1)
            for name, it in added:
                base[name].discard(it)

    yield from build(0)


def members_on(vertices: Iterable[int], spec: LocalClassSpec, cap: int = ENUMERATION_CAP,
               max_level: Optional[int] = None) -> Iterator[Structure]:
    """Every class member whose universe is exactly this vertex set."""
    vertices = tuple(sorted(set(vertices)))
    if len(vertices) > cap:
        raise SizeLimit(f"{len(vertices)} vertices exceeds the enumeration cap {cap}")
    top = len(vertices) if max_level is None else min(max_level, len(vertices))
    start = spec.min_face_size if spec.is_set_family else 1

    current: Iterable[Structure] = [empty_structure(vertices)]
    for level in range(start, top + 1):
        if not spec.signature.symbols_of_arity(level):
            continue
        current = [T for S in current for T in _extend_by_level(S, level, spec)]
    yield from current


def exact_distribution(n: int, spec: LocalClassSpec, cap: int = ENUMERATION_CAP) -> list[tuple[Structure, Fraction]]:
    """All members on {0..n-1} paired with the exact measure of their singleton."""
    if n > cap:
        raise SizeLimit(f"{n} vertices exceeds the enumeration cap {cap}")
    return [(S, singleton_measure(S, spec, check=False)) for S in members_on(range(n), spec, cap=cap)]


def enumerate_frame_extensions(X: Iterable[int], l: int, A: Structure, k: int,
                               spec: LocalClassSpec, cap: int = ENUMERATION_CAP) -> FrameExtensionFamily:
    """The family of l-frames on X of members whose k-frame restricts to A's."""
    X = tuple(sorted(set(X)))
    if len(X) > cap:
        raise SizeLimit(f"{len(X)} vertices exceeds the enumeration cap {cap}")
    avs = frozenset(A.universe)
    if not avs <= set(X):
        raise ValueError("the anchor universe must be contained in X")
    if not (k <= len(avs) and l <= len(X) and k <= l):
        raise ValueError(f"need k <= |A|, k <= l <= |X|; got k={k}, l={l}")
    anchor_frame = k_frame(A, k)
    start = spec.min_face_size if spec.is_set_family else 1

    current: Iterable[Structure] = [empty_structure(X)]
    for level in range(start, l + 1):
        if not spec.signature.symbols_of_arity(level):
            continue
        if level <= k:
            current = [T for S in current
                       for T in _extend_by_level(S, level, spec, forced=anchor_frame, forced_within=avs)]
        else:
            current = [T for S in current for T in _extend_by_level(S, level, spec)]
    return FrameExtensionFamily(X, l, A, k, tuple(current))
