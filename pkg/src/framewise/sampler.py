"""Seed-deterministic sampling and the lazy memoised limit oracle.

Every random decision is a pure function of (root seed, derivation path,
decision key), computed with a keyed hash.  Queries therefore commute: the
answer for a face does not depend on what was asked before, and replaying a
seed replays the sample bit for bit.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .core import (
    SIMPLICIAL,
    LocalClassSpec,
    Structure,
    empty_structure,
    face_symbol,
    k_frame,
)
from .errors import SizeLimit, WitnessNotFound
from .measure import subset_assignments

DEFAULT_WITNESS_CAP = 10000

# non-simplicial kinds lack subset-closure pruning, so their candidate
# enumeration walks all subsets; keep that to workable universes
DENSE_KIND_CAP = 16


def _encode(parts) -> bytes:
    out = bytearray()
    for p in parts:
        if isinstance(p, bool):
            out += b"b1" if p else b"b0"
        elif isinstance(p, int):
            out += b"i" + p.to_bytes(8, "little", signed=True)
        elif isinstance(p, str):
            raw = p.encode("utf-8")
            out += b"s" + len(raw).to_bytes(2, "little") + raw
        elif isinstance(p, (tuple, list)):
            out += b"t" + len(p).to_bytes(2, "little") + _encode(p)
        elif isinstance(p, frozenset):
            items = sorted(p)
            out += b"t" + len(items).to_bytes(2, "little") + _encode(items)
        else:
            raise TypeError(f"cannot encode {p!r} into a decision key")
    return bytes(out)


@dataclass(frozen=True)
class Seed:
    """A root value plus a derivation path of labels.

    The decision for a given key is a pure function of (root, path, key), so
    samples are replayable and query-order independent.
    """

    root: int
    path: tuple = ()

    def __post_init__(self):
        key = (self.root & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
        h = hashlib.blake2b(key=key, digest_size=8)
        h.update(_encode(self.path))
        object.__setattr__(self, "_prefix", h)

    def child(self, *labels) -> "Seed":
        return Seed(self.root, self.path + tuple(labels))

    def _digest(self, key_parts) -> bytes:
        h = self._prefix.copy()
        h.update(_encode(key_parts))
        return h.digest()

    def bit(self, *key_parts) -> bool:
        return bool(self._digest(key_parts)[0] & 1)

    def randrange(self, n: int, *key_parts) -> int:
        """Uniform integer in range(n), exact via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        if n == 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % n)
        counter = 0
        while True:
            raw = int.from_bytes(self._digest(key_parts + ("#", counter)), "little")
            if raw < limit:
                return raw % n
            counter += 1


def _face_key(face) -> tuple:
    return ("face", tuple(sorted(face)))


@dataclass
class SampleConfig:
    n: int
    trials: int
    seed: Seed
    witness_cap: int = DEFAULT_WITNESS_CAP

    def __post_init__(self):
        if self.n < 0 or self.trials < 1:
            raise ValueError("need n >= 0 and trials >= 1")


# ---------------------------------------------------------------------------
# Finite samples
# ---------------------------------------------------------------------------

def _sample_faces_simplicial(n: int, seed: Seed) -> set:
    bit = seed.bit
    faces: set[frozenset] = set()
    nbrs: list[set] = [set() for _ in range(n)]
    prev = []
    for a in range(n):
        for b in range(a + 1, n):
            if bit("face", (a, b)):
                faces.add(frozenset((a, b)))
                nbrs[a].add(b)
                nbrs[b].add(a)
                prev.append((a, b))
    size = 2
    while prev:
        size += 1
        nxt = []
        for tup in prev:
            # a new face must extend by a common neighbour above the maximum,
            # so each candidate is generated exactly once
            common = nbrs[tup[0]]
            for x in tup[1:]:
                common = common & nbrs[x]
                if not common:
                    break
            top = tup[-1]
            for v in common:
                if v <= top:
                    continue
                cand = tup + (v,)
                if size == 3 or all(frozenset(cand[:i] + cand[i + 1:]) in faces for i in range(size - 1)):
                    if bit("face", cand):
                        faces.add(frozenset(cand))
                        nxt.append(cand)
        prev = nxt
    return faces


def sample_finite(n: int, spec: LocalClassSpec, seed: Seed) -> Structure:
    """One draw from the frame-wise uniform measure on members over {0..n-1}.

    Levels are decided bottom-up; each admissible next-level item on a subset
    is chosen uniformly, independently across subsets.
    """
    if spec.kind == SIMPLICIAL:
        faces = _sample_faces_simplicial(n, seed)
        interp: dict[str, set] = {}
        for f in faces:
            interp.setdefault(face_symbol(len(f)), set()).add(f)
        return Structure.make(range(n), interp)

    if spec.is_set_family and n > DENSE_KIND_CAP:
        raise SizeLimit(f"{spec.kind} sampling enumerates all subsets; n <= {DENSE_KIND_CAP}")

    current = empty_structure(range(n))
    start = spec.min_face_size if spec.is_set_family else 1
    for level in range(start, n + 1):
        if not spec.signature.symbols_of_arity(level):
            continue
        interp = {name: set(items) for name, items in current.relations}
        for X in combinations(range(n), level):
            if spec.is_set_family:
                # same coin key as the lazy oracle, so a finite sample is the
                # oracle's restriction under the same seed
                if spec.admissible_face(frozenset(X), current.faces.__contains__) and seed.bit(*_face_key(X)):
                    interp.setdefault(face_symbol(level), set()).add(frozenset(X))
            else:
                options = subset_assignments(spec, X, current)
                pick = options[seed.randrange(len(options), "assign", level, X)]
                for name, items in pick.items():
                    interp.setdefault(name, set()).update(items)
        current = Structure.make(range(n), interp)
    return current


# ---------------------------------------------------------------------------
# The lazy limit oracle
# ---------------------------------------------------------------------------

class LazyLimit:
    """A memoised coin-flip oracle over an unbounded vertex set.

    Finite restrictions are exact draws from the finite measures; with
    probability one the whole object realises the generic countable member of
    the class.  Asking about a face first decides its prerequisites, flips a
    fair coin only if the face is admissible, and memoises everything.
    """

    def __init__(self, spec: LocalClassSpec, seed: Seed):
        if not spec.is_set_family:
            raise ValueError("the lazy oracle supports the set-family class kinds")
        self.spec = spec
        self.seed = seed
        self.memo: dict[frozenset, bool] = {}

    def is_face(self, face: Iterable[int]) -> bool:
        f = frozenset(face)
        if len(f) < self.spec.min_face_size:
            raise ValueError(f"faces of the {self.spec.kind} class have size >= {self.spec.min_face_size}")
        if any(v < 0 for v in f):
            raise ValueError("oracle vertices are nonnegative integers")
        got = self.memo.get(f)
        if got is not None:
            return got
        for g in self.spec.face_prerequisites(f):
            self.is_face(g)
        if self.spec.admissible_face(f, lambda g: self.memo.get(g, False)):
            value = self.seed.bit(*_face_key(f))
        else:
            value = False
        self.memo[f] = value
        return value

    def decided(self) -> Mapping[frozenset, bool]:
        return dict(self.memo)

    def restriction(self, vertices: Iterable[int]) -> Structure:
        """The induced structure on finitely many vertices, deciding as needed."""
        verts = sorted(set(vertices))
        if self.spec.kind != SIMPLICIAL and len(verts) > DENSE_KIND_CAP:
            raise SizeLimit(f"materialising a {self.spec.kind} restriction needs <= {DENSE_KIND_CAP} vertices")
        faces: set[frozenset] = set()
        if self.spec.kind == SIMPLICIAL:
            prev = [frozenset(p) for p in combinations(verts, 2) if self.is_face(p)]
            faces.update(prev)
            size = 2
            while prev:
                size += 1
                cands = {f | {v} for f in prev for v in verts if v not in f}
                nxt = []
                for c in cands:
                    if all(c - {v} in faces for v in c) and self.is_face(c):
                        faces.add(c)
                        nxt.append(c)
                prev = nxt
        else:
            for m in range(self.spec.min_face_size, len(verts) + 1):
                for c in combinations(verts, m):
                    if self.is_face(c):
                        faces.add(frozenset(c))
        interp: dict[str, set] = {}
        for f in faces:
            interp.setdefault(face_symbol(len(f)), set()).add(f)
        return Structure.make(verts, interp)


def oracle_is_face(L: LazyLimit, face: Iterable[int]) -> bool:
    return L.is_face(face)


# ---------------------------------------------------------------------------
# Witness search
# ---------------------------------------------------------------------------

def check_one_point_extension(B: Structure) -> int:
    """Validate the one-point-extension shape and return the new vertex (max)."""
    if not B.universe:
        raise ValueError("the extension must have at least one vertex")
    return B.universe[-1]


def extension_probability(B: Structure, spec: LocalClassSpec) -> Fraction:
    """Per-candidate probability that a fresh vertex realises the extension.

    Equals the ratio of the singleton-type measures of the extension and its
    base: only the decisions on subsets through the new vertex remain.
    """
    new = check_one_point_extension(B)
    if spec.is_set_family:
        coins = 0
        base = frozenset(B.universe) - {new}
        for m in range(spec.min_face_size, len(B.universe) + 1):
            for g in combinations(sorted(base), m - 1):
                X = frozenset(g) | {new}
                if spec.admissible_face(X, B.faces.__contains__):
                    coins += 1
        return Fraction(1, 2 ** coins)
    p = Fraction(1)
    base = frozenset(B.universe) - {new}
    for m in range(1, len(B.universe) + 1):
        if not spec.signature.symbols_of_arity(m):
            continue
        lower = k_frame(B, m - 1)
        for g in combinations(sorted(base), m - 1):
            X = tuple(sorted(frozenset(g) | {new}))
            p /= len(subset_assignments(spec, X, lower))
    return p


def _matches_simplicial(L: LazyLimit, emb: dict, B: Structure, new: int) -> bool:
    others = [v for v in B.universe if v != new]
    w = emb[new]
    for a in others:
        expect = frozenset((a, new)) in B.faces
        if L.is_face((emb[a], w)) != expect:
            return False
    # after level m-1 matches, admissibility coincides on both sides, so only
    # faces that are admissible in the pattern need a query
    prev = [f for f in B.faces_by_size.get(2, ()) if new in f]
    size = 2
    while prev:
        size += 1
        cands = set()
        for f in prev:
            for u in others:
                if u in f:
                    continue
                X = f | {u}
                if all(X - {v} in B.faces for v in X):
                    cands.add(X)
        prev = []
        for X in cands:
            expect = X in B.faces
            if L.is_face(frozenset(emb[v] for v in X)) != expect:
                return False
            if expect:
                prev.append(X)
    return True


def _matches_dense(L: LazyLimit, emb: dict, B: Structure, new: int) -> bool:
    others = sorted(v for v in B.universe if v != new)
    if len(B.universe) > DENSE_KIND_CAP:
        raise SizeLimit(f"witness patterns for {L.spec.kind} need <= {DENSE_KIND_CAP} vertices")
    for m in range(L.spec.min_face_size, len(B.universe) + 1):
        for g in combinations(others, m - 1):
            X = frozenset(g) | {new}
            expect = X in B.faces
            if L.is_face(frozenset(emb[v] for v in X)) != expect:
                return False
    return True


def find_witness(L: LazyLimit, embedding: Mapping[int, int], B: Structure,
                 cap: int = DEFAULT_WITNESS_CAP) -> int:
    """A fresh oracle vertex completing the embedded base to a copy of B.

    ``embedding`` maps the base (B minus its maximal vertex) into oracle
    vertices, which must already realise the base's relations.  Candidates are
    tried in increasing order; on exhausting ``cap`` candidates the failure is
    reported together with its probability bound.
    """
    new = check_one_point_extension(B)
    base_vertices = [v for v in B.universe if v != new]
    if sorted(embedding) != sorted(base_vertices):
        raise ValueError("embedding must cover exactly the base vertices")
    image = set(embedding.values())
    if len(image) != len(base_vertices):
        raise ValueError("embedding must be injective")

    matcher = _matches_simplicial if L.spec.kind == SIMPLICIAL else _matches_dense
    emb = dict(embedding)
    tried = 0
    w = 0
    while tried < cap:
        if w not in image:
            emb[new] = w
            if matcher(L, emb, B, new):
                return w
            tried += 1
        w += 1
    p = extension_probability(B, L.spec)
    bound = float((1 - p) ** cap)
    raise WitnessNotFound(cap, p, bound)


def realise_pattern(L: LazyLimit, pattern: Structure, old_vertices,
                    cap: int = DEFAULT_WITNESS_CAP) -> dict:
    """Embed a pattern into the oracle, the old part by identity, new points
    one witness at a time in increasing id order.

    New pattern ids must exceed the old vertex ids so each one-point step has
    its fresh vertex as the maximal index.
    """
    from .core import induced_substructure

    old = sorted(old_vertices)
    emb = {v: v for v in old}
    done = list(old)
    for p in sorted(set(pattern.universe) - set(old)):
        target = induced_substructure(pattern, done + [p])
        w = find_witness(L, dict(emb), target, cap=cap)
        emb[p] = w
        done.append(p)
    return emb
