"""Isomorphism, automorphism groups, rigidity, and group actions on the oracle.

The action machinery realises finite group actions inside the lazy limit: an
action on finitely many decided vertices extends over a fresh free orbit, and
a free action of a subgroup induces up to the whole group.  Both work by
completing a candidate pattern equivariantly (pulling relation values from the
earliest decided orbit member, arity by arity) and then realising the pattern
through witness search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Optional, Sequence

from .core import LocalClassSpec, Structure, empty_structure, face_symbol, validate
from .errors import InvalidAction, NotFree
from .logic import ExperimentResult, ExperimentRow, wilson_interval
from .sampler import DEFAULT_WITNESS_CAP, LazyLimit, Seed, realise_pattern, sample_finite
from .search import automorphisms, find_isomorphism


# ---------------------------------------------------------------------------
# Isomorphism and automorphisms
# ---------------------------------------------------------------------------

def isomorphic(A: Structure, B: Structure) -> Optional[dict]:
    """A relation-preserving-and-reflecting bijection, or None."""
    return find_isomorphism(A, B)


def _perm_tuple(mapping: dict, universe: tuple) -> tuple:
    return tuple(mapping[v] for v in universe)


def _compose(p: tuple, q: tuple, index: dict, universe: tuple) -> tuple:
    return tuple(p[index[q[i]]] for i in range(len(universe)))


def _closure(gens: list[tuple], identity: tuple, index: dict, universe: tuple) -> set:
    known = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = _compose(g, a, index, universe)
                if c not in known:
                    known.add(c)
                    nxt.append(c)
        frontier = nxt
    return known


def automorphism_group(S: Structure) -> tuple[int, list[tuple]]:
    """Order of the automorphism group and a generating set of vertex bijections.

    Generators are permutation arrays over the sorted universe.  Exhaustive,
    meant for small structures.
    """
    universe = S.universe
    index = {v: i for i, v in enumerate(universe)}
    identity = tuple(universe)
    found = sorted(_perm_tuple(m, universe) for m in automorphisms(S))
    generators: list[tuple] = []
    generated = {identity}
    for perm in found:
        if perm not in generated:
            generators.append(perm)
            generated = _closure(generators, identity, index, universe)
    return len(found), generators


# ---------------------------------------------------------------------------
# Rigidity
# ---------------------------------------------------------------------------

def _initial_colors(S: Structure) -> list:
    idx = {v: i for i, v in enumerate(S.universe)}
    counts = [dict() for _ in S.universe]
    for f in S.faces:
        for v in f:
            d = counts[idx[v]]
            d[len(f)] = d.get(len(f), 0) + 1
    return [tuple(sorted(c.items())) for c in counts]


def _refine(colors: list, adj: list) -> list:
    n = len(colors)
    for _ in range(n):
        keys = [(colors[i], tuple(sorted(colors[j] for j in adj[i]))) for i in range(n)]
        palette = {k: c for c, k in enumerate(sorted(set(keys)))}
        new = [palette[k] for k in keys]
        if new == colors:
            break
        colors = new
    return colors


def is_rigid(S: Structure) -> bool:
    """Trivial automorphism group?  Colour refinement on the 2-frame first;
    the full search runs only when the refined graph still has symmetry."""
    n = len(S.universe)
    if n <= 1:
        return True
    idx = {v: i for i, v in enumerate(S.universe)}
    adj = [set() for _ in range(n)]
    for f in S.faces_by_size.get(2, ()):
        a, b = (idx[v] for v in sorted(f))
        adj[a].add(b)
        adj[b].add(a)
    colors = _refine(_initial_colors(S), adj)
    if len(set(colors)) == n:
        return True
    return _nontrivial_automorphism(S, adj, colors) is None


def _nontrivial_automorphism(S: Structure, adj: list, colors: list) -> Optional[dict]:
    """A non-identity automorphism of the full structure, or None.

    Backtracks over graph automorphisms compatible with the refined colours
    and filters by preservation of every face.
    """
    n = len(S.universe)
    verts = list(range(n))
    order = sorted(verts, key=lambda i: (colors[i], i))
    mapping: dict[int, int] = {}
    used = set()
    uni = S.universe
    idx = {v: i for i, v in enumerate(uni)}

    def preserves_faces(perm_idx: dict) -> bool:
        for f in S.faces:
            if frozenset(uni[perm_idx[idx[v]]] for v in f) not in S.faces:
                return False
        return True

    results = []

    def extend(k):
        if results:
            return
        if k == n:
            if any(mapping[i] != i for i in verts):
                perm = dict(mapping)
                if preserves_faces(perm):
                    results.append(perm)
            return
        v = order[k]
        for w in verts:
            if w in used or colors[w] != colors[v]:
                continue
            if any((u in adj[v]) != (mapping[u] in adj[w]) for u in mapping):
                continue
            mapping[v] = w
            used.add(w)
            extend(k + 1)
            del mapping[v]
            used.discard(w)
            if results:
                return

    extend(0)
    if not results:
        return None
    uni = S.universe
    return {uni[a]: uni[b] for a, b in results[0].items()}


def rigidity_experiment(Ns: Iterable[int], trials: int, seed: Seed,
                        spec: Optional[LocalClassSpec] = None) -> ExperimentResult:
    """Fraction of samples with trivial automorphism group, per vertex count."""
    from .core import simplicial_class

    if trials < 100:
        raise ValueError("use at least 100 trials")
    spec = spec or simplicial_class()
    rows = []
    for n in Ns:
        hits = 0
        for t in range(trials):
            S = sample_finite(n, spec, seed.child("rigidity", n, "trial", t))
            hits += is_rigid(S)
        lo, hi = wilson_interval(hits, trials)
        rows.append(ExperimentRow(n, trials, hits, hits / trials, lo, hi))
    return ExperimentResult(tuple(rows), limit=1, label="trivial automorphism group")


# ---------------------------------------------------------------------------
# Finite groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteGroup:
    """A finite group as a multiplication table with identity 0."""

    table: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        n = len(self.table)
        for row in self.table:
            if len(row) != n or sorted(row) != list(range(n)):
                raise ValueError("multiplication table rows must be permutations")
        for j in range(n):
            if sorted(self.table[i][j] for i in range(n)) != list(range(n)):
                raise ValueError("multiplication table columns must be permutations")
        if any(self.table[0][j] != j for j in range(n)) or any(self.table[i][0] != i for i in range(n)):
            raise ValueError("index 0 must be the identity")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise ValueError("multiplication table is not associative")
        for a in range(n):
            if not any(self.table[a][b] == 0 for b in range(n)):
                raise ValueError("missing inverse")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return next(b for b in range(self.order) if self.table[a][b] == 0)


def trivial_group() -> FiniteGroup:
    return FiniteGroup(((0,),), name="1")


def cyclic_group(n: int) -> FiniteGroup:
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return FiniteGroup(table, name=f"Z{n}", labels=tuple(range(n)))


def symmetric_group(n: int) -> FiniteGroup:
    elems = [tuple(range(n))] + sorted(p for p in permutations(range(n)) if p != tuple(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    table = tuple(
        tuple(index[tuple(p[q[i]] for i in range(n))] for q in elems)
        for p in elems
    )
    return FiniteGroup(table, name=f"S{n}", labels=tuple(elems))


@dataclass(frozen=True)
class GroupEmbedding:
    """An injective homomorphism, by image indices of the subgroup's elements."""

    sub: FiniteGroup
    group: FiniteGroup
    mapping: tuple[int, ...]

    def __post_init__(self):
        m = self.mapping
        if len(m) != self.sub.order or len(set(m)) != len(m):
            raise ValueError("embedding must list a distinct image per element")
        if m[0] != 0:
            raise ValueError("embedding must send identity to identity")
        for a in range(self.sub.order):
            for b in range(self.sub.order):
                if self.group.mul(m[a], m[b]) != m[self.sub.mul(a, b)]:
                    raise ValueError("embedding is not a homomorphism")


def cyclic_embedding(a: int, b: int) -> GroupEmbedding:
    if b % a:
        raise ValueError(f"Z{a} does not embed in Z{b} canonically")
    step = b // a
    return GroupEmbedding(cyclic_group(a), cyclic_group(b), tuple((i * step) % b for i in range(a)))


def symmetric_embedding(a: int, b: int) -> GroupEmbedding:
    if a > b:
        raise ValueError("the smaller symmetric group embeds in the larger")
    sub, grp = symmetric_group(a), symmetric_group(b)
    big_index = {p: i for i, p in enumerate(grp.labels)}
    mapping = tuple(big_index[tuple(p) + tuple(range(a, b))] for p in sub.labels)
    return GroupEmbedding(sub, grp, mapping)


def trivial_embedding(group: FiniteGroup) -> GroupEmbedding:
    return GroupEmbedding(trivial_group(), group, (0,))


# ---------------------------------------------------------------------------
# Partial actions
# ---------------------------------------------------------------------------

@dataclass
class PartialAction:
    """A left action of a finite group on finitely many oracle vertices."""

    group: FiniteGroup
    domain: tuple[int, ...]
    mapping: dict  # (element index, vertex) -> vertex

    def apply(self, g: int, v: int) -> int:
        return self.mapping[(g, v)]

    def axiom_failures(self) -> list[str]:
        out = []
        dom = set(self.domain)
        for g in range(self.group.order):
            image = set()
            for v in self.domain:
                w = self.mapping.get((g, v))
                if w is None or w not in dom:
                    out.append(f"element {g} does not map {v} inside the domain")
                    continue
                image.add(w)
            if image != dom and len(out) == 0:
                out.append(f"element {g} is not a bijection of the domain")
        for v in self.domain:
            if self.mapping.get((0, v)) != v:
                out.append(f"identity moves {v}")
        for g in range(self.group.order):
            for h in range(self.group.order):
                for v in self.domain:
                    lhs = self.mapping.get((g, self.mapping.get((h, v))))
                    rhs = self.mapping.get((self.group.mul(g, h), v))
                    if lhs != rhs:
                        out.append(f"composition fails at ({g},{h},{v})")
                        return out
        return out

    def respects(self, S: Structure) -> bool:
        """Every element preserves and reflects the faces of S."""
        for g in range(self.group.order):
            for f in S.faces:
                if frozenset(self.apply(g, v) for v in f) not in S.faces:
                    return False
        return True

    def orbits(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for v in self.domain:
            if v in seen:
                continue
            orb = sorted({self.apply(g, v) for g in range(self.group.order)})
            seen.update(orb)
            out.append(tuple(orb))
        return out

    def stabilizer(self, v: int) -> list[int]:
        return [g for g in range(self.group.order) if self.apply(g, v) == v]

    def is_free(self, region: Optional[Iterable[int]] = None) -> bool:
        region = self.domain if region is None else region
        return all(self.stabilizer(v) == [0] for v in region)


def empty_action(group: FiniteGroup) -> PartialAction:
    return PartialAction(group, (), {})


def swap_pair_action(group: FiniteGroup, generator: int, pair: tuple[int, int]) -> PartialAction:
    """The action where a chosen generator transposes two vertices.

    Valid whenever powers of the generator act consistently (even order), as
    in the order-4 construction acting on a pair through the transposition.
    """
    a, b = pair
    mapping = {}
    for g in range(group.order):
        # g acts by the parity of its discrete log base the generator
        power, cur = 0, 0
        while cur != g:
            cur = group.mul(generator, cur)
            power += 1
            if power > group.order:
                raise InvalidAction("generator does not generate the group")
        parity = power % 2
        mapping[(g, a)] = b if parity else a
        mapping[(g, b)] = a if parity else b
    act = PartialAction(group, tuple(sorted(pair)), mapping)
    failures = act.axiom_failures()
    if failures:
        raise InvalidAction("; ".join(failures))
    return act


# ---------------------------------------------------------------------------
# Equivariant completion and realisation
# ---------------------------------------------------------------------------

def _equivariant_pattern(old: Structure, new_points: Sequence[int], translate,
                         group_order: int, spec: LocalClassSpec) -> Structure:
    """Complete old + new points so the translates respect every face.

    Faces touching new points are processed by increasing size and, within a
    size, lexicographically; each takes its value from the earliest group
    translate that lands in decided territory, and stays absent otherwise.
    """
    universe = sorted(set(old.universe) | set(new_points))
    newset = set(new_points)
    faces = set(old.faces)
    processed: set[frozenset] = set()
    for m in range(spec.min_face_size, len(universe) + 1):
        for comb in combinations(universe, m):
            X = frozenset(comb)
            if not (X & newset):
                continue
            value = False
            for g in range(1, group_order):
                images = [translate(g, x) for x in comb]
                if any(i is None for i in images):
                    continue
                gX = frozenset(images)
                if len(gX) != m:
                    raise InvalidAction(f"translate by {g} is not injective on {sorted(X)}")
                if gX == X:
                    continue
                if not (gX & newset) or gX in processed:
                    value = gX in faces
                    break
            if value:
                faces.add(X)
            processed.add(X)
    interp: dict[str, set] = {}
    for f in faces:
        if len(f) >= spec.min_face_size:
            interp.setdefault(face_symbol(len(f)), set()).add(f)
    pattern = Structure.make(universe, interp)
    bad = validate(pattern, spec)
    if bad:
        raise InvalidAction(f"equivariant completion left the class: {bad[:3]}")
    return pattern


def validate_action(L: LazyLimit, act: PartialAction) -> None:
    failures = act.axiom_failures()
    if failures:
        raise InvalidAction("; ".join(failures))
    if act.domain and not act.respects(L.restriction(act.domain)):
        raise InvalidAction("action does not respect the decided faces on its domain")


def extend_action(L: LazyLimit, act: PartialAction, v: int,
                  cap: int = DEFAULT_WITNESS_CAP) -> PartialAction:
    """Extend an action over a fresh free orbit through the given vertex.

    Returns an action of the same group on domain + orbit, restricting to the
    input and with trivial stabilizers off the old domain.  Element 0 of the
    orbit is ``v`` itself; the others are found by equivariant completion and
    witness search.
    """
    validate_action(L, act)
    if v in act.domain:
        raise InvalidAction(f"vertex {v} is already in the domain")
    group = act.group
    chosen = {0: v}

    for i in range(1, group.order):
        old_vertices = sorted(set(act.domain) | set(chosen.values()))
        nu = max(old_vertices) + 1
        old_struct = L.restriction(old_vertices)
        vertex_to_index = {vert: j for j, vert in chosen.items()}

        def translate(g, x, _i=i, _nu=nu, _v2i=vertex_to_index):
            if x == _nu:
                k = group.mul(g, _i)
            elif x in _v2i:
                k = group.mul(g, _v2i[x])
            else:
                return act.apply(g, x)
            if k == _i:
                return _nu
            return chosen.get(k)

        pattern = _equivariant_pattern(old_struct, [nu], translate, group.order, L.spec)
        emb = realise_pattern(L, pattern, old_vertices, cap)
        chosen[i] = emb[nu]

    mapping = {}
    domain = tuple(sorted(set(act.domain) | set(chosen.values())))
    for g in range(group.order):
        for s in act.domain:
            mapping[(g, s)] = act.apply(g, s)
        for j, vert in chosen.items():
            mapping[(g, vert)] = chosen[group.mul(g, j)]
    return PartialAction(group, domain, mapping)


def induce_action(G: FiniteGroup, embedding: GroupEmbedding, act: PartialAction,
                  L: LazyLimit, cap: int = DEFAULT_WITNESS_CAP) -> PartialAction:
    """Induce a free action of the whole group from a free subgroup action.

    Identifies the domain with (subgroup x orbits), builds the translation
    pattern on (group x orbits), realises the new points by witness search,
    and returns the free action extending the input through the embedding.
    """
    if embedding.sub != act.group:
        raise InvalidAction("the embedding's subgroup must be the acting group")
    if embedding.group != G:
        raise InvalidAction("the embedding's big group must be the requested group")
    validate_action(L, act)
    if not act.is_free():
        raise NotFree("the subgroup action must have trivial stabilizers")

    orbits = act.orbits()
    reps = [min(o) for o in orbits]
    h_image = {embedding.mapping[h]: h for h in range(embedding.sub.order)}

    # concrete ids: old points keep their vertex ids, new points get fresh ones
    point_id: dict[tuple[int, int], int] = {}
    next_id = (max(act.domain) + 1) if act.domain else 0
    for g in range(G.order):
        for t, r in enumerate(reps):
            if g in h_image:
                point_id[(g, t)] = act.apply(h_image[g], r)
            else:
                point_id[(g, t)] = next_id
                next_id += 1
    id_point = {pid: gt for gt, pid in point_id.items()}
    new_ids = sorted(pid for (g, t), pid in point_id.items() if g not in h_image)

    def translate(g, x):
        gg, t = id_point[x]
        return point_id[(G.mul(g, gg), t)]

    old_struct = L.restriction(act.domain) if act.domain else empty_structure()
    pattern = _equivariant_pattern(old_struct, new_ids, translate, G.order, L.spec)
    emb = realise_pattern(L, pattern, sorted(act.domain), cap)

    mapping = {}
    for g in range(G.order):
        for (gg, t), pid in point_id.items():
            mapping[(g, emb[pid])] = emb[point_id[(G.mul(g, gg), t)]]
    domain = tuple(sorted(emb[pid] for pid in point_id.values()))
    return PartialAction(G, domain, mapping)


def direct_limit_action(chain: Sequence[GroupEmbedding], steps: int, L: LazyLimit,
                        cap: int = DEFAULT_WITNESS_CAP) -> list[PartialAction]:
    """Finite stages of a direct limit of free actions.

    ``chain[i]`` embeds the i-th group into the (i+1)-th, with the 0-th group
    the trivial one.  Each step absorbs the least unused oracle vertex, extends
    the current action over it, then induces up the next group.
    """
    if steps > len(chain):
        raise ValueError("steps must not exceed the chain length")
    for i in range(1, len(chain)):
        if chain[i].sub != chain[i - 1].group:
            raise ValueError(f"chain link {i} does not compose")
    if chain and chain[0].sub.order != 1:
        raise ValueError("the chain starts at the trivial group")

    current = PartialAction(trivial_group(), (0,), {(0, 0): 0})
    stages = []
    for n in range(steps):
        v = 0
        while v in current.domain:
            v += 1
        mid = extend_action(L, current, v, cap=cap)
        current = induce_action(chain[n].group, chain[n], mid, L, cap=cap)
        stages.append(current)
    return stages


# ---------------------------------------------------------------------------
# Audits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ActionAudit:
    axioms_ok: bool
    respects_ok: bool
    restriction_ok: bool
    free_off_base_ok: bool
    free_ok: bool
    memo_equivariant_ok: bool
    failures: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return (self.axioms_ok and self.respects_ok and self.restriction_ok
                and self.free_off_base_ok and self.memo_equivariant_ok)


def audit_action(L: LazyLimit, act: PartialAction,
                 base: Optional[PartialAction] = None,
                 base_embedding: Optional[GroupEmbedding] = None) -> ActionAudit:
    """Check the action axioms, restriction to the base, freeness and
    face-equivariance over every decided face inside the domain."""
    failures = []
    axioms_ok = not act.axiom_failures()
    if not axioms_ok:
        failures.append("action axioms fail")
    respects_ok = act.respects(L.restriction(act.domain)) if act.domain else True
    if not respects_ok:
        failures.append("action does not respect decided faces")

    restriction_ok = True
    if base is not None:
        for h in range(base.group.order):
            g = base_embedding.mapping[h] if base_embedding is not None else h
            for s in base.domain:
                if act.mapping.get((g, s)) != base.apply(h, s):
                    restriction_ok = False
                    failures.append(f"restriction differs at ({h},{s})")
                    break
            if not restriction_ok:
                break

    off = set(act.domain) - (set(base.domain) if base is not None else set())
    free_off = act.is_free(off)
    if not free_off:
        failures.append("nontrivial stabilizer off the base domain")
    free_all = act.is_free()

    dom = set(act.domain)
    memo_ok = True
    for f, val in list(L.memo.items()):
        if not f <= dom:
            continue
        for g in range(1, act.group.order):
            gf = frozenset(act.apply(g, x) for x in f)
            if L.is_face(gf) != val:
                memo_ok = False
                failures.append(f"face {sorted(f)} and translate {sorted(gf)} disagree")
                break
        if not memo_ok:
            break

    return ActionAudit(axioms_ok, respects_ok, restriction_ok, free_off, free_all,
                       memo_ok, tuple(failures))
