"""Brute-force oracles the tests check the library against.

Everything here enumerates or evaluates directly from the class axioms,
independently of the library's own counting and validation paths.  Faces are
set-coded, so irreflexivity and symmetry hold by representation; the oracles
evaluate the remaining schemata (closure under subsets, the antichain
condition) literally.
"""

from fractions import Fraction
from itertools import combinations, permutations

from framewise.core import Structure, face_symbol, k_frame


def faces_to_structure(vertices, faces):
    interp = {}
    for f in faces:
        f = frozenset(f)
        interp.setdefault(face_symbol(len(f)), set()).add(f)
    return Structure.make(vertices, interp)


def brute_member(S, kind):
    """Literal evaluation of the class schemata on a set-coded structure."""
    faces = set(S.faces)
    if kind == "simplicial":
        for f in faces:
            if len(f) < 2:
                return False
            for v in f:
                if len(f) >= 3 and f - {v} not in faces:
                    return False
        return True
    if kind == "hypergraph":
        return all(len(f) >= 1 for f in faces)
    if kind == "sperner":
        for f in faces:
            for g in faces:
                if f < g:
                    return False
        return True
    raise ValueError(kind)


def all_candidate_faces(vertices, kind):
    low = 2 if kind == "simplicial" else 1
    verts = sorted(vertices)
    return [frozenset(c) for m in range(low, len(verts) + 1) for c in combinations(verts, m)]


def brute_structures(vertices, kind):
    """Every set-coded structure on the vertex set, member or not."""
    cands = all_candidate_faces(vertices, kind)
    for mask in range(1 << len(cands)):
        chosen = [cands[i] for i in range(len(cands)) if mask >> i & 1]
        yield faces_to_structure(vertices, chosen)


def brute_members(vertices, kind):
    for S in brute_structures(vertices, kind):
        if brute_member(S, kind):
            yield S


def brute_count_extensions(S, k, kind):
    """Count (k+1)-frames over the k-frame by global enumeration."""
    lower = k_frame(S, k)
    low_faces = set(lower.faces)
    cands = [frozenset(c) for c in combinations(S.universe, k + 1)]
    if k + 1 < (2 if kind == "simplicial" else 1):
        cands = []
    count = 0
    for mask in range(1 << len(cands)):
        chosen = [cands[i] for i in range(len(cands)) if mask >> i & 1]
        T = faces_to_structure(S.universe, set(chosen) | low_faces)
        if brute_member(T, kind):
            count += 1
    return count


def brute_singleton_measure(S, kind):
    """Replay the level-by-level construction, one admissibility check per subset."""
    n = len(S.universe)
    total = Fraction(1)
    low = 2 if kind == "simplicial" else 1
    for m in range(low, n + 1):
        lower_faces = {f for f in S.faces if len(f) < m}
        for X in combinations(S.universe, m):
            with_face = faces_to_structure(S.universe, lower_faces | {frozenset(X)})
            options = 1 + brute_member(with_face, kind)
            total /= options
    return total


def brute_holds_extension(S, ax, kind):
    """Literal reading of the extension sentence: for every ordered distinct
    tuple matching the base diagram there is a fresh vertex matching the
    extension diagram."""
    base, B, new = ax.base, ax.extension, ax.new_vertex
    bverts = list(base.universe)
    m = len(bverts)

    def diagram_matches(struct, assignment, vertices_required):
        # every subset of the assigned pattern vertices must agree on face status
        for r in range(1, len(vertices_required) + 1):
            for comb in combinations(vertices_required, r):
                want = frozenset(comb) in struct.faces
                got = frozenset(assignment[x] for x in comb) in S.faces
                if want != got:
                    return False
        return True

    for tup in permutations(S.universe, m):
        assignment = dict(zip(bverts, tup))
        if not diagram_matches(base, assignment, bverts):
            continue
        extended = False
        for w in S.universe:
            if w in tup:
                continue
            assignment[new] = w
            if diagram_matches(B, assignment, list(B.universe)):
                extended = True
            del assignment[new]
            if extended:
                break
        if not extended:
            return False
    return True


def brute_automorphisms(S):
    out = []
    verts = list(S.universe)
    for perm in permutations(verts):
        mapping = dict(zip(verts, perm))
        if all((frozenset(mapping[v] for v in f) in S.faces) == (f in S.faces)
               for f in all_candidate_faces(verts, "hypergraph")):
            out.append(mapping)
    return out


def brute_isomorphism_exists(A, B):
    if len(A.universe) != len(B.universe):
        return False
    for perm in permutations(B.universe):
        mapping = dict(zip(A.universe, perm))
        ok = True
        for m in range(1, len(A.universe) + 1):
            for comb in combinations(A.universe, m):
                if (frozenset(comb) in A.faces) != (frozenset(mapping[v] for v in comb) in B.faces):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False
