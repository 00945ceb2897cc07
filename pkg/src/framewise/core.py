"""Finite relational structures and their local classes.

A local class is cut out by universally quantified sentences whose antecedent
is a single relation atom; general irreflexivity (no relation holds of a tuple
with a repeated entry) is always part of the axioms.  The built-in classes are
simplicial complexes, hypergraphs and Sperner families, all over the
one-symbol-per-arity set-family signature; arbitrary signatures with custom
sentences are supported through the same interface.

Structures are immutable values: every operation returns a new structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import FrameMismatch, NotASubset, NotInClass, UnknownRelation

FORMAT_VERSION = 1

# The set-family signature has one symmetric symbol per arity; a face with m
# vertices is stored under the arity-m symbol.
def face_symbol(size: int) -> str:
    return f"S{size - 1}"


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arity: int
    symmetric: bool = True

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"arity must be >= 1, got {self.arity}")


class Signature:
    """A locally finite relational signature.

    Either an explicit finite list of symbols, or the unbounded set-family
    signature with exactly one symmetric symbol of every arity >= min_arity
    (min_arity 2 drops the vertex symbol, making every universe element an
    implicit vertex).
    """

    def __init__(self, symbols: Sequence[RelationSymbol] = (), set_family_min_arity: Optional[int] = None):
        if symbols and set_family_min_arity is not None:
            raise ValueError("signature is either explicit or a set family, not both")
        self._symbols = {s.name: s for s in symbols}
        for arity in {s.arity for s in symbols}:
            names = [s.name for s in symbols if s.arity == arity]
            if len(names) != len(set(names)):
                raise ValueError("duplicate symbol names")
        self._family_min = set_family_min_arity

    @property
    def is_set_family(self) -> bool:
        return self._family_min is not None

    @property
    def min_face_size(self) -> int:
        if self._family_min is None:
            raise ValueError("not a set-family signature")
        return self._family_min

    def symbols_of_arity(self, m: int) -> tuple[RelationSymbol, ...]:
        if self._family_min is not None:
            if m >= self._family_min:
                return (RelationSymbol(face_symbol(m), m, symmetric=True),)
            return ()
        return tuple(s for s in self._symbols.values() if s.arity == m)

    def lookup(self, name: str) -> RelationSymbol:
        if self._family_min is not None:
            if name.startswith("S") and name[1:].isdigit():
                arity = int(name[1:]) + 1
                if arity >= self._family_min:
                    return RelationSymbol(name, arity, symmetric=True)
            raise UnknownRelation(f"symbol {name!r} is not in the signature")
        try:
            return self._symbols[name]
        except KeyError:
            raise UnknownRelation(f"symbol {name!r} is not in the signature") from None

    def explicit_symbols(self) -> tuple[RelationSymbol, ...]:
        if self._family_min is not None:
            raise ValueError("set-family signature has unboundedly many symbols")
        return tuple(sorted(self._symbols.values(), key=lambda s: (s.arity, s.name)))


def _canon_item(item):
    if isinstance(item, frozenset):
        return tuple(sorted(item))
    return tuple(item)


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite relational structure with universe a finite set of naturals.

    ``relations`` maps symbol names to frozensets of items; symmetric symbols
    store faces as frozensets of vertices, asymmetric ones store tuples.
    """

    universe: tuple[int, ...]
    relations: tuple[tuple[str, frozenset], ...] = ()

    @staticmethod
    def make(universe: Iterable[int], interp: Mapping[str, Iterable] = ()) -> "Structure":
        uni = tuple(sorted(set(universe)))
        uniset = set(uni)
        rels = []
        for name in sorted(dict(interp)):
            items = set()
            for item in dict(interp)[name]:
                if isinstance(item, frozenset):
                    got = item
                else:
                    got = tuple(item)
                entries = got if isinstance(got, frozenset) else set(got)
                if not set(entries) <= uniset:
                    raise ValueError(f"relation {name}: entries {got} outside universe")
                items.add(got)
            if items:
                rels.append((name, frozenset(items)))
        return Structure(uni, tuple(rels))

    def interp(self, name: str) -> frozenset:
        for n, items in self.relations:
            if n == name:
                return items
        return frozenset()

    @cached_property
    def faces(self) -> frozenset:
        """All set-coded faces across the set-family symbols."""
        out = set()
        for name, items in self.relations:
            for item in items:
                if isinstance(item, frozenset):
                    out.add(item)
        return frozenset(out)

    @cached_property
    def faces_by_size(self) -> dict:
        out: dict[int, set] = {}
        for f in self.faces:
            out.setdefault(len(f), set()).add(f)
        return {k: frozenset(v) for k, v in out.items()}

    def has_face(self, vertices) -> bool:
        return frozenset(vertices) in self.faces

    @property
    def size(self) -> int:
        return len(self.universe)

    @cached_property
    def _key(self):
        return (
            self.universe,
            tuple((name, tuple(sorted(map(_canon_item, items)))) for name, items in self.relations),
        )

    def __eq__(self, other):
        return isinstance(other, Structure) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        faces = sorted(map(_canon_item, self.faces))
        if len(self.relations) and not faces:
            return f"Structure({list(self.universe)}, {dict((n, sorted(map(_canon_item, i))) for n, i in self.relations)})"
        return f"Structure({list(self.universe)}, faces={faces})"


def empty_structure(vertices: Iterable[int] = ()) -> Structure:
    return Structure.make(vertices, {})


def _sets_to_interp(faces: Iterable) -> dict:
    interp: dict[str, set] = {}
    for f in faces:
        fs = frozenset(f)
        interp.setdefault(face_symbol(len(fs)), set()).add(fs)
    return interp


def complex_on(vertices: Iterable[int], faces: Iterable = ()) -> Structure:
    """A set-family structure whose faces all have size >= 2 (implicit vertices)."""
    faces = [frozenset(f) for f in faces]
    for f in faces:
        if len(f) < 2:
            raise ValueError(f"face {sorted(f)} has fewer than 2 vertices; vertices are implicit")
    return Structure.make(vertices, _sets_to_interp(faces))


def family_on(vertices: Iterable[int], faces: Iterable = ()) -> Structure:
    """A set-family structure allowing singleton faces (hypergraph style)."""
    faces = [frozenset(f) for f in faces]
    for f in faces:
        if len(f) < 1:
            raise ValueError("the empty face is not represented")
    return Structure.make(vertices, _sets_to_interp(faces))


def downward_closure(faces: Iterable, min_size: int) -> set:
    out = set()
    stack = [frozenset(f) for f in faces]
    while stack:
        f = stack.pop()
        if len(f) < min_size or f in out:
            continue
        out.add(f)
        for v in f:
            g = f - {v}
            if len(g) >= min_size and g not in out:
                stack.append(g)
    return out


def full_simplex(vertices: Iterable[int]) -> Structure:
    """The complex with every subset of size >= 2 as a face."""
    verts = sorted(set(vertices))
    faces = [frozenset(c) for m in range(2, len(verts) + 1) for c in combinations(verts, m)]
    return complex_on(verts, faces)


# ---------------------------------------------------------------------------
# Quantifier-free bodies of local sentences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    name: str
    vars: tuple[int, ...]


@dataclass(frozen=True)
class Eq:
    left: int
    right: int


@dataclass(frozen=True)
class Not:
    inner: object


@dataclass(frozen=True)
class And:
    parts: tuple = ()


@dataclass(frozen=True)
class Or:
    parts: tuple = ()


TRUE = And(())


def _atom_holds(S: Structure, sig: Signature, name: str, values: tuple[int, ...]) -> bool:
    sym = sig.lookup(name)
    if sym.symmetric:
        # with general irreflexivity a repeated-entry atom is false
        if len(set(values)) != sym.arity:
            return False
        return frozenset(values) in S.interp(name)
    return tuple(values) in S.interp(name)


def eval_formula(formula, S: Structure, sig: Signature, assignment: tuple[int, ...]) -> bool:
    if isinstance(formula, Atom):
        return _atom_holds(S, sig, formula.name, tuple(assignment[i] for i in formula.vars))
    if isinstance(formula, Eq):
        return assignment[formula.left] == assignment[formula.right]
    if isinstance(formula, Not):
        return not eval_formula(formula.inner, S, sig, assignment)
    if isinstance(formula, And):
        return all(eval_formula(p, S, sig, assignment) for p in formula.parts)
    if isinstance(formula, Or):
        return any(eval_formula(p, S, sig, assignment) for p in formula.parts)
    raise TypeError(f"not a formula: {formula!r}")


@dataclass(frozen=True)
class LocalSentence:
    """forall x1..xm ( guard(x1..xm) -> body ), body quantifier-free."""

    guard: Atom
    body: object
    name: str = ""

    def __post_init__(self):
        if tuple(self.guard.vars) != tuple(range(len(self.guard.vars))):
            raise ValueError("guard variables must be 0..m-1 in order")
        if not _vars_within(self.body, len(self.guard.vars)):
            raise ValueError("body uses variables outside the guard")


def _vars_within(formula, m: int) -> bool:
    if isinstance(formula, Atom):
        return all(0 <= v < m for v in formula.vars)
    if isinstance(formula, Eq):
        return 0 <= formula.left < m and 0 <= formula.right < m
    if isinstance(formula, Not):
        return _vars_within(formula.inner, m)
    if isinstance(formula, (And, Or)):
        return all(_vars_within(p, m) for p in formula.parts)
    raise TypeError(f"not a formula: {formula!r}")


@dataclass(frozen=True)
class Violation:
    rule: str
    witness: tuple

    def __str__(self):
        return f"{self.rule} at {self.witness}"


# ---------------------------------------------------------------------------
# Local classes
# ---------------------------------------------------------------------------

SIMPLICIAL = "simplicial"
HYPERGRAPH = "hypergraph"
SPERNER = "sperner"
CUSTOM = "custom"

_SET_FAMILY_KINDS = (SIMPLICIAL, HYPERGRAPH, SPERNER)


@dataclass(frozen=True)
class LocalClassSpec:
    kind: str
    signature: Signature = field(compare=False)
    sentences: tuple[LocalSentence, ...] = ()

    @property
    def is_set_family(self) -> bool:
        return self.kind in _SET_FAMILY_KINDS

    @property
    def min_face_size(self) -> int:
        return self.signature.min_face_size

    def admissible_face(self, face: frozenset, has_face) -> bool:
        """May ``face`` be added given the decided lower levels?

        ``has_face`` answers membership for strictly smaller faces.
        """
        if self.kind == SIMPLICIAL:
            if len(face) == 2:
                return True
            return all(has_face(face - {v}) for v in face)
        if self.kind == HYPERGRAPH:
            return True
        if self.kind == SPERNER:
            for m in range(1, len(face)):
                for sub in combinations(sorted(face), m):
                    if has_face(frozenset(sub)):
                        return False
            return True
        raise ValueError(f"admissible_face is for set-family kinds, not {self.kind}")

    def face_prerequisites(self, face: frozenset) -> list[frozenset]:
        """Smaller faces whose status must be decided before ``face``."""
        if self.kind == SIMPLICIAL:
            if len(face) == 2:
                return []
            return [face - {v} for v in sorted(face)]
        if self.kind == HYPERGRAPH:
            return []
        if self.kind == SPERNER:
            out = []
            for m in range(1, len(face)):
                out.extend(frozenset(c) for c in combinations(sorted(face), m))
            return out
        raise ValueError(f"face_prerequisites is for set-family kinds, not {self.kind}")

    def schema_sentences(self, max_arity: int) -> tuple[LocalSentence, ...]:
        """Instances of every axiom schema up to the given guard arity.

        Used by the sentence-level evaluator; the fast validators must agree
        with evaluating these directly.
        """
        out: list[LocalSentence] = []
        arities = range(self.min_face_size if self.is_set_family else 1, max_arity + 1)
        for m in arities:
            for sym in self.signature.symbols_of_arity(m):
                guard = Atom(sym.name, tuple(range(m)))
                for i, j in combinations(range(m), 2):
                    out.append(LocalSentence(guard, Not(Eq(i, j)), name=f"general-irreflexivity:{sym.name}:{i},{j}"))
                if sym.symmetric and m >= 2:
                    for perm in permutations(range(m)):
                        if perm == tuple(range(m)):
                            continue
                        out.append(LocalSentence(guard, Atom(sym.name, perm), name=f"symmetry:{sym.name}:{perm}"))
        if self.kind == SIMPLICIAL:
            for m in range(3, max_arity + 1):
                guard = Atom(face_symbol(m), tuple(range(m)))
                out.append(LocalSentence(guard, Atom(face_symbol(m - 1), tuple(range(m - 1))),
                                         name=f"subset-closure:{m}"))
        if self.kind == SPERNER:
            for m in range(2, max_arity + 1):
                guard = Atom(face_symbol(m), tuple(range(m)))
                for size in range(1, m):
                    out.append(LocalSentence(guard, Not(Atom(face_symbol(size), tuple(range(size)))),
                                             name=f"non-subset:{m}:{size}"))
        out.extend(s for s in self.sentences if len(s.guard.vars) <= max_arity)
        return tuple(out)


def simplicial_class() -> LocalClassSpec:
    return LocalClassSpec(SIMPLICIAL, Signature(set_family_min_arity=2))


def hypergraph_class() -> LocalClassSpec:
    return LocalClassSpec(HYPERGRAPH, Signature(set_family_min_arity=1))


def sperner_class() -> LocalClassSpec:
    return LocalClassSpec(SPERNER, Signature(set_family_min_arity=1))


def custom_class(signature: Signature, sentences: Iterable[LocalSentence] = ()) -> LocalClassSpec:
    sentences = tuple(sentences)
    for s in sentences:
        signature.lookup(s.guard.name)
    return LocalClassSpec(CUSTOM, signature, sentences)


def spec_by_kind(kind: str) -> LocalClassSpec:
    try:
        return {SIMPLICIAL: simplicial_class, HYPERGRAPH: hypergraph_class, SPERNER: sperner_class}[kind]()
    except KeyError:
        raise ValueError(f"unknown class kind {kind!r}") from None


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _check_symbols(S: Structure, spec: LocalClassSpec) -> None:
    for name, items in S.relations:
        sym = spec.signature.lookup(name)  # raises UnknownRelation
        for item in items:
            if sym.symmetric:
                if not isinstance(item, frozenset) or len(item) != sym.arity:
                    raise UnknownRelation(
                        f"symbol {name} is symmetric {sym.arity}-ary; got item {item!r}")
            else:
                if not isinstance(item, tuple) or len(item) != sym.arity:
                    raise UnknownRelation(
                        f"symbol {name} is {sym.arity}-ary; got item {item!r}")


def validate(S: Structure, spec: LocalClassSpec) -> list[Violation]:
    """Every (sentence, witness) pair falsified in S; empty means member."""
    _check_symbols(S, spec)
    out: list[Violation] = []
    if spec.kind == SIMPLICIAL:
        for f in S.faces:
            if len(f) >= 3:
                for v in sorted(f):
                    if f - {v} not in S.faces:
                        out.append(Violation("subset-closure", (_canon_item(f), _canon_item(f - {v}))))
    elif spec.kind == SPERNER:
        for f in S.faces:
            for m in range(1, len(f)):
                for sub in combinations(sorted(f), m):
                    if frozenset(sub) in S.faces:
                        out.append(Violation("non-subset", (_canon_item(f), sub)))
    elif spec.kind == HYPERGRAPH:
        pass
    else:
        out.extend(_validate_sentences(S, spec))
    return out


def _guard_assignments(S: Structure, sym: RelationSymbol) -> Iterator[tuple[int, ...]]:
    for item in S.interp(sym.name):
        if sym.symmetric:
            yield from permutations(sorted(item))
        else:
            yield tuple(item)


def _validate_sentences(S: Structure, spec: LocalClassSpec) -> list[Violation]:
    out = []
    sig = spec.signature
    # general irreflexivity over tuple-coded relations
    for name, items in S.relations:
        sym = sig.lookup(name)
        if not sym.symmetric:
            for t in items:
                if len(set(t)) != len(t):
                    out.append(Violation("general-irreflexivity", (name, t)))
    for sentence in spec.sentences:
        sym = sig.lookup(sentence.guard.name)
        for assignment in _guard_assignments(S, sym):
            if not eval_formula(sentence.body, S, sig, assignment):
                out.append(Violation(sentence.name or "custom", (sentence.guard.name, assignment)))
    return out


def require_member(S: Structure, spec: LocalClassSpec, what: str = "structure") -> None:
    violations = validate(S, spec)
    if violations:
        raise NotInClass(f"{what} is not in the {spec.kind} class", violations)


# ---------------------------------------------------------------------------
# Frames, restrictions, subobjects and the adoption splice
# ---------------------------------------------------------------------------

def k_frame(S: Structure, k: int) -> Structure:
    """Keep relations of arity <= k, same universe, clear the rest."""
    rels = []
    for name, items in S.relations:
        arity = len(next(iter(items))) if items else 0
        if arity <= k:
            rels.append((name, items))
    return Structure(S.universe, tuple(rels))


def induced_substructure(S: Structure, X: Iterable[int]) -> Structure:
    X = frozenset(X)
    if not X <= set(S.universe):
        raise NotASubset(f"{sorted(X)} is not a subset of the universe")
    rels = []
    for name, items in S.relations:
        kept = frozenset(i for i in items if set(i) <= X)
        if kept:
            rels.append((name, kept))
    return Structure(tuple(sorted(X)), tuple(rels))


def is_subobject(Bsub: Structure, B: Structure) -> bool:
    """True iff the universe is contained and every relation item carries over."""
    if not set(Bsub.universe) <= set(B.universe):
        return False
    for name, items in Bsub.relations:
        if not items <= B.interp(name):
            return False
    return True


def adopt(B: Structure, A: Structure, A2: Structure, n: int, spec: LocalClassSpec,
          check: bool = True) -> Structure:
    """Splice a different arity-n level over the universe of A into B.

    Keeps B's (n-1)-frame; on n-tuples inside |A| the relations come from A2,
    elsewhere from B.  For simplicial complexes higher faces survive exactly
    when they were faces of B and all their n-subsets are still faces; other
    kinds truncate above arity n.
    """
    avs = set(A.universe)
    if check:
        if induced_substructure(B, avs) != A:
            raise NotASubset("A must be the induced substructure of B on its universe")
        if len(avs) < n or n < 1:
            raise ValueError(f"need n >= 1 and |A| >= n, got |A|={len(avs)}, n={n}")
        if set(A2.universe) != avs:
            raise FrameMismatch("A' must live on the universe of A")
        if k_frame(A2, n - 1) != k_frame(A, n - 1):
            raise FrameMismatch("A and A' must share their (n-1)-frame")
        require_member(B, spec, "B")
        require_member(A2, spec, "A'")

    interp: dict[str, set] = {}
    for name, items in B.relations:
        arity = len(next(iter(items)))
        if arity < n:
            interp[name] = set(items)
        elif arity == n:
            interp[name] = {i for i in items if not set(i) <= avs}
    for name, items in A2.relations:
        arity = len(next(iter(items)))
        if arity == n:
            interp.setdefault(name, set()).update(items)

    if spec.kind == SIMPLICIAL:
        n_faces = {i for items in interp.values() for i in items if len(i) == n}
        for size in sorted(S for S in B.faces_by_size if S > n):
            for f in B.faces_by_size[size]:
                if all(frozenset(c) in n_faces for c in combinations(sorted(f), n)):
                    interp.setdefault(face_symbol(size), set()).add(f)
    # other kinds: the result is its own n-frame

    out = Structure.make(B.universe, interp)
    if check:
        require_member(out, spec, "spliced structure")
    return out


# ---------------------------------------------------------------------------
# JSON structure format
# ---------------------------------------------------------------------------

def structure_to_json(S: Structure, kind: str) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "class": kind,
        "vertices": list(S.universe),
        "faces": sorted((sorted(f) for f in S.faces), key=lambda f: (len(f), f)),
    }


def structure_from_json(obj: dict) -> tuple[Structure, LocalClassSpec]:
    """Load and validate a structure; rejects non-members with the report."""
    kind = obj.get("class", SIMPLICIAL)
    spec = spec_by_kind(kind)
    vertices = [int(v) for v in obj.get("vertices", [])]
    faces = [frozenset(int(v) for v in f) for f in obj.get("faces", [])]
    if obj.get("facets_only"):
        faces = sorted(downward_closure(faces, spec.min_face_size))
    for f in faces:
        if len(f) < spec.min_face_size:
            raise UnknownRelation(
                f"face {sorted(f)} of size {len(f)} interprets a symbol outside the {kind} signature")
        if not f <= set(vertices):
            raise ValueError(f"face {sorted(f)} not within the vertex list")
    S = Structure.make(vertices, _sets_to_interp(faces))
    violations = validate(S, spec)
    if violations:
        raise NotInClass(f"structure is not in the {kind} class", violations)
    return S, spec


def load_structure(path: str) -> tuple[Structure, LocalClassSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        return structure_from_json(json.load(fh))
