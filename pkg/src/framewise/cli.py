"""Command-line front end.

Every stochastic command requires an explicit seed; identical arguments give
byte-identical outputs.  Results go to stdout or ``--out``; experiment
commands can render a figure of the same rows next to the delimited output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .core import (
    FORMAT_VERSION,
    spec_by_kind,
    structure_from_json,
    structure_to_json,
    validate,
)
from .errors import ConfigError, FramewiseError
from .logic import collapse_probe, extension_axiom, greedy_collapse, holds_extension, zero_one_experiment
from .measure import BaseSet, count_frame_extensions, face_probability, mu_base
from .sampler import LazyLimit, Seed, sample_finite
from .symmetry import (
    audit_action,
    automorphism_group,
    cyclic_embedding,
    cyclic_group,
    empty_action,
    extend_action,
    direct_limit_action,
    rigidity_experiment,
    swap_pair_action,
    symmetric_embedding,
    symmetric_group,
    trivial_embedding,
    trivial_group,
)
from .geometry import chart_to_off, realize_chain, verify_chart


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_ints(raw: str) -> list[int]:
    return [int(x) for x in raw.split(",") if x != ""]


def _load_structure_arg(path: str):
    return structure_from_json(_load_json(path))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    obj = _load_json(args.infile)
    kind = obj.get("class", "simplicial")
    spec = spec_by_kind(kind)
    from .core import Structure, downward_closure, _sets_to_interp

    vertices = [int(v) for v in obj.get("vertices", [])]
    faces = [frozenset(int(v) for v in f) for f in obj.get("faces", [])]
    if obj.get("facets_only"):
        faces = sorted(downward_closure(faces, spec.min_face_size))
    S = Structure.make(vertices, _sets_to_interp(faces))
    violations = validate(S, spec)
    _emit(json.dumps({
        "format_version": FORMAT_VERSION,
        "class": kind,
        "violations": [{"rule": v.rule, "witness": [list(w) if isinstance(w, (tuple, list)) else w
                                                    for w in v.witness]} for v in violations],
    }, indent=2) + "\n", args.out)
    return 0 if not violations else 1


def cmd_measure(args) -> int:
    S, spec = _load_structure_arg(args.infile)
    level = args.level if args.level is not None else len(S.universe)
    counts = [count_frame_extensions(S, k, spec, check=False) for k in range(level)]
    mu = mu_base(BaseSet(S, level), spec, check=False)
    _emit(json.dumps({
        "format_version": FORMAT_VERSION,
        "level": level,
        "N": counts,
        "mu": {"num": mu.numerator, "den": mu.denominator},
    }, indent=2) + "\n", args.out)
    return 0


def cmd_sample(args) -> int:
    spec = spec_by_kind(args.klass)
    seed = Seed(args.seed)
    if args.stats:
        faces = [tuple(_parse_ints(chunk)) for chunk in args.stats]
        counts = {f: 0 for f in faces}
        for t in range(args.trials):
            S = sample_finite(args.n, spec, seed.child("sample", "trial", t))
            for f in faces:
                counts[f] += frozenset(f) in S.faces
        lines = ["face,trials,hits,frequency,mu_num,mu_den"]
        for f in faces:
            mu = face_probability(f, spec)
            lines.append(f"\"{' '.join(map(str, f))}\",{args.trials},{counts[f]},"
                         f"{counts[f] / args.trials:.6f},{mu.numerator},{mu.denominator}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    rows = []
    for t in range(args.trials):
        S = sample_finite(args.n, spec, seed.child("sample", "trial", t))
        rows.append(json.dumps(structure_to_json(S, args.klass)))
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_zero_one(args) -> int:
    obj = _load_json(args.axiom)
    ext, spec = structure_from_json(obj)
    ax = extension_axiom(ext, spec)
    res = zero_one_experiment(ax, _parse_ints(args.Ns), args.trials, Seed(args.seed),
                              spec=spec, negate=args.negate)
    _emit("\n".join(res.csv_lines()) + "\n", args.out)
    if args.plot:
        from .plots import experiment_figure

        experiment_figure(res, args.plot,
                          "negated extension axiom" if args.negate else "extension axiom")
    return 0


def cmd_aut(args) -> int:
    S, spec = _load_structure_arg(args.infile)
    order, gens = automorphism_group(S)
    _emit(json.dumps({
        "format_version": FORMAT_VERSION,
        "order": order,
        "vertices": list(S.universe),
        "generators": [list(g) for g in gens],
    }, indent=2) + "\n", args.out)
    return 0


def cmd_rigidity(args) -> int:
    res = rigidity_experiment(_parse_ints(args.Ns), args.trials, Seed(args.seed),
                              spec=spec_by_kind(args.klass))
    _emit("\n".join(res.csv_lines()) + "\n", args.out)
    if args.plot:
        from .plots import experiment_figure

        experiment_figure(res, args.plot, "fraction of rigid samples", "fraction rigid")
    return 0


def _group_by_token(token: str):
    token = token.strip().lower()
    if token.startswith("z") and token[1:].isdigit():
        return cyclic_group(int(token[1:]))
    if token.startswith("s") and token[1:].isdigit():
        return symmetric_group(int(token[1:]))
    if os.path.exists(token):
        obj = _load_json(token)
        from .symmetry import FiniteGroup

        return FiniteGroup(tuple(tuple(row) for row in obj["table"]), name=obj.get("name", ""))
    raise ConfigError(f"unknown group token {token!r} (use z<n>, s<n>, or a JSON file)")


def _embedding_between(sub_token: str, big_token: str):
    s, b = sub_token.strip().lower(), big_token.strip().lower()
    if s.startswith("z") and b.startswith("z"):
        return cyclic_embedding(int(s[1:]), int(b[1:]))
    if s.startswith("s") and b.startswith("s"):
        return symmetric_embedding(int(s[1:]), int(b[1:]))
    raise ConfigError(f"no canonical embedding from {sub_token} into {big_token}")


def _audit_json(audit) -> dict:
    return {
        "axioms_ok": audit.axioms_ok,
        "respects_faces_ok": audit.respects_ok,
        "restriction_ok": audit.restriction_ok,
        "free_off_base_ok": audit.free_off_base_ok,
        "free_everywhere": audit.free_ok,
        "memo_equivariant_ok": audit.memo_equivariant_ok,
        "failures": list(audit.failures),
        "ok": audit.ok,
    }


def cmd_act(args) -> int:
    spec = spec_by_kind(args.klass)
    L = LazyLimit(spec, Seed(args.seed))
    report: dict = {"format_version": FORMAT_VERSION}
    if args.chain:
        tokens = [t for t in args.chain.split(",") if t]
        groups = [_group_by_token(t) for t in tokens]
        chain = [trivial_embedding(groups[0])]
        chain += [_embedding_between(tokens[i], tokens[i + 1]) for i in range(len(groups) - 1)]
        steps = args.steps if args.steps is not None else len(chain)
        stages = direct_limit_action(chain, steps, L, cap=args.cap)
        report["stages"] = []
        prev = None
        prev_emb = None
        for i, act in enumerate(stages):
            audit = audit_action(L, act, base=prev, base_embedding=prev_emb)
            report["stages"].append({
                "group": act.group.name or f"order {act.group.order}",
                "domain": list(act.domain),
                "orbits": [list(o) for o in act.orbits()],
                "audit": _audit_json(audit),
            })
            prev = act
            prev_emb = chain[i + 1] if i + 1 < len(chain) else None
    else:
        group = _group_by_token(args.group)
        if args.start == "pair":
            v, pair = 1, None
            while pair is None:
                if L.is_face((0, v)):
                    pair = (0, v)
                else:
                    v += 1
            base = swap_pair_action(group, 1, pair)
        else:
            base = empty_action(group)
        fresh = 0
        while fresh in base.domain:
            fresh += 1
        act = extend_action(L, base, fresh, cap=args.cap)
        audit = audit_action(L, act, base=base)
        report.update({
            "group": group.name or f"order {group.order}",
            "domain": list(act.domain),
            "orbits": [list(o) for o in act.orbits()],
            "audit": _audit_json(audit),
        })
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    ok = all(s["audit"]["ok"] for s in report["stages"]) if args.chain else report["audit"]["ok"]
    return 0 if ok else 1


def cmd_realize(args) -> int:
    spec = spec_by_kind("simplicial")
    L = LazyLimit(spec, Seed(args.seed))
    stages = realize_chain(L, args.steps, cap=args.cap)
    payload = []
    for i, (sc, chart) in enumerate(stages):
        rep = verify_chart(chart, i, args.samples)
        payload.append({
            "stage": i,
            "vertices": list(sc.universe),
            "faces": sorted((sorted(f) for f in sc.faces), key=lambda f: (len(f), f)),
            "coordinates": {str(v): [float(x) for x in chart.coords[v]] for v in sc.universe},
            "verification": {
                "injective_on_vertices": rep.injective_on_vertices,
                "cell_volumes": list(rep.cell_volumes),
                "volume_sum_error": rep.volume_sum_error,
                "coverage_failures": rep.coverage_failures,
                "samples": rep.samples,
            },
        })
        if args.format == "off":
            root, _ = os.path.splitext(args.out or "stage")
            with open(f"{root}_{i}.off", "w", encoding="utf-8") as fh:
                fh.write(chart_to_off(chart))
    _emit(json.dumps({"format_version": FORMAT_VERSION, "stages": payload}, indent=2) + "\n", args.out)
    return 0


def cmd_collapse(args) -> int:
    if args.infile:
        S, spec = _load_structure_arg(args.infile)
        reduced, flag = greedy_collapse(S)
        _emit(json.dumps({
            "format_version": FORMAT_VERSION,
            "collapsed_to_point": flag,
            "reduced": structure_to_json(reduced, "simplicial"),
        }, indent=2) + "\n", args.out)
        return 0
    if args.probe_n is None or args.seed is None:
        raise ConfigError("collapse needs --in FILE, or --probe-n with --trials and --seed")
    hits, trials = collapse_probe(args.probe_n, args.trials, Seed(args.seed))
    lines = ["n,trials,collapsed,fraction",
             f"{args.probe_n},{trials},{hits},{hits / trials:.6f}"]
    _emit("\n".join(lines) + "\n", args.out)
    if args.plot:
        from .plots import fraction_figure

        fraction_figure([(f"n={args.probe_n}", hits / trials)], args.plot,
                        "greedily collapsible fraction")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="framewise",
        description="Frame-wise uniform measures, samplers, logic, group actions "
                    "and geometry for local classes of finite structures.")
    p.add_argument("--version", action="version", version=f"framewise {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_out(q):
        q.add_argument("--out", help="write the result to this file instead of stdout")

    q = sub.add_parser("validate", help="check a structure JSON against its class axioms")
    q.add_argument("--in", dest="infile", required=True)
    add_out(q)
    q.set_defaults(func=cmd_validate)

    q = sub.add_parser("measure", help="extension counts and the exact measure of a structure")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--level", type=int, default=None, help="frame level (default: the vertex count)")
    add_out(q)
    q.set_defaults(func=cmd_measure)

    q = sub.add_parser("sample", help="draw structures from the frame-wise uniform measure")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--trials", type=int, default=1)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--class", dest="klass", default="simplicial",
                   choices=["simplicial", "hypergraph", "sperner"])
    q.add_argument("--stats", action="append", metavar="V,V,...",
                   help="emit CSV frequency of this face instead of samples (repeatable)")
    add_out(q)
    q.set_defaults(func=cmd_sample)

    q = sub.add_parser("zero-one", help="satisfaction probability of an extension axiom by size")
    q.add_argument("--axiom", required=True, help="structure JSON of the one-point extension")
    q.add_argument("--Ns", required=True, help="comma-separated vertex counts")
    q.add_argument("--trials", type=int, default=2000)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--negate", action="store_true")
    q.add_argument("--plot", help="render the estimates to this image file")
    add_out(q)
    q.set_defaults(func=cmd_zero_one)

    q = sub.add_parser("aut", help="automorphism group order and generators")
    q.add_argument("--in", dest="infile", required=True)
    add_out(q)
    q.set_defaults(func=cmd_aut)

    q = sub.add_parser("rigidity", help="fraction of samples with trivial automorphism group")
    q.add_argument("--Ns", required=True)
    q.add_argument("--trials", type=int, default=1000)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--class", dest="klass", default="simplicial",
                   choices=["simplicial", "hypergraph", "sperner"])
    q.add_argument("--plot", help="render the fractions to this image file")
    add_out(q)
    q.set_defaults(func=cmd_rigidity)

    q = sub.add_parser("act", help="realise finite group actions on the sampled limit")
    q.add_argument("--group", help="z<n>, s<n>, or a JSON multiplication table")
    q.add_argument("--chain", help="comma-separated group tokens for a direct limit")
    q.add_argument("--steps", type=int, default=None)
    q.add_argument("--start", choices=["empty", "pair"], default="empty",
                   help="extend from nothing, or from a transposition of an adjacent pair")
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--cap", type=int, default=10000)
    q.add_argument("--class", dest="klass", default="simplicial",
                   choices=["simplicial", "hypergraph", "sperner"])
    add_out(q)
    q.set_defaults(func=cmd_act)

    q = sub.add_parser("realize", help="stage-wise charts onto standard simplices")
    q.add_argument("--steps", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--samples", type=int, default=10000)
    q.add_argument("--cap", type=int, default=10000)
    q.add_argument("--format", choices=["json", "off"], default="json",
                   help="off additionally writes one mesh file per stage")
    add_out(q)
    q.set_defaults(func=cmd_realize)

    q = sub.add_parser("collapse", help="greedy free-pair collapse, or a collapsibility probe")
    q.add_argument("--in", dest="infile")
    q.add_argument("--probe-n", type=int, default=None)
    q.add_argument("--trials", type=int, default=500)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--plot", help="render the probe fraction to this image file")
    add_out(q)
    q.set_defaults(func=cmd_collapse)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("act",) and not (args.group or args.chain):
        parser.error("act needs --group or --chain")
    try:
        return args.func(args)
    except FramewiseError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if hasattr(exc, "violations"):
            payload["violations"] = [str(v) for v in exc.violations]
        sys.stderr.write(json.dumps(payload) + "\n")
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps({"error": "IoError", "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
