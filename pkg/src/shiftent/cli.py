"""Command line front end.

Verbs map one-to-one onto library operations and print a JSON report on
standard output.  Exit codes: 0 success, 2 input validation error (with
a diagnostic naming the offending field), 3 verification failure, 64
usage error, 65 infeasible bound under the digit cap, 66 unreadable
file.  Progress notes go to standard error, never to standard output.
"""

import argparse
import json
import os
import re
import sys

from shiftent import factorialsets, presets
from shiftent.factorialsets import DEFAULT_DIGIT_CAP, DigitCapError
from shiftent.fgraph import (
    LADDER,
    ORBIT,
    PERIODIC_LADDER,
    STRING,
    MapSpec,
    element_label,
    eventual_image,
    invariants,
    truncate,
)
from shiftent.kalgebra import GroupSpec
from shiftent.shiftcore import (
    BoundedMapError,
    FiniteFibersError,
    InfiniteEntropy,
    classify_entropy,
    entropy_direct_sum,
    nonqp_witness,
    sample_law_inputs,
    trajectory,
    verify_shift_laws,
)

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_VERIFY = 3
EXIT_USAGE = 64
EXIT_INFEASIBLE = 65
EXIT_UNREADABLE = 66

VERBS = (
    "classify",
    "invariants",
    "entropy-sum",
    "trajectory",
    "witness",
    "verify-lemmas",
    "verify-laws",
    "truncate",
)

DIGIT_CAP_ENV = "SHIFTENT_DIGIT_CAP"


class SpecError(Exception):
    """Input failed validation; carries JSON-path diagnostics."""

    def __init__(self, diagnostics):
        super().__init__(diagnostics[0]["message"] if diagnostics else "invalid input")
        self.diagnostics = diagnostics


class UnreadableError(Exception):
    pass


def _diag(path, message):
    return {"path": path, "message": message}


def validate_map_payload(data) -> list:
    """Structural checks mirroring the MapSpec invariants, with JSON paths."""
    diags = []
    if not isinstance(data, dict):
        return [_diag("$", "map spec must be a JSON object")]
    core = data.get("core")
    if not isinstance(core, dict):
        return [_diag("core", "missing or not an object")]
    size = core.get("size")
    if not isinstance(size, int) or size < 0:
        diags.append(_diag("core.size", "must be a nonnegative integer"))
        size = None
    nxt = core.get("next")
    if not isinstance(nxt, list):
        diags.append(_diag("core.next", "must be a list"))
    elif size is not None:
        if len(nxt) != size:
            diags.append(_diag("core.next", f"length {len(nxt)} does not match size {size}"))
        for i, v in enumerate(nxt):
            if not (isinstance(v, int) and 0 <= v < size):
                diags.append(_diag(f"core.next[{i}]", f"target {v!r} not a core vertex"))
    atts = data.get("attachments", [])
    if not isinstance(atts, list):
        return diags + [_diag("attachments", "must be a list")]
    for i, att in enumerate(atts):
        base = f"attachments[{i}]"
        if not isinstance(att, dict):
            diags.append(_diag(base, "must be an object"))
            continue
        kind = att.get("kind")
        if kind not in (STRING, ORBIT, LADDER, PERIODIC_LADDER):
            diags.append(_diag(f"{base}.kind", f"unknown kind {kind!r}"))
            continue
        mult = att.get("multiplicity", 1)
        if mult != "omega" and not (isinstance(mult, int) and mult >= 1):
            diags.append(_diag(f"{base}.multiplicity", "must be a positive integer or \"omega\""))
        anchor = att.get("anchor")
        if kind in (STRING, LADDER):
            if anchor is None:
                diags.append(_diag(f"{base}.anchor", f"{kind} attachment needs an anchor"))
            elif not isinstance(anchor, int) or size is None or not 0 <= anchor < size:
                diags.append(_diag(f"{base}.anchor", f"anchor {anchor!r} not a core vertex"))
        elif anchor is not None:
            diags.append(_diag(f"{base}.anchor", f"{kind} attachment is self-contained"))
        height = att.get("height")
        if kind == LADDER:
            ok, sub = _check_rule(height, f"{base}.height")
            diags.extend(sub)
            if ok and height["a"] < 1:
                diags.append(_diag(f"{base}.height.a", "heights not strictly increasing"))
            if ok and height["b"] < 0:
                diags.append(_diag(f"{base}.height.b", "must be >= 0"))
        elif height is not None:
            diags.append(_diag(f"{base}.height", "height rule only applies to ladders"))
        length = att.get("length")
        if kind == PERIODIC_LADDER:
            ok, sub = _check_rule(length, f"{base}.length")
            diags.extend(sub)
            if ok and length["a"] < 1:
                diags.append(_diag(f"{base}.length.a", "lengths not strictly increasing"))
            if ok and length["a"] + length["b"] < 1:
                diags.append(_diag(f"{base}.length.b", "first cycle would be empty"))
        elif length is not None:
            diags.append(_diag(f"{base}.length", "length rule only applies to periodic ladders"))
    return diags


def _check_rule(rule, path):
    if not isinstance(rule, dict):
        return False, [_diag(path, "missing or not an object")]
    diags = []
    for key in ("a", "b"):
        if not isinstance(rule.get(key), int):
            diags.append(_diag(f"{path}.{key}", "must be an integer"))
    return not diags, diags


def _read_file(path) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UnreadableError(f"cannot read {path}: {exc}") from exc


def load_map(token) -> MapSpec:
    """Load a map spec from a JSON file, falling back to bundled presets."""
    name = token[:-5] if token.endswith(".json") else token
    if not os.path.exists(token):
        if name in presets.PRESETS:
            return presets.PRESETS[name]()
        raise UnreadableError(
            f"cannot read {token}: no such file and no preset named {name!r} "
            f"(presets: {', '.join(sorted(presets.PRESETS))})"
        )
    try:
        data = json.loads(_read_file(token))
    except json.JSONDecodeError as exc:
        raise SpecError([_diag("$", f"invalid JSON: {exc}")]) from exc
    diags = validate_map_payload(data)
    if diags:
        raise SpecError(diags)
    return MapSpec.from_json(data)


_GROUP_TOKEN = re.compile(r"^z?\d+(xz?\d+)*$")


def load_group(token) -> GroupSpec:
    """A group comes from a JSON file or a token like 2, z4, 2x2, z2xz6."""
    if os.path.exists(token):
        try:
            data = json.loads(_read_file(token))
        except json.JSONDecodeError as exc:
            raise SpecError([_diag("$", f"invalid JSON: {exc}")]) from exc
        orders = data.get("orders") if isinstance(data, dict) else None
        if not isinstance(orders, list) or not orders:
            raise SpecError([_diag("orders", "must be a nonempty list of integers >= 2")])
        try:
            return GroupSpec(orders)
        except ValueError as exc:
            raise SpecError([_diag("orders", str(exc))]) from exc
    name = token[:-5] if token.endswith(".json") else token
    compact = name.lower()
    if not _GROUP_TOKEN.match(compact):
        raise UnreadableError(
            f"cannot read {token}: no such file and not a group token like 2, z4 or 2x2"
        )
    orders = [int(part.lstrip("z")) for part in compact.split("x")]
    try:
        return GroupSpec(orders)
    except ValueError as exc:
        raise SpecError([_diag("$", str(exc))]) from exc


_BOUND_TOKEN = re.compile(r"^(\d+)(!*)$")


def parse_bound(token, digit_cap) -> int:
    m = _BOUND_TOKEN.match(token)
    if not m:
        raise SpecError([_diag("bound", f"not a number or factorial token: {token!r}")])
    value = int(m.group(1))
    if value < 1:
        raise SpecError([_diag("bound", "must be >= 1")])
    return factorialsets.iterated_factorial(value, len(m.group(2)), digit_cap)


def _digit_cap() -> int:
    raw = os.environ.get(DIGIT_CAP_ENV)
    if raw is None:
        return DEFAULT_DIGIT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise SpecError([_diag(DIGIT_CAP_ENV, f"not an integer: {raw!r}")])
    if cap < 1:
        raise SpecError([_diag(DIGIT_CAP_ENV, "must be >= 1")])
    return cap


def _progress(msg):
    print(msg, file=sys.stderr)


def _emit(report, output) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if output:
        try:
            with open(output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise UnreadableError(f"cannot write {output}: {exc}") from exc


# ---------------------------------------------------------------------------
# Verb implementations.  Each returns (report, exit_code).
# ---------------------------------------------------------------------------


def _cmd_classify(args):
    spec = load_map(args.map)
    out = classify_entropy(spec)
    if isinstance(out, InfiniteEntropy):
        w = out.witness
        return {"verdict": "infinite", "witness": {"kind": w.kind, "lemma": w.lemma}}, EXIT_OK
    return {"verdict": "zero", "qp": [out.qp[0], out.qp[1]]}, EXIT_OK


def _cmd_invariants(args):
    spec = load_map(args.map)
    return invariants(spec).to_json(), EXIT_OK


def _cmd_entropy_sum(args):
    spec = load_map(args.map)
    group = load_group(args.group)
    try:
        ent = entropy_direct_sum(spec, group)
    except FiniteFibersError as exc:
        raise SpecError([_diag("attachments", str(exc))]) from exc
    if ent.is_zero:
        return {"value": {"k": 0}}, EXIT_OK
    e, b = ent.canonical
    return {"value": {"k": e, "base": b}}, EXIT_OK


def _cmd_trajectory(args):
    spec = load_map(args.map)
    group = load_group(args.group)
    steps = args.steps if args.steps is not None else max(1, args.depth // 2)
    _progress(f"trajectory: {steps} steps in a depth-{args.depth} window")
    prof = trajectory(
        spec,
        group,
        steps,
        stabilization=args.stabilization,
        depth=args.depth,
    )
    return prof.to_json(), EXIT_OK


def _cmd_witness(args):
    spec = load_map(args.map)
    group = load_group(args.group)
    try:
        wit = nonqp_witness(spec, group, horizon=args.horizon)
    except BoundedMapError as exc:
        raise SpecError([_diag("map", str(exc))]) from exc
    code = EXIT_OK if wit.pairwise_distinct else EXIT_VERIFY
    return wit.to_json(), code


def _cmd_verify_lemmas(args):
    group = load_group(args.group)
    cap = _digit_cap()
    bound = parse_bound(args.bound, cap)
    signs = ("+", "-") if args.sign == "both" else (args.sign,)
    kinds = ("string", "orbit") if args.kind == "both" else (args.kind,)
    checks = []
    _progress(f"independence: levels 1..{args.t}")
    rep = factorialsets.verify_independence_level1(group, args.t, bound, cap)
    checks.append({"check": "independence-level1", "ok": rep.ok, "report": rep.to_json()})
    for sign in signs:
        _progress(f"independence: shifts 0..{args.k} sign {sign}")
        rep = factorialsets.verify_independence_level2(group, args.t, args.k, sign, bound, cap)
        checks.append(
            {
                "check": f"independence-level2{sign}",
                "ok": rep.ok,
                "report": rep.to_json(),
            }
        )
    k_max = max(1, args.k)
    for kind in kinds:
        _progress(f"trajectory growth: {kind}, {k_max} steps")
        rep = factorialsets.string_trajectory_check(group, args.t, k_max, bound, kind, cap)
        checks.append({"check": f"growth-{kind}", "ok": rep.ok, "report": rep.to_json()})
    ok = all(c["ok"] for c in checks)
    report = {
        "params": {
            "group": group.to_json(),
            "t": args.t,
            "k": args.k,
            "bound": str(bound),
            "sign": args.sign,
            "kind": args.kind,
        },
        "checks": checks,
        "ok": ok,
    }
    return report, EXIT_OK if ok else EXIT_VERIFY


def _cmd_verify_laws(args):
    group = load_group(args.group)
    pairs = sample_law_inputs(args.seed, args.count, args.max_vertices)
    failures = []
    for i, (f, g) in enumerate(pairs):
        if i and i % 200 == 0:
            _progress(f"laws: {i}/{len(pairs)} samples")
        for law in verify_shift_laws(f, g, group, seed=args.seed + i):
            if not law.holds:
                failures.append(
                    {
                        "sample": i,
                        "size": f.size,
                        "law": law.law,
                        "detail": law.detail,
                    }
                )
    report = {
        "params": {
            "group": group.to_json(),
            "seed": args.seed,
            "count": args.count,
            "max_vertices": args.max_vertices,
        },
        "samples": len(pairs),
        "failures": failures,
        "ok": not failures,
    }
    return report, EXIT_OK if not failures else EXIT_VERIFY


def _cmd_truncate(args):
    spec = load_map(args.map)
    tr = truncate(spec, args.depth)
    labels = [element_label(e) for e in tr.elements]
    report = tr.to_json()
    report["labels"] = labels
    ev = eventual_image(spec)
    report["eventual_image"] = ev.to_json()
    if args.dot:
        lines = ["digraph window {"]
        for vid, label in enumerate(labels):
            shape = "doublecircle" if vid in tr.artificial_fixed_points else "circle"
            lines.append(f'  "{label}" [shape={shape}];')
        for vid, target in enumerate(tr.map.next):
            lines.append(f'  "{labels[vid]}" -> "{labels[target]}";')
        lines.append("}")
        try:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write("\n".join(lines) + "\n")
        except OSError as exc:
            raise UnreadableError(f"cannot write {args.dot}: {exc}") from exc
    return report, EXIT_OK


def _build_parser(verb) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"shiftent {verb}")
    p.add_argument("--output", help="also write the JSON report to this file")
    if verb in ("classify", "invariants", "entropy-sum", "trajectory", "witness", "truncate"):
        p.add_argument("--map", required=True, help="map spec file or preset name")
    if verb in ("entropy-sum", "trajectory", "witness", "verify-lemmas", "verify-laws"):
        p.add_argument("--group", default="2", help="group file or token (default 2)")
    if verb == "classify":
        p.add_argument("--group", default="2", help="accepted for symmetry; the verdict is group-free")
    if verb in ("trajectory", "truncate"):
        p.add_argument("--depth", type=int, default=16, help="window depth (default 16)")
    if verb == "trajectory":
        p.add_argument("--steps", type=int, default=None, help="trajectory terms (default depth/2)")
        p.add_argument("--stabilization", type=int, default=3, help="trailing ratios that must agree (default 3)")
    if verb == "witness":
        p.add_argument("--horizon", type=int, default=12, help="largest exponent separated (default 12)")
    if verb == "verify-lemmas":
        p.add_argument("--t", type=int, default=2, help="number of levels (default 2)")
        p.add_argument("--k", type=int, default=2, help="largest shift (default 2)")
        p.add_argument("--bound", default="1000", help="window bound, e.g. 1000 or 720! (default 1000)")
        p.add_argument("--sign", choices=["+", "-", "both"], default="both")
        p.add_argument("--kind", choices=["string", "orbit", "both"], default="both")
    if verb == "verify-laws":
        p.add_argument("--seed", type=int, required=True, help="sampler seed (required)")
        p.add_argument("--count", type=int, default=100, help="sample pairs (default 100)")
        p.add_argument("--max-vertices", type=int, default=16, help="largest window (default 16)")
    if verb == "truncate":
        p.add_argument("--dot", help="write a DOT dump of the window to this file")
    return p


_DISPATCH = {
    "classify": _cmd_classify,
    "invariants": _cmd_invariants,
    "entropy-sum": _cmd_entropy_sum,
    "trajectory": _cmd_trajectory,
    "witness": _cmd_witness,
    "verify-lemmas": _cmd_verify_lemmas,
    "verify-laws": _cmd_verify_laws,
    "truncate": _cmd_truncate,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(f"usage: shiftent {{{'|'.join(VERBS)}}} [options]", file=sys.stderr)
        return EXIT_OK if argv else EXIT_USAGE
    verb = argv[0]
    if verb not in VERBS:
        print(f"shiftent: unknown verb {verb!r}", file=sys.stderr)
        print(f"usage: shiftent {{{'|'.join(VERBS)}}} [options]", file=sys.stderr)
        return EXIT_USAGE
    parser = _build_parser(verb)
    try:
        args = parser.parse_args(argv[1:])
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        report, code = _DISPATCH[verb](args)
    except SpecError as exc:
        _emit({"diagnostics": exc.diagnostics}, None)
        print(f"shiftent: invalid input: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except DigitCapError as exc:
        print(f"shiftent: bound infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except UnreadableError as exc:
        print(f"shiftent: {exc}", file=sys.stderr)
        return EXIT_UNREADABLE
    _emit(report, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
