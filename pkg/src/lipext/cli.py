"""Command-line interface: ``lipext {extend,verify,instance}``.

File formats (0-based indices, comma separated, ``#`` lines ignored):

* matrix: n rows of n distances
* points: one point per row, d columns
* graph:  rows ``u,v,w``; the vertex count is ``1 + max index``
* values: rows ``index,value``; the listed indices form the subset C

Exit codes: 0 success, 1 some requested claim failed, 2 setup error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import LipextError
from .extension import VARIANTS, clamp_bounded, extend
from .lipconst import lip_global, profile
from .metric import from_graph, from_matrix, from_points, subset_function
from .verification import (
    CLAIM_IDS,
    REPORT_NOTE,
    Instance,
    applicable_claims,
    check_claims,
    example21,
    example22,
    random_instance,
    slope_consistency,
    t3,
)

EXIT_OK, EXIT_CLAIM, EXIT_SETUP = 0, 1, 2

BUILTINS = ("t3", "example21", "example22")

_claim_schema = {
    "type": "object",
    "required": ["pass", "margin", "witness", "vacuous"],
    "properties": {
        "pass": {"type": "boolean"},
        "margin": {"type": ["number", "null"]},
        "witness": {"type": ["array", "null"], "items": {"type": "integer"}},
        "vacuous": {"type": "boolean"},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["instance", "variant", "params", "note", "tol", "passed", "claims"],
    "properties": {
        "instance": {"type": "object"},
        "variant": {"enum": list(VARIANTS)},
        "params": {"type": "object"},
        "note": {"type": "string"},
        "tol": {"type": "number"},
        "passed": {"type": "boolean"},
        "claims": {
            "type": "object",
            "propertyNames": {"enum": list(CLAIM_IDS)},
            "additionalProperties": _claim_schema,
        },
        "profiles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["x", "radius", "f", "g"],
                "properties": {
                    "x": {"type": "integer"},
                    "radius": {"type": "number"},
                    "f": {"type": "number"},
                    "g": {"type": "number"},
                },
            },
        },
        "contrast": {"type": "object"},
    },
}


class SetupError(Exception):
    pass


def _load_csv(path, columns=None):
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2, dtype=float)
    except OSError as exc:
        raise SetupError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise SetupError(f"malformed CSV {path}: {exc}") from None
    if columns is not None and data.size and data.shape[1] != columns:
        raise SetupError(f"{path}: expected {columns} columns, got {data.shape[1]}")
    return data


def _parse_kv(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise SetupError(f"--random expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def load_instance(args) -> Instance:
    if args.random is not None:
        kv = _parse_kv(args.random)
        unknown = set(kv) - {"n", "c", "geometry"}
        if unknown:
            raise SetupError(f"unknown --random keys {sorted(unknown)}; use n, c, geometry")
        return random_instance(args.seed, int(kv.get("n", 40)), int(kv.get("c", 20)),
                               kv.get("geometry", "auto"))
    if args.builtin == "t3":
        return t3()
    if args.builtin == "example21":
        return example21(args.n if args.n is not None else 20, args.samples)
    if args.builtin == "example22":
        return example22(args.h)
    if args.input is None or args.values is None:
        raise SetupError("give a built-in instance, --random, or both --input and --values")
    if args.space == "matrix":
        space = from_matrix(_load_csv(args.input))
    elif args.space == "points":
        space = from_points(_load_csv(args.input))
    else:
        edges = _load_csv(args.input, columns=3)
        if edges.size == 0:
            raise SetupError(f"{args.input}: empty edge list")
        n = int(edges[:, :2].max()) + 1
        space = from_graph(n, [(int(u), int(v), w) for u, v, w in edges])
    vals = _load_csv(args.values, columns=2)
    if vals.size == 0:
        raise SetupError(f"{args.values}: no values")
    idx = vals[:, 0]
    if np.any(idx != np.round(idx)):
        raise SetupError(f"{args.values}: indices must be integers")
    subset = subset_function(space, idx.astype(np.int64), vals[:, 1])
    return Instance(Path(args.input).name, space, subset)


def _run_extension(inst: Instance, args):
    anchor = args.anchor if args.anchor is not None else inst.anchor
    res = extend(args.variant, inst.space, inst.subset, args.epsilon, anchor)
    if args.clamp:
        res = clamp_bounded(res, inst.subset)
    return res


def _emit(text: str, output):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _instance_info(inst: Instance) -> dict:
    return {"name": inst.name, "n": inst.space.n, "c_size": inst.subset.size,
            **{k: v for k, v in inst.params.items()}}


def run_extend(args) -> int:
    inst = load_instance(args)
    res = _run_extension(inst, args)
    if args.format == "csv":
        lines = ["index,f"] + [f"{i},{float(v)!r}" for i, v in enumerate(res.f)]
        _emit("\n".join(lines) + "\n", args.output)
    else:
        doc = {
            "instance": _instance_info(inst),
            "variant": res.variant,
            "params": res.params.as_dict(),
            "f": [float(v) for v in res.f],
            "minimizer": [int(m) for m in res.minimizer],
            "lipschitz_constant_of_f": lip_global(inst.space, np.arange(inst.space.n), res.f),
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


def _parse_radii(spec):
    if spec is None or spec == "auto":
        return None
    try:
        radii = sorted({float(r) for r in spec.split(",") if r.strip()})
    except ValueError:
        raise SetupError(f"--radii expects 'auto' or a comma list of numbers, got {spec!r}") from None
    if not radii or radii[0] <= 0:
        raise SetupError("--radii must be positive")
    return np.array(radii)


def _contrast_example22(inst: Instance, args, radius: float) -> dict:
    m = int(round(1.0 / inst.params["h"]))
    x0, x1 = m, 2 * m
    anchor = args.anchor if args.anchor is not None else inst.anchor
    allX = np.arange(inst.space.n)
    out = {"x0": x0, "x1": x1, "radius": radius}
    r = np.array([radius])
    for variant, x, kind in (("slope", x0, "slope"), ("mcshane", x0, "slope"),
                             ("descending", x1, "descending")):
        res = extend(variant, inst.space, inst.subset, args.epsilon, anchor)
        out[f"{variant}_entry"] = float(profile(inst.space, allX, res.f, x, r, kind).constants[0])
        if res.seq is not None:
            # slope of the penalty on (eps_-2, eps_-1), below the unit gap
            out["penalty_slope_bound"] = 3.0 * res.params.L * res.seq.ratio(-1)
    return out


def _contrast_example21(inst: Instance) -> dict:
    rows = []
    C, g = inst.subset.indices, inst.subset.values
    N = inst.params["N"]
    for n in range(2, min(N, 10) + 1):
        r = np.array([(n + 1) / n**2 + 1e-6])
        rows.append({
            "n": n,
            "radius": float(r[0]),
            "slope": float(profile(inst.space, C, g, 0, r, "slope").constants[0]),
            "asymptotic": float(profile(inst.space, C, g, 0, r, "asymptotic").constants[0]),
            "expected_slope": 1.0 / (n + 1),
        })
    return {"x": 0, "rows": rows}


def run_verify(args) -> int:
    inst = load_instance(args)
    res = _run_extension(inst, args)
    radii = _parse_radii(args.radii)
    if args.claims in (None, "all"):
        which = applicable_claims(res)
    else:
        which = tuple(c.strip() for c in args.claims.split(",") if c.strip())
    report = check_claims(inst.space, inst.subset, res, which, radii=radii)
    doc = {
        "instance": _instance_info(inst),
        "variant": res.variant,
        "params": res.params.as_dict(),
        "note": REPORT_NOTE,
        "tol": report.tol,
        "passed": report.passed,
        "claims": report.to_dict(),
    }
    prof_radii = radii
    if prof_radii is None and inst.name == "example22":
        prof_radii = np.array([0.05])
    if prof_radii is not None:
        _, pairs = slope_consistency(inst.space, inst.subset, res, prof_radii,
                                     which=["profile_lower_bound"])
        doc["profiles"] = [
            {"x": x, "radius": float(rr), "f": float(a), "g": float(b)}
            for x, (pf, pg) in pairs.items()
            for rr, a, b in zip(pf.radii, pf.constants, pg.constants)
        ]
    if inst.name == "example22" and args.random is None:
        doc["contrast"] = _contrast_example22(inst, args, float(prof_radii[0]))
    elif inst.name == "example21" and args.random is None:
        doc["contrast"] = _contrast_example21(inst)
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK if report.passed else EXIT_CLAIM


def run_instance(args) -> int:
    inst = load_instance(args)
    out = Path(args.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    if inst.space.coords is not None:
        kind, rows = "points", inst.space.coords
    else:
        kind, rows = "matrix", inst.space.dist
    space_path = out / f"{kind}.csv"
    space_path.write_text("".join(",".join(repr(float(v)) for v in row) + "\n" for row in rows))
    values_path = out / "values.csv"
    values_path.write_text("".join(f"{int(i)},{float(v)!r}\n"
                                   for i, v in zip(inst.subset.indices, inst.subset.values)))
    anchor = f" --anchor {inst.anchor!r}" if inst.anchor is not None else ""
    print(f"--space {kind} --input {space_path} --values {values_path}{anchor}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipext", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(p):
        p.add_argument("builtin", nargs="?", choices=BUILTINS,
                       help="built-in instance (omit to read files)")
        p.add_argument("--space", choices=("matrix", "points", "graph"), default="matrix")
        p.add_argument("--input", help="space file")
        p.add_argument("--values", help="subset values file (index,value rows)")
        p.add_argument("--h", type=float, default=0.01, help="grid step for example22")
        p.add_argument("--n", type=int, default=None, help="segment count for example21")
        p.add_argument("--samples", type=int, default=5, help="samples per segment (example21)")
        p.add_argument("--random", nargs="*", metavar="KEY=VAL",
                       help="random instance, keys n, c, geometry")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", help="output path (default stdout)")

    def add_run(p):
        p.add_argument("--variant", choices=VARIANTS, default="slope")
        p.add_argument("--epsilon", type=float, default=0.5)
        p.add_argument("--anchor", type=float, default=None,
                       help="eps_0 (default: the instance's own, else the diameter)")
        p.add_argument("--clamp", action="store_true", help="clamp f to [min g, max g]")

    p = sub.add_parser("extend", help="extend g to the whole space")
    add_source(p)
    add_run(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=run_extend)

    p = sub.add_parser("verify", help="extend and certify the claims, JSON report")
    add_source(p)
    add_run(p)
    p.add_argument("--claims", default="all", help="comma list of claim ids or 'all'")
    p.add_argument("--radii", default="auto", help="comma list of radii or 'auto'")
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=run_verify)

    p = sub.add_parser("instance", help="write a generated instance to files")
    add_source(p)
    p.set_defaults(func=run_instance)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LipextError, SetupError) as exc:
        witness = getattr(exc, "witness", None)
        extra = f" [witness {witness}]" if witness is not None else ""
        print(f"error: {type(exc).__name__}: {exc}{extra}", file=sys.stderr)
        return EXIT_SETUP
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SETUP


if __name__ == "__main__":
    sys.exit(main())
