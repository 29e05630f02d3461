"""Command-line front end.

Thin wrappers over the library: generate analytic test fields, apply
maximal operators, truncate, run verification sweeps, and merge JSON
reports into plot-ready CSV tables.  No numerics live here.

Exit codes: 0 success, 1 validation error, 2 I/O or format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .elliptic import good_bad_split
from .exponents import ExponentState, exponent_alpha, exponent_iterate, q3_feasibility
from .field import (
    FieldFormatError,
    GridSpec,
    OrliczWeight,
    ScalarField,
    VectorField,
    read_field,
    write_field,
)
from .functionals import QuasiconcaveFunctional, null_lagrangian_check
from .generators import gen_p_harmonic_radial, gen_radial_map, gen_sawtooth
from .inequalities import orlicz_conclusion_check, verify_consequently, verify_intermediary
from .maximal import (
    RadiusSet,
    aniso_maximal,
    composed_maximal,
    directional_maximal,
    hl_maximal,
    weak_type_constants,
)
from .reports import make_report, read_report, reports_to_csv, write_report
from .truncate import (
    ConvexPolytope,
    TruncationParams,
    asym_truncate,
    asym_truncate_zero_boundary,
    lipschitz_truncate,
)


class CliError(Exception):
    """Invalid command line or parameters (exit status 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _radii(spec: GridSpec, mode: str) -> RadiusSet:
    if mode == "dyadic":
        return RadiusSet.dyadic(spec)
    if mode == "full":
        return RadiusSet.full(spec)
    raise CliError(f"unknown radii mode {mode!r}")


def _functional(name: str) -> QuasiconcaveFunctional:
    if name == "det2":
        return QuasiconcaveFunctional.det2()
    if name == "det3":
        return QuasiconcaveFunctional.det3()
    if name.startswith("neg-ell1:"):
        return QuasiconcaveFunctional.neg_ell1_power(float(name.split(":", 1)[1]))
    raise CliError(f"unknown functional {name!r} (det2, det3, neg-ell1:P)")


def _lambdas(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise CliError(f"bad lambda list {text!r}: {exc}") from exc
    if not vals or any(v <= 0 for v in vals):
        raise CliError("lambdas must be a comma list of positive numbers")
    return vals


def _save_scalar(u: ScalarField, prefix: str, kind: str, params: dict) -> None:
    path = f"{prefix}.trnc"
    write_field(u, path)
    meta = {"kind": kind, "params": params, "components": [os.path.basename(path)]}
    with open(f"{prefix}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _save_vector(u: VectorField, prefix: str, kind: str, params: dict) -> None:
    names = []
    for i, comp in enumerate(u.components):
        path = f"{prefix}_c{i}.trnc"
        write_field(comp, path)
        names.append(os.path.basename(path))
    meta = {"kind": kind, "params": params, "components": names}
    with open(f"{prefix}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load(prefix: str):
    """Load a scalar or vector field saved under a prefix, or a bare file."""
    if os.path.isfile(prefix):
        return read_field(prefix), {}
    meta_path = f"{prefix}.json"
    if os.path.isfile(meta_path):
        with open(meta_path) as fh:
            meta = json.load(fh)
        base = os.path.dirname(prefix)
        comps = [read_field(os.path.join(base, name)) for name in meta["components"]]
        if len(comps) == 1:
            return comps[0], meta
        return VectorField(comps[0].spec, tuple(comps)), meta
    if os.path.isfile(f"{prefix}.trnc"):
        return read_field(f"{prefix}.trnc"), {}
    raise FileNotFoundError(f"no field found at {prefix!r}")


def _load_scalar(prefix: str) -> ScalarField:
    field, _ = _load(prefix)
    if isinstance(field, VectorField):
        raise CliError(f"{prefix!r} holds a vector field where a scalar is required")
    return field


def _load_vector(prefix: str) -> VectorField:
    field, _ = _load(prefix)
    if isinstance(field, ScalarField):
        raise CliError(f"{prefix!r} holds a scalar field where a map is required")
    return field


def _trig_psi(n: int, seed: int, modes: int, amp: float) -> VectorField:
    rng = np.random.default_rng(seed)
    spec = GridSpec((n, n), (1.0 / n, 1.0 / n))
    xs = np.arange(n) / n
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    comps = []
    for _ in range(2):
        v = np.zeros((n, n))
        for _ in range(modes):
            kx, ky = rng.integers(1, 4, 2)
            p1, p2 = rng.uniform(0.0, 2.0 * np.pi, 2)
            v += rng.uniform(0.3, 1.0) * np.sin(2 * np.pi * kx * xx + p1) * np.cos(
                2 * np.pi * ky * yy + p2
            )
        comps.append(ScalarField(spec, amp * v))
    return VectorField(spec, tuple(comps))


def build_parser() -> _Parser:
    parser = _Parser(prog="liptrunc", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an analytic test field")
    gen.add_argument("--kind", required=True, choices=["radial", "sawtooth", "p-harmonic"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--beta", type=float, default=0.5)
    gen.add_argument("--r0", type=float, default=0.1)
    gen.add_argument("--r1", type=float, default=1.0)
    gen.add_argument("--spike-slope", type=float, default=9.0)
    gen.add_argument("--base-slope", type=float, default=1.0)
    gen.add_argument("--spike-frac", type=float, default=0.1)
    gen.add_argument("--p", type=float, default=3.0)
    gen.add_argument("--dim", type=int, default=2)

    mx = sub.add_parser("maximal", help="apply a maximal operator")
    mx.add_argument("--op", required=True, choices=["M", "Mi", "N", "composed"])
    mx.add_argument("--in", dest="inp", required=True)
    mx.add_argument("--out", required=True)
    mx.add_argument("--axis", type=int, default=0)
    mx.add_argument("--radii", default="dyadic", choices=["dyadic", "full"])

    tr = sub.add_parser("truncate", help="Lipschitz truncation")
    tr.add_argument("--in", dest="inp", required=True)
    tr.add_argument("--out", required=True)
    tr.add_argument("--lambda", dest="lam", type=float, required=True)
    tr.add_argument("--mu", type=float)
    tr.add_argument("--eps", type=float, default=0.5)
    tr.add_argument("--inflation", type=float)
    tr.add_argument("--zero-boundary", dest="polytope")
    tr.add_argument("--radii", default="dyadic", choices=["dyadic", "full"])
    tr.add_argument("--report")

    ver = sub.add_parser("verify", help="verification sweeps")
    vsub = ver.add_subparsers(dest="check", required=True)

    con = vsub.add_parser("consequently")
    con.add_argument("--in", dest="inp", required=True)
    con.add_argument("--functional", default="det2")
    con.add_argument("--lambdas", required=True)
    con.add_argument("--radii", default="dyadic", choices=["dyadic", "full"])
    con.add_argument("--report")

    itm = vsub.add_parser("intermediary")
    itm.add_argument("--in", dest="inp", required=True)
    itm.add_argument("--functional", default="det2")
    itm.add_argument("--lambdas", required=True)
    itm.add_argument("--level-constant", type=float, default=1.0)
    itm.add_argument("--report")

    orl = vsub.add_parser("orlicz")
    orl.add_argument("--in", dest="inp", required=True)
    orl.add_argument("--functional", default="det2")
    orl.add_argument("--p", type=float, required=True)
    orl.add_argument("--alpha", type=float, default=0.0)
    orl.add_argument("--coarse")
    orl.add_argument("--report")

    t4 = vsub.add_parser("t4")
    t4.add_argument("--in", dest="inp", required=True)
    t4.add_argument("--lambda", dest="lam", type=float, required=True)
    t4.add_argument("--mu", type=float, required=True)
    t4.add_argument("--eps", type=float, default=0.5)
    t4.add_argument("--radii", default="dyadic", choices=["dyadic", "full"])
    t4.add_argument("--report")

    nl = vsub.add_parser("null-lagrangian")
    nl.add_argument("--functional", default="det2")
    nl.add_argument("--n", type=int, default=128)
    nl.add_argument("--seed", type=int, default=0)
    nl.add_argument("--modes", type=int, default=3)
    nl.add_argument("--amp", type=float, default=0.08)
    nl.add_argument("--report")

    wt = vsub.add_parser("weak-type")
    wt.add_argument("--in", dest="inp", required=True)
    wt.add_argument("--op", default="M", choices=["M", "N"])
    wt.add_argument("--lambdas", required=True)
    wt.add_argument("--eps", type=float, default=0.5)
    wt.add_argument("--radii", default="dyadic", choices=["dyadic", "full"])
    wt.add_argument("--report")

    gb = vsub.add_parser("good-bad")
    gb.add_argument("--in", dest="inp", required=True)
    gb.add_argument("--lambda", dest="lam", type=float, required=True)
    gb.add_argument("--mu", type=float, required=True)
    gb.add_argument("--radii", default="dyadic", choices=["dyadic", "full"])
    gb.add_argument("--report")

    ex = vsub.add_parser("exponents")
    ex.add_argument("--p", type=float, required=True)
    ex.add_argument("--r", type=float, required=True)
    ex.add_argument("--q", type=float, required=True)
    ex.add_argument("--delta", type=float, required=True)
    ex.add_argument("--eps", type=float)
    ex.add_argument("--report")

    rp = sub.add_parser("report", help="merge JSON reports into a CSV table")
    rp.add_argument("inputs", nargs="*")
    rp.add_argument("--out", required=True)

    return parser


def _cmd_gen(args, command: str) -> int:
    if args.kind == "radial":
        u, analytics = gen_radial_map(args.beta, args.n, (args.r0, args.r1))
        params = {"kind": "radial", "beta": args.beta, "n": args.n,
                  "r0": args.r0, "r1": args.r1}
        params["integral_det"] = analytics.integral_det()
        params["integral_grad_sq"] = analytics.integral_grad_sq()
        _save_vector(u, args.out, "radial", params)
    elif args.kind == "sawtooth":
        u, analytics = gen_sawtooth(args.spike_slope, args.base_slope,
                                    args.spike_frac, args.n)
        params = {"kind": "sawtooth", "spike_slope": args.spike_slope,
                  "base_slope": args.base_slope, "spike_frac": args.spike_frac,
                  "n": args.n, "periods": analytics.periods}
        _save_scalar(u, args.out, "sawtooth", params)
    else:
        u, analytics = gen_p_harmonic_radial(args.p, args.dim, args.n,
                                             (args.r0, args.r1))
        params = {"kind": "p-harmonic", "p": args.p, "dim": args.dim,
                  "n": args.n, "r0": args.r0, "r1": args.r1,
                  "lr_threshold": analytics.lr_threshold()}
        _save_scalar(u, args.out, "p-harmonic", params)
    print(f"wrote {args.out}")
    return 0


def _cmd_maximal(args, command: str) -> int:
    u = _load_scalar(args.inp)
    radii = _radii(u.spec, args.radii)
    if args.op == "M":
        out = hl_maximal(u, radii)
    elif args.op == "Mi":
        out = directional_maximal(u, args.axis, radii)
    elif args.op == "N":
        out = aniso_maximal(u, radii)
    else:
        out = composed_maximal(u, radii)
    _save_scalar(out, args.out, f"maximal-{args.op}",
                 {"op": args.op, "axis": args.axis, "radii": args.radii})
    print(f"wrote {args.out}")
    return 0


def _cmd_truncate(args, command: str) -> int:
    u = _load_scalar(args.inp)
    radii = _radii(u.spec, args.radii)
    mu = args.mu if args.mu is not None else args.lam
    params = TruncationParams(lam=args.lam, mu=mu, eps=args.eps,
                              inflation=args.inflation)
    if args.polytope:
        with open(args.polytope) as fh:
            domain = ConvexPolytope.from_json(fh.read())
        result = asym_truncate_zero_boundary(u, domain, params, radii)
    elif args.mu is None:
        result = lipschitz_truncate(u, args.lam, radii, inflation=args.inflation)
    else:
        result = asym_truncate(u, params, radii)
    _save_scalar(result.field, args.out, "truncated",
                 {"lam": args.lam, "mu": mu, "eps": args.eps, "radii": args.radii})
    if args.report:
        report = make_report("truncate", vars(args) | {"mu": mu},
                             result.to_report(), command)
        write_report(report, args.report)
    print(f"wrote {args.out} (kept {int(result.kept_mask.sum())} cells, "
          f"agrees={result.agrees})")
    return 0


def _emit(args, report: dict, summary: str) -> int:
    if getattr(args, "report", None):
        write_report(report, args.report)
        print(f"wrote {args.report}")
    print(summary)
    return 0


def _cmd_verify(args, command: str) -> int:
    if args.check == "consequently":
        u = _load_vector(args.inp)
        rep = verify_consequently(u, _functional(args.functional),
                                  _lambdas(args.lambdas),
                                  _radii(u.spec, args.radii))
        rep = make_report("consequently", {"functional": args.functional}, rep, command)
        return _emit(args, rep, f"max ratio {rep['max_ratio']:.6g}")
    if args.check == "intermediary":
        u = _load_vector(args.inp)
        rep = verify_intermediary(u, _functional(args.functional),
                                  _lambdas(args.lambdas), args.level_constant)
        rep = make_report("intermediary", {"functional": args.functional}, rep, command)
        return _emit(args, rep, f"max ratio {rep['max_ratio']:.6g}")
    if args.check == "orlicz":
        u = _load_vector(args.inp)
        coarse = _load_vector(args.coarse) if args.coarse else None
        rep = orlicz_conclusion_check(u, _functional(args.functional),
                                      OrliczWeight(args.p, args.alpha), coarse)
        rep = make_report("orlicz", {"functional": args.functional,
                                     "p": args.p, "alpha": args.alpha}, rep, command)
        return _emit(args, rep,
                     f"hypotheses {rep['hypothesis_gradient']:.6g}, "
                     f"{rep['hypothesis_negative']:.6g}; "
                     f"conclusion {rep['conclusion']:.6g}")
    if args.check == "t4":
        u = _load_scalar(args.inp)
        radii = _radii(u.spec, args.radii)
        params = TruncationParams(lam=args.lam, mu=args.mu, eps=args.eps)
        result = asym_truncate(u, params, radii)
        payload = result.to_report()
        payload["t4_ratio"] = (payload["t4_lhs"] / payload["t4_rhs"]
                               if payload["t4_rhs"] else 0.0)
        rep = make_report("t4", {"lam": args.lam, "mu": args.mu, "eps": args.eps},
                          payload, command)
        return _emit(args, rep,
                     f"lhs {payload['t4_lhs']:.6g} rhs {payload['t4_rhs']:.6g}")
    if args.check == "null-lagrangian":
        F = _functional(args.functional)
        rows = {"n": [], "lhs": [], "rhs": [], "defect": []}
        for n in (args.n // 2, args.n):
            psi = _trig_psi(n, args.seed, args.modes, args.amp)
            lhs, rhs = null_lagrangian_check(F, np.eye(2), psi)
            rows["n"].append(n)
            rows["lhs"].append(lhs)
            rows["rhs"].append(rhs)
            rows["defect"].append(abs(lhs - rhs))
        ratio = (rows["defect"][0] / rows["defect"][1]
                 if rows["defect"][1] > 0 else float("inf"))
        payload = rows | {"convergence_ratio": ratio}
        rep = make_report("null-lagrangian",
                          {"functional": args.functional, "n": args.n,
                           "seed": args.seed}, payload, command)
        return _emit(args, rep,
                     f"defect {rows['defect'][1]:.3e}, two-grid ratio {ratio:.2f}")
    if args.check == "weak-type":
        u = _load_scalar(args.inp)
        rep = weak_type_constants(u, args.op, _lambdas(args.lambdas), args.eps,
                                  _radii(u.spec, args.radii))
        rep = make_report("weak-type", {"op": args.op, "eps": args.eps}, rep, command)
        return _emit(args, rep, f"max ratio {rep['max_ratio']:.6g}")
    if args.check == "good-bad":
        u = _load_scalar(args.inp)
        good, bad = good_bad_split(u, args.lam, args.mu, _radii(u.spec, args.radii))
        vol = u.spec.cell_volume
        payload = {"good_measure": float(good.sum()) * vol,
                   "bad_measure": float(bad.sum()) * vol}
        rep = make_report("good-bad", {"lam": args.lam, "mu": args.mu}, payload, command)
        return _emit(args, rep, f"bad measure {payload['bad_measure']:.6g}")
    if args.check == "exponents":
        alpha = exponent_alpha(args.r, args.q)
        eps = args.eps if args.eps is not None else args.r - 1.0
        traj, kstar = exponent_iterate(args.r, args.q, args.delta)
        feas = []
        for k in range(1, len(traj)):
            a = exponent_alpha(traj[k - 1], args.q)
            state = ExponentState(p=args.p, r=traj[k - 1], q=args.q, s=traj[k],
                                  eps=eps, alpha=a)
            feas.append(q3_feasibility(state)["feasible"])
        payload = {"alpha": alpha, "s": traj, "k_star": kstar,
                   "steps_feasible": feas}
        rep = make_report("exponents",
                          {"p": args.p, "r": args.r, "q": args.q,
                           "delta": args.delta, "eps": eps}, payload, command)
        return _emit(args, rep, f"k* = {kstar}, s_k -> {traj[-1]:.6g}")
    raise CliError(f"unknown verify subcommand {args.check!r}")


def _cmd_report(args, command: str) -> int:
    reports = [read_report(p) for p in args.inputs]
    reports_to_csv(reports, args.out)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    command = "liptrunc " + " ".join(argv)
    try:
        args = parser.parse_args(argv)
        if args.command == "gen":
            return _cmd_gen(args, command)
        if args.command == "maximal":
            return _cmd_maximal(args, command)
        if args.command == "truncate":
            return _cmd_truncate(args, command)
        if args.command == "verify":
            return _cmd_verify(args, command)
        if args.command == "report":
            return _cmd_report(args, command)
        raise CliError(f"unknown command {args.command!r}")
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, FieldFormatError, json.JSONDecodeError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
