"""Command-line surface.

Subcommands:
  verify example <name>       run the structure-equation and Lax checks on a
                              catalog entry
  verify lemma31 --config F   verify user-supplied forms against a system
  build thm{34,35,36,37} --config F   run a classification constructor
  lax check --config F        zero-curvature check for an example or for
                              user-supplied forms
  ch2 {symmetry,prolong,taylor,solution,residual}   the momentum-form
                              pipeline for the cubic two-component system

Exit codes: 0 success, 1 mathematical failure, 2 usage or config error.
Reports embed the toolkit version and a hash of the effective config, and
identical configs produce byte-identical JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from .classify import (
    HypothesisViolationError,
    Thm34Input,
    Thm36Input,
    build_theorem34,
    build_theorem35,
    build_theorem36,
    build_theorem37,
    catalog,
    catalog_entry,
)
from .forms import AssociatedForms, check_lemma31
from .jetcalc import PdeSystem
from .kernel import Expr, KernelError, parse
from .laxzoo import from_forms, mat_is_zero, mat_strings, zero_curvature_residual

USAGE_ERROR = 2
MATH_FAILURE = 1


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _report_envelope(command: str, config: dict, payload: dict) -> dict:
    return {
        "tool_version": __version__,
        "command": command,
        "config_sha256": _config_hash(config),
        **payload,
    }


def _emit(report: dict, fmt: str, out_path: str | None, table_text: str | None = None):
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = (table_text or json.dumps(report, indent=2, sort_keys=True)) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _config_exprs(config: dict, names: list[str], mn_mode: str = "alias") -> dict[str, Expr]:
    table = config.get("expressions", {})
    missing = [n for n in names if n not in table]
    if missing:
        raise KeyError(f"config lacks expressions: {', '.join(missing)}")
    return {n: parse(table[n], mn_mode=mn_mode) for n in names}


def _int_param(config: dict, name: str, default=None) -> int:
    params = config.get("params", {})
    if name not in params:
        if default is None:
            raise KeyError(f"config lacks parameter '{name}'")
        return default
    return int(params[name])


def _expr_param(config: dict, name: str) -> Expr:
    params = config.get("params", {})
    if name not in params:
        raise KeyError(f"config lacks parameter '{name}'")
    val = params[name]
    if isinstance(val, (int, float)):
        if isinstance(val, float) and not val.is_integer():
            raise ValueError(f"parameter '{name}' must be an integer or expression string")
        return Expr.const(int(val))
    return parse(str(val))


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _forms_payload(forms: AssociatedForms) -> list[list[str]]:
    return [[str(a), str(b)] for a, b in forms.f]


def cmd_verify_example(args) -> int:
    try:
        entry = catalog_entry(args.name)
    except KeyError as err:
        sys.stderr.write(f"error: {err}\n")
        return USAGE_ERROR
    forms = entry.forms
    if args.delta is not None and args.delta != forms.delta:
        forms = AssociatedForms(forms.f, args.delta, forms.eta_row, forms.eta_value)
    report = check_lemma31(forms, entry.system)
    payload = {
        "example": entry.name,
        "delta": forms.delta,
        "passed": report.passed,
        "conditions": [c.as_dict() for c in report.conditions],
    }
    if entry.lax is not None and args.delta is None:
        res = zero_curvature_residual(entry.lax, entry.system)
        zc_ok = mat_is_zero(res)
        payload["zero_curvature"] = "pass" if zc_ok else "fail"
        payload["passed"] = payload["passed"] and zc_ok
    config = {"name": args.name, "delta": args.delta}
    envelope = _report_envelope("verify example", config, payload)
    _emit(envelope, args.format, args.out, report.to_table())
    return 0 if payload["passed"] else MATH_FAILURE


def cmd_verify_lemma31(args) -> int:
    config = _load_config(args.config)
    exprs = _config_exprs(
        config, ["f11", "f12", "f21", "f22", "f31", "f32", "F", "G"]
    )
    delta = _int_param(config, "delta", 1)
    orders = (_int_param(config, "m", 2), _int_param(config, "n", 2))
    sys_ = PdeSystem(orders, exprs["F"], exprs["G"], Expr.const(delta))
    forms = AssociatedForms(
        ((exprs["f11"], exprs["f12"]), (exprs["f21"], exprs["f22"]), (exprs["f31"], exprs["f32"])),
        delta,
    )
    report = check_lemma31(forms, sys_)
    payload = {
        "passed": report.passed,
        "conditions": [c.as_dict() for c in report.conditions],
    }
    envelope = _report_envelope("verify lemma31", config, payload)
    _emit(envelope, args.format, args.out, report.to_table())
    return 0 if report.passed else MATH_FAILURE


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------

_BUILDERS = {
    "thm34": (build_theorem34, ["g", "h", "L", "M"], True),
    "thm35": (build_theorem35, ["g", "h", "L", "M"], True),
    "thm36": (build_theorem36, ["g", "h", "A", "L1", "N1", "M"], False),
    "thm37": (build_theorem37, ["g", "h", "A", "L1", "N1", "M"], False),
}


def cmd_build(args) -> int:
    config = _load_config(args.config)
    builder, expr_names, takes_orders = _BUILDERS[args.theorem]
    exprs = _config_exprs(config, expr_names)
    eta = _expr_param(config, "eta")
    delta = _int_param(config, "delta", 1)
    try:
        if takes_orders:
            orders = (_int_param(config, "m", 2), _int_param(config, "n", 2))
            inp = Thm34Input(
                g=exprs["g"], h=exprs["h"], L=exprs["L"], M=exprs["M"],
                eta=eta, delta=delta, orders=orders,
            )
            sys_, forms = builder(inp)
            lax = None
        else:
            inp = Thm36Input(
                g=exprs["g"], h=exprs["h"], A=exprs["A"], L1=exprs["L1"],
                N1=exprs["N1"], M=exprs["M"], eta=eta, delta=delta,
            )
            sys_, forms, lax = builder(inp)
    except HypothesisViolationError as err:
        sys.stderr.write(f"hypothesis violation: {err.condition}\nresidual: {err.residual}\n")
        return MATH_FAILURE
    payload = {
        "system": {
            "F": str(sys_.F),
            "G": str(sys_.G),
            "orders": list(sys_.orders),
            "delta": delta,
        },
        "forms": _forms_payload(forms),
        "passed": True,
    }
    if lax is not None:
        payload["lax"] = {"X": mat_strings(lax.X), "T": mat_strings(lax.T), "algebra": lax.algebra}
    envelope = _report_envelope(f"build {args.theorem}", config, payload)
    _emit(envelope, args.format, args.out)
    return 0


# ---------------------------------------------------------------------------
# lax
# ---------------------------------------------------------------------------


def cmd_lax_check(args) -> int:
    config = _load_config(args.config)
    if "example" in config:
        entry = catalog_entry(config["example"])
        mf, sys_ = entry.lax, entry.system
        if mf is None:
            sys.stderr.write("error: entry has no stored linear problem\n")
            return USAGE_ERROR
    else:
        exprs = _config_exprs(
            config, ["f11", "f12", "f21", "f22", "f31", "f32", "F", "G"]
        )
        delta = _int_param(config, "delta", 1)
        orders = (_int_param(config, "m", 2), _int_param(config, "n", 2))
        sys_ = PdeSystem(orders, exprs["F"], exprs["G"], Expr.const(delta))
        forms = AssociatedForms(
            ((exprs["f11"], exprs["f12"]), (exprs["f21"], exprs["f22"]),
             (exprs["f31"], exprs["f32"])),
            delta,
        )
        mf = from_forms(forms, config.get("algebra", "sl2"))
    res = zero_curvature_residual(mf, sys_)
    ok = mat_is_zero(res)
    payload = {"passed": ok, "residual": mat_strings(res)}
    envelope = _report_envelope("lax check", config, payload)
    _emit(envelope, args.format, args.out)
    return 0 if ok else MATH_FAILURE


# ---------------------------------------------------------------------------
# ch2
# ---------------------------------------------------------------------------


def cmd_ch2(args) -> int:
    from . import chsym

    config = {
        "subcommand": args.subcommand,
        "u0": getattr(args, "u0", None),
        "eta": getattr(args, "eta", None),
        "eps": getattr(args, "eps", None),
        "grid": getattr(args, "grid", None),
        "rungs": getattr(args, "rungs", None),
    }
    if args.subcommand == "symmetry":
        tup = chsym.nonlocal_symmetry(reduced=True)
        rm, rn = chsym.check_symmetry_residual(tup)
        payload = {
            "residual_m": str(rm),
            "residual_n": str(rn),
            "passed": rm.is_zero() and rn.is_zero(),
        }
        table = f"residual m: {rm}\nresidual n: {rn}"
    elif args.subcommand == "prolong":
        res = chsym.prolongation_residuals()
        payload = {
            "residuals": {k: str(v) for k, v in sorted(res.items())},
            "passed": all(v.is_zero() for v in res.values()),
        }
        table = "\n".join(f"{k}: {v}" for k, v in sorted(res.items()))
    elif args.subcommand == "taylor":
        res = chsym.first_order_expansion_residuals()
        payload = {
            "residuals": {k: str(v) for k, v in sorted(res.items())},
            "passed": all(v.is_zero() for v in res.values()),
        }
        table = "\n".join(f"{k}: {v}" for k, v in sorted(res.items()))
    elif args.subcommand == "solution":
        try:
            sol = chsym.exact_solution(args.u0, args.eta, args.eps)
        except chsym.DomainError as err:
            sys.stderr.write(f"domain error: {err}\n")
            return MATH_FAILURE
        from .numgrid import write_solution_csv

        grid = _parse_grid(args.grid)
        out = args.out or "solution.csv"
        write_solution_csv(out, sol, grid)
        payload = {"passed": True, "k": sol.k, "speed": sol.speed, "csv": out}
        envelope = _report_envelope("ch2 solution", config, payload)
        sys.stdout.write(json.dumps(envelope, indent=2, sort_keys=True) + "\n")
        return 0
    elif args.subcommand == "residual":
        try:
            sol = chsym.exact_solution(args.u0, args.eta, args.eps)
        except chsym.DomainError as err:
            sys.stderr.write(f"domain error: {err}\n")
            return MATH_FAILURE
        import numpy as np

        from .numgrid import (
            SolutionSampler,
            convergence_ladder,
            fd_residual_arrays,
            write_residual_csv,
        )

        grid = _parse_grid(args.grid)
        sampler = SolutionSampler(sol)
        report = convergence_ladder(sampler, grid, rungs=args.rungs)
        # diagnostic: the same profiles read in the untransformed coordinate
        xs, ts = grid.axes(halo_x=3, halo_t=1)
        X, T = np.meshgrid(xs, ts, indexing="ij")
        raw = fd_residual_arrays(sol.u_tilde(X, T), sol.v_tilde(X, T), grid)
        payload = {
            "passed": True,
            "report": report.as_dict(),
            "untransformed_diagnostic": raw.as_dict(),
        }
        if args.format == "csv":
            out = args.out or "residual.csv"
            header = (
                f"u0={sol.u0} eta={sol.eta} eps={sol.eps} k={sol.k} "
                f"grid={args.grid}"
            )
            write_residual_csv(out, sampler, grid, header)
            sys.stdout.write(f"wrote {out}\n")
            return 0
        envelope = _report_envelope("ch2 residual", config, payload)
        _emit(envelope, args.format, args.out)
        return 0
    else:  # pragma: no cover
        return USAGE_ERROR
    envelope = _report_envelope(f"ch2 {args.subcommand}", config, payload)
    _emit(envelope, args.format, args.out, table)
    return 0 if payload["passed"] else MATH_FAILURE


def _parse_grid(text: str):
    from .numgrid import Grid

    try:
        x_part, t_part = text.split(",")
        x_min, x_max, hx = (float(s) for s in x_part.split(":"))
        t_min, t_max, ht = (float(s) for s in t_part.split(":"))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad grid '{text}': {err}") from err
    return Grid(x_min, x_max, t_min, t_max, hx, ht)


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _add_report_flags(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=["json", "table", "csv"], default="table")
    p.add_argument("--out", default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pssurf",
        description="verify and construct PDE systems describing constant-curvature surfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="verification commands")
    verify_sub = p_verify.add_subparsers(dest="what", required=True)
    p_ex = verify_sub.add_parser("example", help="verify a catalog entry")
    p_ex.add_argument("name")
    p_ex.add_argument("--delta", type=int, choices=[1, -1], default=None)
    _add_report_flags(p_ex)
    p_ex.set_defaults(func=cmd_verify_example)
    p_lm = verify_sub.add_parser("lemma31", help="verify supplied forms")
    p_lm.add_argument("--config", required=True)
    _add_report_flags(p_lm)
    p_lm.set_defaults(func=cmd_verify_lemma31)

    p_build = sub.add_parser("build", help="run a classification constructor")
    build_sub = p_build.add_subparsers(dest="theorem", required=True)
    for name in _BUILDERS:
        p_b = build_sub.add_parser(name)
        p_b.add_argument("--config", required=True)
        _add_report_flags(p_b)
        p_b.set_defaults(func=cmd_build, theorem=name)

    p_lax = sub.add_parser("lax", help="linear-problem checks")
    lax_sub = p_lax.add_subparsers(dest="what", required=True)
    p_lc = lax_sub.add_parser("check")
    p_lc.add_argument("--config", required=True)
    _add_report_flags(p_lc)
    p_lc.set_defaults(func=cmd_lax_check)

    p_ch2 = sub.add_parser("ch2", help="cubic two-component pipeline")
    ch2_sub = p_ch2.add_subparsers(dest="subcommand", required=True)
    for name in ("symmetry", "prolong", "taylor"):
        p_c = ch2_sub.add_parser(name)
        _add_report_flags(p_c)
        p_c.set_defaults(func=cmd_ch2, subcommand=name)
    p_sol = ch2_sub.add_parser("solution")
    p_sol.add_argument("--u0", type=float, required=True)
    p_sol.add_argument("--eta", type=float, required=True)
    p_sol.add_argument("--eps", type=float, default=1.0)
    p_sol.add_argument("--grid", default="-8:8:0.25,-1:1:0.125")
    _add_report_flags(p_sol)
    p_sol.set_defaults(func=cmd_ch2, subcommand="solution")
    p_res = ch2_sub.add_parser("residual")
    p_res.add_argument("--u0", type=float, required=True)
    p_res.add_argument("--eta", type=float, required=True)
    p_res.add_argument("--eps", type=float, default=1.0)
    p_res.add_argument("--grid", default="-8:8:0.03125,-1:1:0.03125")
    p_res.add_argument("--rungs", type=int, default=3)
    _add_report_flags(p_res)
    p_res.set_defaults(func=cmd_ch2, subcommand="residual")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (KernelError, KeyError, ValueError, OSError, json.JSONDecodeError) as err:
        sys.stderr.write(f"error: {err}\n")
        return USAGE_ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
