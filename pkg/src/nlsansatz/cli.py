"""Command-line driver: catalog, verify, solve, wave, export.

Runs are reproducible: configuration comes from flags or a JSON config
file (schema 1, unknown keys rejected), reports carry no timestamps, and
identical config + seed gives byte-identical output files.

Exit codes: 0 pass, 1 verification fail, 2 config error, 3 numerical
blow-up.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import catalog, reports, solutions, verify, wave
from .catalog import Nonlinearity
from .errors import (
    BlowUpError,
    CertificationError,
    ConfigError,
    DomainError,
    NlsAnsatzError,
)
from .numerics import GridSpec, nls_residual, wave_residual

SCHEMA_VERSION = 1

#: convergence-ratio window for order-2 differencing under h-halving
RATIO_WINDOW = (3.2, 4.8)

_FAMILY_NOTES = {
    "I.1": ("S = 0", "T(t) = 1/(t+A1) + 1/(t+A2) + 1/(t+A3)", "t = -A1, -A2, -A3"),
    "I.2": ("S = 0", "T(t) = 1/(t+B1) + 1/(t+B2)", "t = -B1, -B2"),
    "I.3": ("S = 0", "T(t) = 1/(t + c1/2)", "t = -c1/2"),
    "I.4": ("S = 0", "T = 0", "none"),
    "II.1": ("S(w) = -4a w + 2b", "T = 0", "none"),
    "II.2": ("S(w) = 2 alpha + c^2/w^2", "T = 0", "axis x1=x2=0; plane x2=0"),
    "II.3": ("S(w) = 2 beta", "T = 0", "origin |x| = 0"),
}


def _parse_params(text: str) -> dict:
    out = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ConfigError(f"parameter {chunk!r} is not of the form name=value")
        key, _, val = chunk.partition("=")
        try:
            out[key.strip()] = float(val)
        except ValueError as exc:
            raise ConfigError(f"parameter {key!r} has non-numeric value {val!r}") from exc
    return out


def _parse_grid_flag(text: str, h: float) -> GridSpec:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --grid value {text!r}") from exc
    if len(vals) % 3 != 0 or len(vals) < 6:
        raise ConfigError("--grid needs 2(n+1) range values followed by n+1 counts")
    naxes = len(vals) // 3
    ranges = [(vals[2 * i], vals[2 * i + 1]) for i in range(naxes)]
    counts = tuple(int(v) for v in vals[2 * naxes :])
    return GridSpec(ranges[0], tuple(ranges[1:]), counts, h=h)


def _grid_from_config(cfg: dict, h: float) -> GridSpec:
    known = {"t_range", "x_ranges", "counts", "h", "exclusion_radius"}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
    return GridSpec(
        tuple(cfg["t_range"]),
        tuple(tuple(r) for r in cfg["x_ranges"]),
        tuple(int(c) for c in cfg["counts"]),
        h=float(cfg.get("h", h)),
        exclusion_radius=cfg.get("exclusion_radius"),
    )


def default_grid(n: int, h: float) -> GridSpec:
    counts = (6, 6, 6, 6) if n == 3 else (9, 11, 11)
    return GridSpec((0.0, 1.0), ((0.3, 1.3),) * n, counts, h=h)


def grid_for_spec(spec, h: float) -> GridSpec:
    """Default grid, with the t-range shifted a unit clear of any t-pole."""
    t_lo = 0.0
    if spec.poles:
        t_lo = max(0.0, 1.0 - min(spec.poles))
    g = default_grid(spec.n, h)
    return GridSpec((t_lo, t_lo + 1.0), g.x_ranges, g.counts, h=h)


def default_wave_grid(h: float) -> GridSpec:
    return GridSpec((2.0, 3.0), ((0.1, 0.9),) * 3, (6, 6, 6, 6), h=h)


def _nonlinearity_from_flag(text: str) -> Nonlinearity:
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind not in ("power", "log", "none"):
        raise ConfigError(f"unknown nonlinearity {kind!r} (use power|log|none)")
    cfg = {"kind": kind}
    if rest:
        cfg.update(_parse_params(rest))
    return Nonlinearity.from_config(cfg)


def _load_config(path, command: str, allowed: set) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"config schema must be {SCHEMA_VERSION}")
    if "command" in cfg and cfg["command"] != command:
        raise ConfigError(f"config is for command {cfg['command']!r}, not {command!r}")
    unknown = set(cfg) - allowed - {"schema", "command"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _ratio_ok(ratio) -> bool:
    return ratio is None or RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1]


def _emit(payload: dict, as_json: bool, text: str = "") -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif text:
        print(text)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def _catalog_payload(family: str | None) -> dict:
    names = [family] if family else list(catalog.FAMILIES)
    entries = []
    for name in names:
        if name not in catalog.FAMILIES:
            raise ConfigError(f"unknown family {name!r}")
        dims, params = catalog.FAMILIES[name]
        defaults = catalog.default_params(name)
        spec = catalog.make_family(name)
        s_form, t_form, surfaces = _FAMILY_NOTES[name]
        entries.append(
            {
                "family": name,
                "dimensions": list(dims),
                "parameters": defaults,
                "profile": {
                    "Z": spec.profile.Z,
                    "N": spec.profile.N,
                    "S": s_form,
                    "T": t_form,
                },
                "singular_surfaces": surfaces,
                "config": catalog.spec_config(spec),
            }
        )
    return {"schema": SCHEMA_VERSION, "families": entries}


def cmd_catalog(args) -> int:
    payload = _catalog_payload(args.family)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    for e in payload["families"]:
        pr = e["profile"]
        nstr = "" if pr["N"] is None else f", N={pr['N']}"
        print(f"{e['family']:5s} n in {e['dimensions']}  Z={pr['Z']}{nstr}")
        print(f"      params:   {e['parameters']}")
        print(f"      profile:  {pr['S']};  {pr['T']}")
        print(f"      singular: {e['singular_surfaces']}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_one(family: str, args, cfg: dict) -> dict:
    n = cfg.get("n", args.n)
    user_params = dict(cfg.get("params", {}))
    if args.params:
        user_params.update(_parse_params(args.params))
    params = {**catalog.default_params(family), **user_params}
    spec = catalog.make_family(family, n, params)

    control = cfg.get("negative_control", args.negative_control)
    if control == "phase":
        spec = catalog.with_phase_perturbation(spec)
    elif control == "omega":
        spec = catalog.with_broken_omega(spec)
    elif control not in (None, "none"):
        raise ConfigError(f"unknown negative control {control!r}")

    h = float(cfg.get("h", args.h))
    method = cfg.get("method", args.method)
    tol = cfg.get("tol", args.tol)
    if "grid" in cfg:
        grid = _grid_from_config(cfg["grid"], h)
    elif args.grid:
        grid = _parse_grid_flag(args.grid, h)
    else:
        grid = grid_for_spec(spec, h)

    report = verify.check_conditions(spec, grid, method=method, tolerance=tol)
    fit = verify.fit_profile(spec, *verify.profile_samples(spec, grid, method="analytic"))
    fit_ok = fit.residual_rms <= 1e-8

    theorem1 = None
    th_ok = True
    if spec.profile.Z == 0:
        t_samples, lap_samples = verify.profile_samples(spec, grid, method="analytic")
        theorem1 = verify.check_theorem1(t_samples, lap_samples, spec.n)
        th_ok = theorem1.satisfied

    convergence = None
    conv_ok = True
    if args.convergence:
        r1, r2, ratio = verify.oracle_convergence(spec, grid)
        conv_ok = _ratio_ok(ratio)
        convergence = {"residual_h": r1, "residual_h_half": r2, "ratio": ratio}

    passed = report.passed and fit_ok and th_ok and conv_ok
    payload = {
        "schema": SCHEMA_VERSION,
        "family": family,
        "n": spec.n,
        "params": params,
        "method": method,
        "h": h,
        "seed": args.seed,
        "negative_control": None if control in (None, "none") else control,
        "report": report.to_dict(),
        "profile_fit": fit.to_dict() | {"ok": fit_ok},
        "theorem1": None if theorem1 is None else theorem1.to_dict(),
        "convergence": convergence,
        "verdict": "pass" if passed else "fail",
    }
    return payload


def cmd_verify(args) -> int:
    allowed = {
        "family", "n", "params", "grid", "h", "tol", "method",
        "negative_control", "convergence", "out", "seed",
    }
    cfg = _load_config(args.config, "verify", allowed)
    family = cfg.get("family", args.family)
    families = list(catalog.FAMILIES) if family in (None, "all") else [family]
    out_dir = Path(cfg.get("out", args.out or "."))

    all_pass = True
    summary = []
    for fam in families:
        payload = _verify_one(fam, args, cfg)
        all_pass &= payload["verdict"] == "pass"
        summary.append({"family": fam, "verdict": payload["verdict"]})
        stem = f"verify_{fam}"
        reports.write_json(out_dir / f"{stem}.json", payload)
        text = verify.ResidualReport(
            conditions=tuple(
                verify.ConditionRecord(
                    c["condition"], c["max_abs"], c["rms"], c["tolerance"]
                )
                for c in payload["report"]["conditions"]
            ),
            n_points=payload["report"]["n_points"],
            n_excluded=payload["report"]["n_excluded"],
            method=payload["report"]["method"],
            label=payload["report"]["label"],
        ).to_text()
        reports.atomic_write_text(out_dir / f"{stem}.txt", text + "\n")
        if not args.json:
            print(f"{fam}: {payload['verdict']}")
    _emit({"schema": SCHEMA_VERSION, "results": summary}, args.json)
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _residual_summary(sol, grid: GridSpec, F: Nonlinearity) -> dict:
    T, X, _ = grid.sample(sol.surfaces)
    res_h = float(np.max(np.abs(nls_residual(sol, T, X, F, grid.h))))
    res_half = float(np.max(np.abs(nls_residual(sol, T, X, F, grid.h / 2.0))))
    at_floor = (res_h <= verify.fd_noise_floor(grid.h)
                and res_half <= verify.fd_noise_floor(grid.h / 2.0))
    ratio = None if at_floor else res_h / res_half
    return {
        "h": grid.h,
        "max_residual_h": res_h,
        "max_residual_h_half": res_half,
        "ratio": ratio,
        "order2_ok": _ratio_ok(ratio),
        "n_points": int(T.size),
    }


def cmd_solve(args) -> int:
    allowed = {"problem", "params", "nonlinearity", "grid", "h", "out", "seed"}
    cfg = _load_config(args.config, "solve", allowed)
    problem = cfg.get("problem", args.problem)
    h = float(cfg.get("h", args.h))
    params = dict(cfg.get("params", {}))
    if args.params:
        params.update(_parse_params(args.params))
    if "nonlinearity" in cfg:
        F = Nonlinearity.from_config(cfg["nonlinearity"])
    else:
        F = _nonlinearity_from_flag(args.nonlinearity)
    out_dir = Path(cfg.get("out", args.out or "."))

    if problem == "plane":
        sol = solutions.plane_wave_solution(
            params.get("c", 1.0), params.get("c1", 1.0), params.get("c2", 0.0), F
        )
        grid = _solve_grid(args, cfg, h, sol.dim, t_range=(0.0, 1.0))
    elif problem == "quadrature":
        poles = [params[k] for k in ("B1", "B2", "B3") if k in params] or [1.0]
        sol = solutions.caseI_quadrature_solution(poles, params.get("C", 1.0), F)
        grid = _solve_grid(args, cfg, h, sol.dim, t_range=(0.0, 1.0))
    elif problem == "soliton":
        # lifted sech: II.1 degenerated to f = t/2, omega = x1; F = -r^2
        F = Nonlinearity("power", g=-1.0, p=2.0)
        spec = catalog.make_family("II.1", params={"a": 0.0, "b": 0.5})
        grid = _solve_grid(args, cfg, h, spec.n, t_range=(0.0, 1.0))
        lo = min(0.0, grid.x_ranges[0][0] - 0.1)
        hi = grid.x_ranges[0][1] + 0.1
        ode = solutions.reduced_ode_for(spec, F)
        phi = solutions.integrate_caseII(ode, complex(np.sqrt(2.0)), 0.0, (lo, hi), 1e-4)
        sol = solutions.lift(spec, phi)
    else:
        raise ConfigError(f"unknown problem {problem!r} (use plane|quadrature|soliton)")

    T, X, _ = grid.sample(sol.surfaces)
    reports.write_solution_csv(out_dir / "solution.csv", T, X, sol(T, X))
    summary = {
        "schema": SCHEMA_VERSION,
        "problem": problem,
        "provenance": sol.provenance,
        "params": sol.params,
        "nonlinearity": F.describe(),
        "residuals": _residual_summary(sol, grid, F),
        "seed": args.seed,
    }
    ok = summary["residuals"]["order2_ok"]
    summary["verdict"] = "pass" if ok else "fail"
    reports.write_json(out_dir / "summary.json", summary)
    _emit(summary, args.json, f"{problem}: {summary['verdict']} "
          f"(max residual {summary['residuals']['max_residual_h']:.3e})")
    return 0 if ok else 1


def _solve_grid(args, cfg: dict, h: float, n: int, t_range) -> GridSpec:
    if "grid" in cfg:
        return _grid_from_config(cfg["grid"], h)
    if args.grid:
        return _parse_grid_flag(args.grid, h)
    g = default_grid(n, h)
    return GridSpec(t_range, g.x_ranges, g.counts, h=h)


# ---------------------------------------------------------------------------
# wave
# ---------------------------------------------------------------------------


def cmd_wave(args) -> int:
    allowed = {"wave_family", "k", "lam", "params", "const", "grid", "h", "out", "seed"}
    cfg = _load_config(args.config, "wave", allowed)
    family = cfg.get("wave_family", args.wave_family)
    k = float(cfg.get("k", args.k))
    lam = float(cfg.get("lam", args.lam))
    const = float(cfg.get("const", args.const))
    h = float(cfg.get("h", args.h))
    params = dict(cfg.get("params", {}))
    if args.params:
        params.update(_parse_params(args.params))
    if not params:
        params = {"B1": 0.0, "B2": 1.0} if family == "linear" else {"B1": 1.0}
    out_dir = Path(cfg.get("out", args.out or "."))

    if "grid" in cfg:
        grid = _grid_from_config(cfg["grid"], h)
    elif args.grid:
        grid = _parse_grid_flag(args.grid, h)
    else:
        grid = default_wave_grid(h)

    wa = wave.make_wave_ansatz(k, lam, family, params)
    report = wave.check_wave_conditions(wa, grid, method="analytic")

    w_lo = grid.t_range[0] + grid.x_ranges[2][0] - 0.2
    w_hi = grid.t_range[1] + grid.x_ranges[2][1] + 0.2
    phi = wave.solve_wave_ode(wa.T, lam, k, const, (w_lo, w_hi))
    u = wave.wave_solution(wa, phi)

    X0, X, _ = grid.sample(u.surfaces)
    res_h = float(np.max(np.abs(wave_residual(u, X0, X, lam, k, grid.h))))
    res_half = float(np.max(np.abs(wave_residual(u, X0, X, lam, k, grid.h / 2.0))))
    at_floor = (res_h <= verify.fd_noise_floor(grid.h)
                and res_half <= verify.fd_noise_floor(grid.h / 2.0))
    ratio = None if at_floor else res_h / res_half

    reports.write_field_csv(
        out_dir / "wave_solution.csv", X0, X, {"u": u(X0, X)}, t_name="x0"
    )
    ok = report.passed and _ratio_ok(ratio)
    summary = {
        "schema": SCHEMA_VERSION,
        "wave_family": family,
        "k": k,
        "lam": lam,
        "const": const,
        "params": params,
        "conditions": report.to_dict(),
        "residuals": {
            "h": grid.h,
            "max_residual_h": res_h,
            "max_residual_h_half": res_half,
            "ratio": ratio,
            "order2_ok": _ratio_ok(ratio),
        },
        "seed": args.seed,
        "verdict": "pass" if ok else "fail",
    }
    reports.write_json(out_dir / "wave_summary.json", summary)
    _emit(summary, args.json,
          f"wave {family}: {summary['verdict']} (max residual {res_h:.3e})")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def cmd_export(args) -> int:
    allowed = {"family", "n", "params", "grid", "h", "out", "seed"}
    cfg = _load_config(args.config, "export", allowed)
    family = cfg.get("family", args.family)
    if family is None:
        raise ConfigError("export needs --family")
    params = {**catalog.default_params(family), **dict(cfg.get("params", {}))}
    if args.params:
        params.update(_parse_params(args.params))
    spec = catalog.make_family(family, cfg.get("n", args.n), params)
    h = float(cfg.get("h", args.h))
    if "grid" in cfg:
        grid = _grid_from_config(cfg["grid"], h)
    elif args.grid:
        grid = _parse_grid_flag(args.grid, h)
    else:
        grid = grid_for_spec(spec, h)
    out_dir = Path(cfg.get("out", args.out or "."))
    T, X, _ = grid.sample(spec.surfaces)
    reports.write_field_csv(
        out_dir / f"export_{family}.csv",
        T,
        X,
        {"f": spec.f(T, X), "omega": spec.omega(T, X)},
    )
    _emit({"schema": SCHEMA_VERSION, "family": family, "rows": int(T.size)}, args.json,
          f"exported {int(T.size)} rows for {family}")
    return 0


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlsansatz",
        description="Reducing ansatzes and certified exact solutions for "
        "nonlinear Schrodinger-type equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_family=False):
        p.add_argument("--config", type=str, default=None, help="JSON run config")
        p.add_argument("--params", type=str, default=None, help="name=value,... overrides")
        p.add_argument("--grid", type=str, default=None,
                       help="tmin,tmax,x1min,x1max,...,counts (n+1 counts)")
        p.add_argument("--h", type=float, default=1e-3, help="finite-difference step")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true", help="machine-readable stdout")
        if with_family:
            p.add_argument("--family", type=str, default=None)
            p.add_argument("--n", type=int, default=None, help="space dimension")

    p_cat = sub.add_parser("catalog", help="list the ansatz families")
    p_cat.add_argument("--family", type=str, default=None)
    p_cat.add_argument("--json", action="store_true")
    p_cat.set_defaults(func=cmd_catalog)

    p_ver = sub.add_parser("verify", help="certify reduction conditions")
    common(p_ver, with_family=True)
    p_ver.add_argument("--tol", type=float, default=None)
    p_ver.add_argument("--method", choices=("analytic", "oracle"), default="analytic")
    p_ver.add_argument("--negative-control", choices=("none", "phase", "omega"),
                       default="none", dest="negative_control")
    p_ver.add_argument("--convergence", action="store_true",
                       help="also run the h-halving oracle ratio check")
    p_ver.set_defaults(func=cmd_verify)

    p_sol = sub.add_parser("solve", help="generate and certify exact solutions")
    common(p_sol)
    p_sol.add_argument("--problem", choices=("plane", "quadrature", "soliton"),
                       default="plane")
    p_sol.add_argument("--nonlinearity", type=str, default="power:g=1,p=2",
                       help="power:g=..,p=.. | log:s=.. | none")
    p_sol.set_defaults(func=cmd_solve)

    p_wav = sub.add_parser("wave", help="wave-equation reduction pipeline")
    common(p_wav)
    p_wav.add_argument("--wave-family", choices=("linear", "quadratic"),
                       default="linear", dest="wave_family")
    p_wav.add_argument("--k", type=float, default=2.0)
    p_wav.add_argument("--lam", type=float, default=1.0)
    p_wav.add_argument("--const", type=float, default=1.0)
    # at h=1e-3 the smooth linear-family residual sits on the rounding
    # floor of second differences; 1e-2 keeps the O(h^2) term dominant
    p_wav.set_defaults(func=cmd_wave, h=1e-2)

    p_exp = sub.add_parser("export", help="sample f and omega to CSV")
    common(p_exp, with_family=True)
    p_exp.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"numerical blow-up: {exc}", file=sys.stderr)
        return 3
    except CertificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except (DomainError, NlsAnsatzError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
