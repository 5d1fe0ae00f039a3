"""Command-line frontend.

Subcommands:

  special-points   the fold and symmetry-breaking amplitudes with residuals
  even-branch      table over a beta grid: load, Morse index, eigenvalues
  spectrum         eigenvalues at a single amplitude
  noneven-branch   trace and verify the non-even branch, emit records
  verify           re-verify a file produced by this tool

Every command takes --alpha, --out, --format {csv,json}, and --config (a
JSON file whose entries sit between built-in defaults and explicit flags).
Outputs are deterministic: no timestamps, no randomness, numeric CSV fields
at 17 significant digits, JSON floats at full round-trip precision.  Exit
codes: 0 success, 1 computation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .core import ProblemParams

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

_DEFAULTS = dict(
    alpha=0.5,
    fmt="csv",
    out=None,
    plot=False,
    log_lambda=False,
    beta_min=None,
    beta_max=None,
    beta_step=None,
    beta=None,
    count=3,
    jobs=1,
    min_lambda=1e-6,
    max_supnorm=30.0,
    max_points=5000,
    ode_tol=1e-7,
    green_tol=1e-7,
    symmetry_tol=1e-9,
    matching_tol=1e-8,
    path=None,
)


@dataclass
class RunConfig:
    command: str
    alpha: float
    fmt: str
    out: str | None
    plot: bool
    log_lambda: bool
    beta_min: float | None
    beta_max: float | None
    beta_step: float | None
    beta: float | None
    count: int
    jobs: int
    min_lambda: float
    max_supnorm: float
    max_points: int
    ode_tol: float
    green_tol: float
    symmetry_tol: float
    matching_tol: float
    path: str | None

    def public(self) -> dict:
        """Config subset recorded inside output files."""
        skip = {"out", "path", "plot", "fmt"}
        doc = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in skip}
        return doc


def _fmt17(value) -> str:
    return format(float(value), ".17g")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepliouville",
        description="Solver and verification toolkit for the step-weight Liouville problem.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--alpha", type=float, default=None, help="weight parameter in (0,1)")
        p.add_argument("--out", type=str, default=None, help="output file (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--plot", action="store_true", default=None, help="emit an SVG plot")
        p.add_argument("--log-lambda", dest="log_lambda", action="store_true", default=None,
                       help="log-scale load axis in plots")
        p.add_argument("--ode-tol", dest="ode_tol", type=float, default=None)
        p.add_argument("--green-tol", dest="green_tol", type=float, default=None)
        p.add_argument("--matching-tol", dest="matching_tol", type=float, default=None)
        p.add_argument("--symmetry-tol", dest="symmetry_tol", type=float, default=None)

    p = sub.add_parser("special-points", help="fold and symmetry-breaking amplitudes")
    common(p)

    p = sub.add_parser("even-branch", help="even-family table over a beta grid")
    common(p)
    p.add_argument("--beta-min", dest="beta_min", type=float, default=None)
    p.add_argument("--beta-max", dest="beta_max", type=float, default=None)
    p.add_argument("--beta-step", dest="beta_step", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None, help="parallel row workers")

    p = sub.add_parser("spectrum", help="linearized eigenvalues at one amplitude")
    common(p)
    p.add_argument("--beta", type=float, default=None, required=False)
    p.add_argument("--count", type=int, default=None, help="how many eigenvalues")

    p = sub.add_parser("noneven-branch", help="trace the non-even branch and verify it")
    common(p)
    p.add_argument("--min-lambda", dest="min_lambda", type=float, default=None)
    p.add_argument("--max-supnorm", dest="max_supnorm", type=float, default=None)
    p.add_argument("--max-points", dest="max_points", type=int, default=None)

    p = sub.add_parser("verify", help="re-verify a table or branch file")
    common(p)
    p.add_argument("path", type=str)

    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    """Flags override the optional config file, which overrides defaults."""
    file_cfg = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            file_cfg = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        unknown = set(file_cfg) - set(_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = dict(_DEFAULTS)
    merged.update(file_cfg)
    for key in _DEFAULTS:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            merged[key] = cli_val
    cfg = RunConfig(command=args.command, **merged)
    if not (0.0 < cfg.alpha < 1.0):
        raise ConfigError(f"alpha must lie in (0,1), got {cfg.alpha}")
    if cfg.fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.fmt}")
    return cfg


class ConfigError(ValueError):
    pass


def _write_text(cfg: RunConfig, text: str):
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit(cfg: RunConfig, columns, rows, results_extra=None):
    """Serialize rows to CSV (17 significant digits) or JSON, deterministically."""
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            out_row = []
            for col in columns:
                v = row[col]
                if isinstance(v, bool):
                    out_row.append("true" if v else "false")
                elif isinstance(v, float):
                    out_row.append(_fmt17(v))
                elif v is None:
                    out_row.append("")
                else:
                    out_row.append(str(v))
            writer.writerow(out_row)
        _write_text(cfg, buf.getvalue())
    else:
        results = {"rows": rows}
        if results_extra:
            results.update(results_extra)
        doc = {"version": __version__, "config": cfg.public(), "results": results}
        _write_text(cfg, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _plot_path(cfg: RunConfig) -> Path:
    if cfg.out:
        return Path(cfg.out).with_suffix(".svg")
    return Path(f"{cfg.command}.svg")


def cmd_special_points(cfg: RunConfig) -> int:
    from .core import varphi
    from .roots import _beta1_residual, special_points

    params = ProblemParams(cfg.alpha)
    sp = special_points(params)
    row = {
        "alpha": sp.alpha,
        "beta1": sp.beta1,
        "beta2": sp.beta2,
        "lambda1": sp.lambda1,
        "lambda2": sp.lambda2,
        "beta1_residual": abs(_beta1_residual(sp.beta1)),
        "beta2_residual": abs(float(varphi(1.0, sp.beta2, params))),
    }
    _emit(cfg, list(row.keys()), [row])
    return EXIT_OK


def _even_branch_row(alpha: float, beta: float) -> dict:
    """One even-branch table row; importable so process pools can map it."""
    from .core import lambda_of_beta
    from .spectrum import eigenvalues

    params = ProblemParams(alpha)
    row = {
        "alpha": alpha,
        "beta": beta,
        "lambda": float(lambda_of_beta(beta, params)),
        "morse_index": None,
        "degenerate": None,
        "mu1": None,
        "mu2": None,
        "mu3": None,
        "error": "",
    }
    try:
        spec = eigenvalues(beta, params, count=3)
        row["morse_index"] = spec.morse_index
        row["degenerate"] = spec.degenerate
        row["mu1"], row["mu2"], row["mu3"] = spec.eigenvalues
    except Exception as exc:  # row marked, run continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_even_branch(cfg: RunConfig) -> int:
    from .roots import special_points

    params = ProblemParams(cfg.alpha)
    sp = special_points(params)
    beta_min = cfg.beta_min if cfg.beta_min is not None else 0.5 * sp.beta1
    beta_max = cfg.beta_max if cfg.beta_max is not None else 2.0 * sp.beta2
    beta_step = cfg.beta_step if cfg.beta_step is not None else (beta_max - beta_min) / 24.0
    if beta_min <= 0 or beta_max <= beta_min or beta_step <= 0:
        raise ConfigError(f"invalid beta grid ({beta_min}, {beta_max}, {beta_step})")
    betas = []
    b = beta_min
    while b <= beta_max + 1e-12 * beta_step:
        betas.append(b)
        b += beta_step

    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(partial(_even_branch_row, cfg.alpha), betas))
    else:
        rows = [_even_branch_row(cfg.alpha, b) for b in betas]

    columns = ["alpha", "beta", "lambda", "morse_index", "degenerate", "mu1", "mu2", "mu3", "error"]
    _emit(cfg, columns, rows, results_extra={"special_points": vars(sp).copy()})

    if cfg.plot:
        from .svgplot import render_plot

        ok = [r for r in rows if not r["error"]]
        svg = render_plot(
            [([r["lambda"] for r in ok], [r["beta"] for r in ok], "even family")],
            title="even solution family",
            xlabel="lambda",
            ylabel="sup norm",
            log_x=cfg.log_lambda,
            markers=[(sp.lambda1, sp.beta1, "fold"), (sp.lambda2, sp.beta2, "symmetry breaking")],
        )
        _plot_path(cfg).write_text(svg, encoding="utf-8")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    from .core import lambda_of_beta
    from .spectrum import eigenvalues

    if cfg.beta is None:
        raise ConfigError("spectrum requires --beta")
    params = ProblemParams(cfg.alpha)
    spec = eigenvalues(cfg.beta, params, count=cfg.count)
    rows = [
        {
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "lambda": float(lambda_of_beta(cfg.beta, params)),
            "k": k + 1,
            "mu": mu,
            "morse_index": spec.morse_index,
            "degenerate": spec.degenerate,
            "degeneracy_tol": spec.degeneracy_tol,
        }
        for k, mu in enumerate(spec.eigenvalues)
    ]
    columns = ["alpha", "beta", "lambda", "k", "mu", "morse_index", "degenerate", "degeneracy_tol"]
    _emit(cfg, columns, rows)
    return EXIT_OK


_NONEVEN_COLUMNS = [
    "alpha", "s", "lambda", "sup_norm", "max_location",
    "A", "B", "d_left", "m_left", "d_right", "m_right",
    "bounds_ok", "identity_residual", "corrector_cond",
    "ode_residual", "green_residual", "boundary_error", "symmetry_defect",
    "positivity_ok", "verified",
]


def _noneven_row(cfg: RunConfig, point) -> dict:
    from .noneven import lemma_bounds
    from .verify import verify_solution

    sol = point.solution
    bounds = lemma_bounds(sol)
    report = verify_solution(sol, ode_tol=cfg.ode_tol, green_tol=cfg.green_tol)
    return {
        "alpha": cfg.alpha,
        "s": point.s,
        "lambda": sol.lam,
        "sup_norm": point.sup_norm,
        "max_location": point.max_location,
        "A": sol.A,
        "B": sol.B,
        "d_left": sol.d_left,
        "m_left": sol.m_left,
        "d_right": sol.d_right,
        "m_right": sol.m_right,
        "bounds_ok": bounds.ok,
        "identity_residual": bounds.identity_residual,
        "corrector_cond": point.corrector_cond,
        "ode_residual": report.ode_residual_sup,
        "green_residual": report.green_residual_sup,
        "boundary_error": report.boundary_error,
        "symmetry_defect": report.symmetry_defect,
        "positivity_ok": report.positivity_ok,
        "verified": report.verified,
    }


def cmd_noneven_branch(cfg: RunConfig) -> int:
    import numpy as np

    from .core import lambda_of_beta
    from .noneven import StepCollapseError, continue_branch

    params = ProblemParams(cfg.alpha)
    collapsed = None
    try:
        branch = continue_branch(
            params,
            min_lambda=cfg.min_lambda,
            max_supnorm=cfg.max_supnorm,
            max_points=cfg.max_points,
        )
    except StepCollapseError as exc:
        branch = exc.branch
        collapsed = str(exc)

    rows = [_noneven_row(cfg, point) for point in branch.points]
    extra = {"origin": vars(branch.origin).copy()}
    if collapsed:
        extra["step_collapse"] = collapsed
    _emit(cfg, _NONEVEN_COLUMNS, rows, results_extra=extra)

    if cfg.plot:
        from .roots import special_points
        from .svgplot import render_plot

        sp = branch.origin
        sup_max = max((r["sup_norm"] for r in rows), default=sp.beta2) * 1.05
        betas = np.linspace(min(0.05, sp.beta1 / 4), max(sup_max, 2 * sp.beta2), 400)
        even_lams = [float(lambda_of_beta(b, params)) for b in betas]
        svg = render_plot(
            [
                (even_lams, list(betas), "even family"),
                ([r["lambda"] for r in rows], [r["sup_norm"] for r in rows], "non-even branch"),
            ],
            title="bifurcation diagram",
            xlabel="lambda",
            ylabel="sup norm",
            log_x=cfg.log_lambda,
            markers=[(sp.lambda2, sp.beta2, "symmetry breaking")],
        )
        _plot_path(cfg).write_text(svg, encoding="utf-8")

    if collapsed:
        print(f"step collapse: {collapsed}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _load_records(path: Path):
    """Read a file produced by this tool; returns (kind, alpha_or_None, rows)."""
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return "empty", None, []
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        doc = json.loads(text)
        cfg = doc.get("config", {})
        rows = doc.get("results", {}).get("rows", [])
        return cfg.get("command", "unknown"), cfg.get("alpha"), rows
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for raw in reader:
        row = {}
        for key, val in raw.items():
            if val is None or val == "":
                row[key] = None
            elif val in ("true", "false"):
                row[key] = val == "true"
            else:
                try:
                    row[key] = float(val)
                except ValueError:
                    row[key] = val
        rows.append(row)
    if not rows:
        return "empty", None, []
    cols = set(rows[0])
    if {"d_left", "d_right", "m_left"} <= cols:
        kind = "noneven-branch"
    elif {"beta", "mu1"} <= cols:
        kind = "even-branch"
    else:
        kind = "unknown"
    return kind, rows[0].get("alpha"), rows


def cmd_verify(cfg: RunConfig) -> int:
    import numpy as np

    from .core import lambda_of_beta
    from .noneven import PiecewiseSolution, even_embedding, lemma_bounds, matching_residual
    from .verify import verify_solution

    path = Path(cfg.path)
    if not path.exists():
        raise ConfigError(f"no such file: {cfg.path}")
    kind, alpha, rows = _load_records(path)
    report_lines = []
    if kind == "empty" or not rows:
        _write_text(cfg, "warning: no records to verify (vacuous pass)\n")
        return EXIT_OK
    if kind not in ("even-branch", "noneven-branch"):
        raise ConfigError(f"not a verifiable table or branch file: {cfg.path} (kind {kind})")

    failures = []
    checked = 0
    for i, row in enumerate(rows):
        label = f"record {i}"
        if row.get("error"):
            continue
        row_alpha = row.get("alpha", alpha)
        params = ProblemParams(float(row_alpha))
        try:
            if kind == "even-branch":
                beta = float(row["beta"])
                lam_claim = float(row["lambda"])
                if abs(lam_claim - float(lambda_of_beta(beta, params))) > 1e-10 * (1 + lam_claim):
                    failures.append(f"{label}: lambda inconsistent with amplitude map")
                    continue
                sol = even_embedding(beta, params)
            else:
                sol = PiecewiseSolution(
                    params=params,
                    lam=float(row["lambda"]),
                    A=float(row["A"]),
                    B=float(row["B"]),
                    d_left=float(row["d_left"]),
                    m_left=float(row["m_left"]),
                    d_right=float(row["d_right"]),
                    m_right=float(row["m_right"]),
                )
                res = float(np.max(np.abs(matching_residual(sol))))
                if res > cfg.matching_tol:
                    failures.append(f"{label}: matching residual {res:.3e} > {cfg.matching_tol:.1e}")
                    continue
                if not lemma_bounds(sol).ok:
                    failures.append(f"{label}: load bounds violated")
                    continue
            report = verify_solution(sol, ode_tol=cfg.ode_tol, green_tol=cfg.green_tol)
            checked += 1
            if not report.verified:
                failures.append(
                    f"{label}: residuals ode={report.ode_residual_sup:.3e} "
                    f"green={report.green_residual_sup:.3e} positive={report.positivity_ok}"
                )
        except Exception as exc:
            failures.append(f"{label}: {type(exc).__name__}: {exc}")

    if failures:
        report_lines.extend(f"FAIL {f}" for f in failures)
        report_lines.append(f"{len(failures)} of {len(rows)} records failed verification")
        _write_text(cfg, "\n".join(report_lines) + "\n")
        return EXIT_FAILURE
    report_lines.append(f"all {checked} records verified")
    _write_text(cfg, "\n".join(report_lines) + "\n")
    return EXIT_OK


_COMMANDS = {
    "special-points": cmd_special_points,
    "even-branch": cmd_even_branch,
    "spectrum": cmd_spectrum,
    "noneven-branch": cmd_noneven_branch,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
