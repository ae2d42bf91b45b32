"""Command-line interface: ``mixediga {spectrum,converge,dispersion,blend-search,tables}``.

Exit status is 0 on success, 2 for configuration (or output path) errors and 3
for numerical failures. The output directory is taken from ``--output-dir``,
else from the ``MIXEDIGA_OUTPUT_DIR`` environment variable, else from the
config file (``output_dir``).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from numpy.linalg import LinAlgError

from .. import __version__
from ..quadrature import FAMILIES
from .config import ConfigError, StudyConfig, load_config, parse_config_text
from .emit import emit, to_csv
from .study import (
    TABLE_OPERATORS,
    run_blend_search,
    run_convergence,
    run_dispersion,
    run_spectrum,
    table_config,
)

ENV_OUTPUT_DIR = "MIXEDIGA_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

# flag name -> config key
_FLAGS = {
    "operator": "operator",
    "dim": "dim",
    "p": "p_list",
    "N": "N_list",
    "rules": "rules",
    "family": "family",
    "stiffness_rule": "stiffness_rule",
    "basis_kind": "basis_kind",
    "bc": "bc",
    "convention": "convention",
    "eigen_indices": "eigen_indices",
    "precision": "precision",
    "outputs": "outputs",
}


def _add_config_flags(sp):
    sp.add_argument("--config", "-c", help="key = value config file; flags override its entries")
    sp.add_argument("--operator", help="preset name or comma-separated coefficients a_0,...,a_n")
    sp.add_argument("--dim", help="1, 2 or 3")
    sp.add_argument("--p", help="comma-separated orders, e.g. 1,2,3")
    sp.add_argument("--N", help="comma-separated ascending element counts")
    sp.add_argument("--rules", help="comma-separated rules: gauss, reduced_gauss, lobatto, optimal, blend:<family>:<tau>")
    sp.add_argument("--family", help=f"family of the optimal rule: {', '.join(FAMILIES)}")
    sp.add_argument("--stiffness-rule", dest="stiffness_rule", help="separate rule for the stiffness form")
    sp.add_argument("--basis-kind", dest="basis_kind", help="iga or fem")
    sp.add_argument("--bc", help="dirichlet or periodic")
    sp.add_argument("--convention", help="sine or fourier exact modes")
    sp.add_argument("--eigen-indices", dest="eigen_indices", help="comma-separated 1-based positions")
    sp.add_argument("--precision", help="extended or double")
    sp.add_argument("--outputs", help="comma-separated result files (.csv, .json, .svg)")
    sp.add_argument("--output-dir", dest="output_dir", help=f"directory for outputs (overrides ${ENV_OUTPUT_DIR})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixediga", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("spectrum", "errors over the whole discrete spectrum for one (p, N)"),
        ("converge", "eigenvalue errors over N with convergence rates"),
        ("dispersion", "fitted exponent and coefficient of the stencil symbol error"),
        ("blend-search", "optimal blending parameters by root finding"),
    ]:
        _add_config_flags(sub.add_parser(name, help=text, description=text))
    tables = sub.add_parser("tables", help="reproduce the blending-parameter table and the four error tables")
    tables.add_argument("--output-dir", dest="output_dir", help=f"directory for outputs (overrides ${ENV_OUTPUT_DIR})")
    tables.add_argument("--precision", help="extended or double")
    return parser


def _config(args, defaults=None) -> StudyConfig:
    """File values beat subcommand ``defaults``; flags beat both."""
    file_values = {}
    if args.config:
        try:
            file_values = parse_config_text(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc.strerror}") from None
    values = {k: v for k, v in (defaults or {}).items() if k not in file_values}
    values.update(file_values)
    for flag, key in _FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[key] = value
    return load_config(None, **values)


def _output_dir(args, cfg: StudyConfig | None = None) -> str | None:
    if getattr(args, "output_dir", None):
        return args.output_dir
    if os.environ.get(ENV_OUTPUT_DIR):
        return os.environ[ENV_OUTPUT_DIR]
    return cfg.output_dir if cfg is not None else None


def _write(report, cfg: StudyConfig, args, out) -> None:
    paths = cfg.output_paths(_output_dir(args, cfg))
    if not paths:
        out.write(to_csv(report))
        return
    for path in paths:
        for written in emit(report, path.suffix.lstrip("."), path):
            print(f"wrote {written}", file=sys.stderr)


def _fmt(v):
    return "" if v is None else f"{v:.12g}" if isinstance(v, float) else str(v)


def cmd_spectrum(args, out):
    cfg = _config(args)
    report = run_spectrum(cfg)
    for curve in report.curves:
        try:
            indicator = f"{curve.branch_indicator():.3g}"
        except ValueError:
            indicator = "n/a"
        print(f"p={curve.p} N={curve.N} {curve.rule}: {curve.errors.size} modes, "
              f"branch indicator {indicator}", file=sys.stderr)
    _write(report, cfg, args, out)


def cmd_converge(args, out):
    cfg = _config(args)
    report = run_convergence(cfg)
    for r in report.rows:
        if r.is_rate:
            print(f"p={r.p} {r.rule} j={r.j}: rate {_fmt(r.rate)}", file=sys.stderr)
    _write(report, cfg, args, out)


def cmd_dispersion(args, out):
    cfg = _config(args, {"p_list": (1, 2, 3, 4)})
    _write(run_dispersion(cfg), cfg, args, out)


def cmd_blend_search(args, out):
    cfg = _config(args, {"p_list": (1, 2, 3, 4)})
    families = (cfg.family,) if args.family else FAMILIES
    _write(run_blend_search(cfg, families), cfg, args, out)


def cmd_tables(args, out):
    base = Path(_output_dir(args) or "tables")
    precision = args.precision or "extended"
    cfg1 = StudyConfig(p_list=(1, 2, 3, 4), precision=precision)
    report = run_blend_search(cfg1)
    for written in emit(report, "csv", base / "table1.csv"):
        print(f"wrote {written}", file=sys.stderr)
    for p, family, tau, tab, err in report.rows:
        out.write(f"table 1: p={p} {family} tau={tau:.12g} (tabulated {tab:.12g}, |diff| {err:.1e})\n")
    for number in sorted(TABLE_OPERATORS):
        cfg = table_config(number, precision=precision)
        rep = run_convergence(cfg)
        for fmt in ("csv", "json", "svg"):
            for written in emit(rep, fmt, base / f"table{number}.{fmt}"):
                print(f"wrote {written}", file=sys.stderr)
        rates = ", ".join(f"p={r.p} {r.rule} j={r.j}: {r.rate:.3f}" for r in rep.rows if r.is_rate and r.j == 1)
        out.write(f"table {number} ({cfg.operator}): {rates}\n")


COMMANDS = {
    "spectrum": cmd_spectrum,
    "converge": cmd_converge,
    "dispersion": cmd_dispersion,
    "blend-search": cmd_blend_search,
    "tables": cmd_tables,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, LinAlgError, RuntimeError, ValueError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
