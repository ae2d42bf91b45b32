"""Study configuration: a flat ``key = value`` file format plus validation.

One key per line; ``#`` starts a comment; list values are comma separated.
Recognized keys (defaults in brackets):

``operator``        preset name or comma-separated coefficients ``a_0, ..., a_n`` [biharmonic]
``dim``             1, 2 or 3 [1]
``p_list``          polynomial orders [1, 2, 3]
``N_list``          element counts, ascending [4, 8, 16, 32]
``rules``           any of ``gauss``, ``reduced_gauss``, ``lobatto``, ``optimal``,
                    ``blend:<family>:<tau>`` [gauss, optimal]
``family``          blend family used by ``optimal`` [gauss-lobatto]
``stiffness_rule``  rule for the stiffness form only; empty means the same rule []
``basis_kind``      iga or fem [iga]
``bc``              dirichlet or periodic [dirichlet]
``convention``      sine or fourier [sine]
``eigen_indices``   1-based positions reported [1, 2, 4, 8]
``precision``       extended or double [extended]
``outputs``         result files; the extension picks csv, json or svg []
``output_dir``      directory for relative output paths [.]
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..basis import BOUNDARIES, FEM, KINDS
from ..operators import CONVENTIONS, PRESETS, OperatorSpec, preset
from ..quadrature import FAMILIES, GAUSS_LOBATTO, OPTIMAL_TAU

SIMPLE_RULES = ("gauss", "reduced_gauss", "lobatto", "optimal")
PRECISIONS = {"extended": np.longdouble, "double": np.float64}
OUTPUT_FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    """Invalid study configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class StudyConfig:
    operator: str = "biharmonic"
    dim: int = 1
    p_list: tuple = (1, 2, 3)
    N_list: tuple = (4, 8, 16, 32)
    rules: tuple = ("gauss", "optimal")
    family: str = GAUSS_LOBATTO
    stiffness_rule: str = ""
    basis_kind: str = "iga"
    bc: str = "dirichlet"
    convention: str = "sine"
    eigen_indices: tuple = (1, 2, 4, 8)
    precision: str = "extended"
    outputs: tuple = ()
    output_dir: str = "."

    def __post_init__(self):
        validate(self)

    @property
    def op(self) -> OperatorSpec:
        return parse_operator(self.operator)

    @property
    def dtype(self):
        return PRECISIONS[self.precision]

    def replace(self, **changes) -> "StudyConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v)
                for f in dataclasses.fields(self)}

    def output_paths(self, override_dir: str | None = None) -> list[Path]:
        base = Path(override_dir if override_dir else self.output_dir)
        return [p if p.is_absolute() else base / p for p in map(Path, self.outputs)]


def parse_operator(text: str) -> OperatorSpec:
    text = text.strip()
    if text in PRESETS:
        return preset(text)
    try:
        coeffs = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError("operator", f"unknown preset {text!r}; presets are {sorted(PRESETS)}") from None
    try:
        return OperatorSpec(coeffs)
    except ValueError as exc:
        raise ConfigError("operator", str(exc)) from None


def parse_rule(text: str):
    """Split a rule name into ``(kind, family, tau)``; ``family``/``tau`` are None for simple rules."""
    if text in SIMPLE_RULES:
        return text, None, None
    parts = text.split(":")
    if len(parts) == 3 and parts[0] == "blend":
        if parts[1] not in FAMILIES:
            raise ConfigError("rules", f"blend family must be one of {FAMILIES}, got {parts[1]!r}")
        try:
            tau = Fraction(parts[2])
        except (ValueError, ZeroDivisionError):
            raise ConfigError("rules", f"blend parameter {parts[2]!r} is not a number") from None
        return "blend", parts[1], tau
    raise ConfigError("rules", f"unknown rule {text!r}; use {SIMPLE_RULES} or blend:<family>:<tau>")


def validate(cfg: StudyConfig):
    parse_operator(cfg.operator)
    if cfg.dim not in (1, 2, 3):
        raise ConfigError("dim", f"must be 1, 2 or 3, got {cfg.dim!r}")
    if not cfg.p_list or any(int(p) != p or p < 1 for p in cfg.p_list):
        raise ConfigError("p_list", f"need positive integers, got {cfg.p_list!r}")
    if not cfg.N_list or any(int(n) != n or n < 2 for n in cfg.N_list):
        raise ConfigError("N_list", f"need integers >= 2, got {cfg.N_list!r}")
    if list(cfg.N_list) != sorted(set(cfg.N_list)):
        raise ConfigError("N_list", "must be strictly ascending")
    if not cfg.rules:
        raise ConfigError("rules", "at least one rule is required")
    for rule in cfg.rules:
        parse_rule(rule)
    if cfg.family not in FAMILIES:
        raise ConfigError("family", f"must be one of {FAMILIES}, got {cfg.family!r}")
    if "optimal" in cfg.rules:
        bad = [p for p in cfg.p_list if p not in OPTIMAL_TAU[cfg.family]]
        if bad:
            raise ConfigError("p_list", f"no tabulated optimal blend for p={bad}; use blend:<family>:<tau>")
    if cfg.stiffness_rule:
        parse_rule(cfg.stiffness_rule)
    if cfg.basis_kind not in KINDS:
        raise ConfigError("basis_kind", f"must be one of {KINDS}, got {cfg.basis_kind!r}")
    if cfg.basis_kind == FEM and max(cfg.p_list) > 4:
        raise ConfigError("p_list", "fem elements are provided for p <= 4")
    if cfg.bc not in BOUNDARIES:
        raise ConfigError("bc", f"must be one of {BOUNDARIES}, got {cfg.bc!r}")
    if cfg.convention not in CONVENTIONS:
        raise ConfigError("convention", f"must be one of {CONVENTIONS}, got {cfg.convention!r}")
    if not cfg.eigen_indices or any(int(j) != j or j < 1 for j in cfg.eigen_indices):
        raise ConfigError("eigen_indices", f"need positive integers, got {cfg.eigen_indices!r}")
    if cfg.precision not in PRECISIONS:
        raise ConfigError("precision", f"must be one of {tuple(PRECISIONS)}, got {cfg.precision!r}")
    for out in cfg.outputs:
        if Path(out).suffix.lstrip(".") not in OUTPUT_FORMATS:
            raise ConfigError("outputs", f"{out!r} needs one of the extensions {OUTPUT_FORMATS}")


# -- text format ----------------------------------------------------------------

_INT_LISTS = ("p_list", "N_list", "eigen_indices")
_STR_LISTS = ("rules", "outputs")
_FIELDS = {f.name for f in dataclasses.fields(StudyConfig)}


def _convert(key: str, value: str):
    value = value.strip()
    try:
        if key in _INT_LISTS:
            return tuple(int(v) for v in value.split(",") if v.strip())
        if key == "dim":
            return int(value)
    except ValueError:
        raise ConfigError(key, f"expected integers, got {value!r}") from None
    if key in _STR_LISTS:
        return tuple(v.strip() for v in value.split(",") if v.strip())
    return value


def parse_config_text(text: str) -> dict:
    """Raw field values from ``key = value`` lines (no validation of the values)."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "rule":
            key = "rules"
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        values[key] = _convert(key, value)
    return values


def load_config(path=None, **overrides) -> StudyConfig:
    """Config from a file (if any) with ``overrides`` taking precedence.

    ``overrides`` may hold strings in file syntax or already-typed values;
    ``None`` entries are ignored.
    """
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        values.update(parse_config_text(text))
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        if isinstance(value, str):
            value = _convert(key, value)
        elif isinstance(value, list):
            value = tuple(value)
        values[key] = value
    try:
        return StudyConfig(**values)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None


def dump_config(cfg: StudyConfig) -> str:
    lines = []
    for key, value in cfg.as_dict().items():
        if isinstance(value, list):
            value = ", ".join(str(v) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
