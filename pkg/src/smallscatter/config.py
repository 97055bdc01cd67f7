"""Experiment configuration: flat ``key = value`` text files.

One assignment per line, ``#`` starts a comment, complex numbers are
written ``re+imi`` (``-1+0.001i``), vectors as comma lists.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .lattice import build_lattice
from .material import SPHERE_CS, MaterialSpec, design
from .scattering import FORMULATIONS, ScatteringConfig
from .solvers import SolveOptions

__all__ = ["ConfigError", "ExperimentConfig", "parse_complex", "format_complex", "load_config", "parse_config"]


DEFAULT_SPEED = 34400.0  # cm/s
DEFAULT_FREQUENCY = 1000.0  # Hz
K_RTOL = 1e-5


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the field."""


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"not a complex number: {text!r}") from None


def format_complex(z: complex, fmt: str = ".6g") -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 or (z.imag == 0 and math.copysign(1, z.imag) < 0) else "+"
    return f"{z.real:{fmt}}{sign}{abs(z.imag):{fmt}}i"


@dataclass(frozen=True)
class ExperimentConfig:
    """Defaults reproduce the reference experiment (negative-index target)."""

    v: float | None = None
    f: float | None = None
    k: float | None = None
    alpha: tuple[float, float, float] = (1.0, 0.0, 0.0)
    kappa: float = 0.5
    c_S: float = SPHERE_CS
    N: float = 1.0
    n0: complex = 1 + 0j
    n_target: complex | None = -1 + 0.001j
    h: complex | None = None
    force: bool = False
    domain_side: float = 1.0
    M: int | None = None
    b: int | None = 100
    p_side: int = 20
    c_side: int = 40
    formulations: tuple[str, ...] = ("ORI", "RED", "IE")
    tol: float = 2e-5
    max_iter: int = 500
    restart: int = 30
    precision: str = "double"
    fast_fft: bool = False
    output_dir: str = "out"
    report_n: int = 5

    def __post_init__(self):
        if not self.formulations:
            raise ConfigError("formulations: at least one of ORI, RED, IE is required")
        for form in self.formulations:
            if form not in FORMULATIONS:
                raise ConfigError(f"formulations: unknown formulation {form!r}")
        if (self.v is not None and self.v <= 0) or (self.f is not None and self.f <= 0):
            raise ConfigError("v/f: speed and frequency must be positive")
        if self.k is not None and self.k <= 0:
            raise ConfigError("k: must be positive")
        if self.k is not None and (self.v is not None or self.f is not None):
            k_vf = self._k_from_vf()
            # a k rounded to six digits still agrees with 2 pi f / v
            if abs(self.k - k_vf) > K_RTOL * k_vf:
                raise ConfigError(f"k: given k={self.k} disagrees with 2 pi f / v = {k_vf:.7g}")
        if self.tol <= 0:
            raise ConfigError("tol: must be positive")
        if self.precision not in ("single", "double"):
            raise ConfigError("precision: must be 'single' or 'double'")
        if self.M is None and self.b is None:
            raise ConfigError("M: give M or b")
        if self.p_side < 1 or self.c_side < 1 or self.report_n < 1:
            raise ConfigError("p_side/c_side/report_n: must be positive")
        if self.h is None and self.n_target is None:
            raise ConfigError("h: give h or n_target")

    def _k_from_vf(self) -> float:
        v = DEFAULT_SPEED if self.v is None else self.v
        f = DEFAULT_FREQUENCY if self.f is None else self.f
        return 2 * math.pi * f / v

    @property
    def wave_number(self) -> float:
        """2 pi f / v; an explicit k is used only when neither v nor f is set."""
        if self.k is not None and self.v is None and self.f is None:
            return self.k
        return self._k_from_vf()

    def base_material(self) -> MaterialSpec:
        return MaterialSpec(
            k=self.wave_number, c_S=self.c_S, kappa=self.kappa, N=self.N, n0=self.n0,
            alpha=tuple(self.alpha), force=self.force,
        )

    def material(self) -> MaterialSpec:
        """Material with h given directly, or designed from n_target."""
        base = self.base_material()
        try:
            if self.h is not None:
                return MaterialSpec(**{**asdict(base), "h": self.h})
            return design(self.n_target, base)
        except ValueError as exc:
            raise ConfigError(f"h: {exc}") from None

    def lattice(self):
        try:
            if self.b is not None and self.M is None:
                return build_lattice(b=self.b, kappa=self.kappa, domain_side=self.domain_side)
            lat = build_lattice(self.M, kappa=self.kappa, domain_side=self.domain_side)
            if self.b is not None and lat.b != self.b:
                raise ValueError(f"M={self.M} and b={self.b} disagree")
            return lat
        except ValueError as exc:
            raise ConfigError(f"M: {exc}") from None

    def scattering(self, formulation: str) -> ScatteringConfig:
        return ScatteringConfig(
            lat=self.lattice(),
            spec=self.material(),
            formulation=formulation,
            p_side=self.p_side,
            c_side=self.c_side,
            solve=SolveOptions(tol=self.tol, max_iter=self.max_iter, restart=self.restart),
            precision=self.precision,
            fast_fft=self.fast_fft,
        )

    def canonical(self) -> str:
        """Normalized text of the numeric settings (output_dir excluded)."""
        lines = []
        for fld in fields(self):
            if fld.name == "output_dir":
                continue
            lines.append(f"{fld.name}={_format_value(getattr(self, fld.name))}")
        return "\n".join(lines) + "\n"

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]


def _format_value(v) -> str:
    if isinstance(v, complex):
        return format_complex(v, ".17g")
    if isinstance(v, (tuple, list)):
        return ",".join(_format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_opt(conv):
    def parse(s):
        return None if s.strip().lower() in ("", "none", "auto") else conv(s)

    return parse


_PARSERS = {
    "v": _parse_opt(float),
    "f": _parse_opt(float),
    "k": _parse_opt(float),
    "alpha": lambda s: tuple(float(x) for x in s.split(",")),
    "kappa": float,
    "c_S": float,
    "N": float,
    "n0": parse_complex,
    "n_target": _parse_opt(parse_complex),
    "h": _parse_opt(parse_complex),
    "force": _parse_bool,
    "domain_side": float,
    "M": _parse_opt(lambda s: int(float(s))),
    "b": _parse_opt(int),
    "p_side": int,
    "c_side": int,
    "formulations": lambda s: tuple(x.strip().upper() for x in s.split(",") if x.strip()),
    "tol": float,
    "max_iter": int,
    "restart": int,
    "precision": lambda s: s.strip().lower(),
    "fast_fft": _parse_bool,
    "output_dir": str.strip,
    "report_n": int,
}


def parse_config(text: str, **overrides) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{key}: unknown configuration key (line {lineno})")
        try:
            values[key] = _PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    # M given without b means "use M"
    if "M" in values and "b" not in values:
        values["b"] = None
    values.update(overrides)
    try:
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, **overrides) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), **overrides)
