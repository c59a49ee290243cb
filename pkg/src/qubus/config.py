"""Flat key=value run configuration shared by the CLI commands.

The file format is deliberately small: one ``key = value`` pair per
line, ``#`` comments, blank lines ignored.  Unknown keys are rejected
rather than skipped so a typo cannot silently fall back to a default.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .chain import ChainParams
from .link import LinkParams
from .optics import DetectorParams
from .qnd import QndParams, SourceState


class ConfigError(ValueError):
    """Raised for unreadable, unknown, or ill-typed configuration."""


_SQRT10 = 3.1622776601683795
_ALPHA0 = 447.21359549995793  # 200 * sqrt(5)


@dataclass(frozen=True)
class RunConfig:
    alpha: float = _SQRT10
    theta: float = 0.01
    alpha0_re: float = _ALPHA0
    alpha0_im: float = 0.0
    L0_km: float = 75.0
    L_km: float = 1200.0
    atten_km: float = 25.0
    f_hz: float = 40.0e3
    c_km_s: float = 2.0e5
    eta_D: float = 0.84
    lambda_dark: float = 0.0
    eta_M: float = 0.84
    p_s: float = 0.5
    P_g: float = 5.0e-5
    P_c: float = 0.5
    tau0_s: float = 0.0
    tauD_s: float | None = None
    seed: int = 12345
    output_path: str | None = None
    provided: frozenset[str] = field(default=frozenset(), compare=False)

    def was_provided(self, key: str) -> bool:
        return key in self.provided


_FLOAT_KEYS = {
    "alpha",
    "theta",
    "alpha0_re",
    "alpha0_im",
    "L0_km",
    "L_km",
    "atten_km",
    "f_hz",
    "c_km_s",
    "eta_D",
    "lambda_dark",
    "eta_M",
    "p_s",
    "P_g",
    "P_c",
    "tau0_s",
    "tauD_s",
}
_INT_KEYS = {"seed"}
_STR_KEYS = {"output_path"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def parse_config(text: str) -> RunConfig:
    values: dict[str, object] = {}
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        if key in _FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs a number, got {value!r}") from None
        elif key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs an integer, got {value!r}") from None
        else:
            values[key] = value
    return RunConfig(provided=frozenset(seen), **values)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config(text)


def detector(cfg: RunConfig) -> DetectorParams:
    return DetectorParams(eta_D=cfg.eta_D, lambda_dark=cfg.lambda_dark)


def link_params(cfg: RunConfig, L0_km: float | None = None) -> LinkParams:
    return LinkParams(
        alpha=cfg.alpha,
        theta=cfg.theta,
        L0_km=cfg.L0_km if L0_km is None else L0_km,
        f_hz=cfg.f_hz,
        atten_km=cfg.atten_km,
        c_km_s=cfg.c_km_s,
        det=detector(cfg),
    )


def qnd_params(cfg: RunConfig) -> QndParams:
    return QndParams(
        alpha0=complex(cfg.alpha0_re, cfg.alpha0_im),
        theta=cfg.theta,
        det=detector(cfg),
    )


def source_state(cfg: RunConfig) -> SourceState:
    return SourceState(p_s=cfg.p_s)


def chain_params(
    cfg: RunConfig,
    L_km: float | None = None,
    f_hz: float | None = None,
    P_c: float | None = None,
) -> ChainParams:
    return ChainParams(
        L0_km=cfg.L0_km,
        L_km=cfg.L_km if L_km is None else L_km,
        f_hz=cfg.f_hz if f_hz is None else f_hz,
        P_g=cfg.P_g,
        P_c=cfg.P_c if P_c is None else P_c,
        tau0_s=cfg.tau0_s,
        tauD_s=cfg.tauD_s,
        c_km_s=cfg.c_km_s,
        eta_D=cfg.eta_D,
        eta_M=cfg.eta_M,
    )
