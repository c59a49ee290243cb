"""Linear-optics primitives acting on hybrid states.

Every unitary here acts term by term: a photon pattern selects which bus
labels pick up phases (cross phase modulation) and the passive elements
mix or rotate the labels themselves.  Branched densities transform the
same way with their Gram matrix untouched, because these maps are unitary
on the system and never touch a traced-out environment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .states import BranchedDensity, BranchTerm, HybridKet, State

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class DetectorParams:
    """Threshold photodiode: quantum efficiency and dark-count rate."""

    eta_D: float = 1.0
    lambda_dark: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta_D <= 1.0:
            raise ValueError(f"eta_D must be in [0, 1], got {self.eta_D}")
        if self.lambda_dark < 0.0:
            raise ValueError(f"lambda_dark must be >= 0, got {self.lambda_dark}")


IDEAL_DETECTOR = DetectorParams(1.0, 0.0)


def click_probability(beta: complex, det: DetectorParams = IDEAL_DETECTOR) -> float:
    """Probability that a threshold detector fires on coherent input beta.

    No-click probability factorizes into the dark-count term exp(-lambda)
    and the Poisson vacuum weight exp(-eta_D |beta|^2) of the attenuated
    beam, so P(click) = 1 - exp(-lambda) exp(-eta_D |beta|^2).
    """
    beta = complex(beta)
    mag2 = beta.real * beta.real + beta.imag * beta.imag
    return 1.0 - math.exp(-det.lambda_dark) * math.exp(-det.eta_D * mag2)


def _map_state(state: State, fn) -> State:
    if isinstance(state, HybridKet):
        return state.map_terms(fn)
    if isinstance(state, BranchedDensity):
        return state.map_branches(fn)
    raise TypeError(f"not a hybrid state: {type(state).__name__}")


def phase_shift(state: State, bus_mode: str, phi: float) -> State:
    """Rotate one bus label by exp(i phi)."""
    rot = complex(math.cos(phi), math.sin(phi))

    def shift(t: BranchTerm) -> BranchTerm:
        return BranchTerm(t.coeff, t.pattern, t.bus.replace(bus_mode, rot * t.bus.amp(bus_mode)))

    return _map_state(state, shift)


def beam_split(state: State, mode_1: str, mode_2: str) -> State:
    """50/50 beam splitter on two bus modes.

    Labels transform as (a, b) -> ((a - b)/sqrt2, (a + b)/sqrt2); the
    difference port lands in ``mode_1``, which is the port a comparison
    measurement watches.
    """

    def split(t: BranchTerm) -> BranchTerm:
        a = t.bus.amp(mode_1)
        b = t.bus.amp(mode_2)
        bus = t.bus.replace(mode_1, (a - b) * _INV_SQRT2)
        bus = bus.replace(mode_2, (a + b) * _INV_SQRT2)
        return BranchTerm(t.coeff, t.pattern, bus)

    return _map_state(state, split)


def xpm(state: State, photon_mode: str, bus_mode: str, theta: float) -> State:
    """Cross phase modulation: bus label gains exp(i theta) per photon.

    Patterns hold at most one photon per mode, so the conditional phase is
    either applied once or not at all.
    """
    rot = complex(math.cos(theta), math.sin(theta))

    def kick(t: BranchTerm) -> BranchTerm:
        if not t.pattern.has(photon_mode):
            return t
        return BranchTerm(t.coeff, t.pattern, t.bus.replace(bus_mode, rot * t.bus.amp(bus_mode)))

    return _map_state(state, kick)
