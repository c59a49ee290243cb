"""Nondestructive photon detection built from XPM probes and comparison.

A probe beam picks up a conditional phase theta from the photon (or weak
beam) under test, then meets an unshifted reference on a 50/50 splitter.
The difference port carries amplitude (probe*e^{i theta} - probe)/sqrt2,
so a threshold photodiode there fires almost surely when the phase kicked
in and almost never otherwise.  Three uses of that module live here:
source purification, the weak-beam indirect measurement, and which-port
discrimination after the parity circuit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .optics import DetectorParams, IDEAL_DETECTOR
from .states import HybridKet, norm

# Residual vacuum overlap above which port discrimination is unreliable.
DISCRIMINATION_RESIDUAL = 1e-4


@dataclass(frozen=True)
class SourceState:
    """Photon source emitting |1> with probability p_s, vacuum otherwise."""

    p_s: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_s <= 1.0:
            raise ValueError(f"p_s must be in [0, 1], got {self.p_s}")


@dataclass(frozen=True)
class QndParams:
    alpha0: complex
    theta: float
    det: DetectorParams = IDEAL_DETECTOR


def comparison_intensity(amp: complex, theta: float) -> float:
    """|amp (e^{i theta} - 1)/sqrt2|^2, the difference-port intensity.

    Uses |e^{i theta} - 1|^2 = 4 sin^2(theta/2) so small theta keeps full
    relative precision; the naive complex subtraction loses four digits
    already at theta ~ 1e-6.
    """
    amp = complex(amp)
    s = math.sin(0.5 * theta)
    mag2 = amp.real * amp.real + amp.imag * amp.imag
    return 2.0 * mag2 * s * s


def threshold_click(intensity: float, det: DetectorParams) -> float:
    return 1.0 - math.exp(-det.lambda_dark) * math.exp(-det.eta_D * intensity)


def default_probe(theta: float) -> float:
    """Probe amplitude making the difference-port intensity equal 20.

    Then the no-photon and photon outcomes overlap by at most e^{-10},
    the same margin as the canonical |alpha0 theta| = 2 sqrt5 sizing.
    """
    s = math.sin(0.5 * theta)
    if s == 0.0:
        raise ValueError("theta = 0 leaves the probe unshifted")
    return math.sqrt(10.0) / abs(s)


def comparison_success(q: QndParams) -> float:
    """Probability that the comparison detector distinguishes the probe.

    Returns 1 - exp(-|alpha0 - alpha0 e^{i theta}|^2 / 2), the ideal-
    detector click probability on the difference port.  The complement is
    the error probability of mistaking a shifted probe for an unshifted
    one, e^{-10} at |alpha0 theta| = 2 sqrt5.
    """
    return 1.0 - math.exp(-comparison_intensity(q.alpha0, q.theta))


def comparison_error(q: QndParams) -> float:
    """exp(-intensity), computed directly so strong probes keep precision.

    1 - comparison_success would lose the answer entirely once the
    intensity passes ~36 and the success probability rounds to 1.
    """
    return math.exp(-comparison_intensity(q.alpha0, q.theta))


def purify_source(src: SourceState, q: QndParams) -> tuple[float, float]:
    """Herald a photon from a lossy source by a QND comparison click.

    Returns (click_prob, conditional_fidelity): the probability that the
    module fires at all, and the fidelity of the post-click state with a
    true single photon.  Dark counts are the only way a vacuum emission
    can click, so the fidelity approaches 1 as lambda_dark goes to 0.
    """
    bright = comparison_intensity(q.alpha0, q.theta)
    p_click_photon = threshold_click(bright, q.det)
    p_click_vacuum = threshold_click(0.0, q.det)
    click_prob = src.p_s * p_click_photon + (1.0 - src.p_s) * p_click_vacuum
    if click_prob == 0.0:
        raise ValueError("click probability is zero, conditional fidelity undefined")
    return click_prob, src.p_s * p_click_photon / click_prob


def m_module_outcome(
    weak_amplitude: complex, gamma: complex, theta: float, det: DetectorParams
) -> float:
    """Click probability of the indirect measurement of a weak beam.

    The weak beam is not detected itself; its non-vacuum component
    (probability 1 - e^{-|w|^2}) imprints theta on the bright probe gamma,
    whose comparison output then drives the photodiode.  Composed:

        (1 - e^{-|w|^2}) P(|gamma (e^{i theta}-1)/sqrt2|^2) + e^{-|w|^2} P(0)

    with P the threshold click probability.
    """
    w = complex(weak_amplitude)
    occ = -math.expm1(-(w.real * w.real + w.imag * w.imag))
    bright = threshold_click(comparison_intensity(gamma, theta), det)
    dark = threshold_click(0.0, det)
    return occ * bright + (1.0 - occ) * dark


def weak_multiphoton_residual(weak_amplitude: complex) -> float:
    """Probability of two or more photons in the weak beam.

    The indirect measurement treats any occupation as a single photon;
    this is the weight it misattributes, about |w|^4 / 2 in the regime
    |w|^2 << 1 where the protocol operates.
    """
    w = complex(weak_amplitude)
    x = w.real * w.real + w.imag * w.imag
    return -math.expm1(-x) - x * math.exp(-x)


# Which-path tracks watched by the port QND modules, per location.
_K_TRACK = frozenset({"3", "4"})
_R_TRACK = frozenset({"5", "6"})

# Click pattern -> port-pair label, in the nominal (large probe) limit.
PORT_BY_PATTERN = {
    (True, True): "K_A K_B",
    (True, False): "K_A R_B",
    (False, True): "R_A K_B",
    (False, False): "R_A R_B",
}


def _track_of(pattern, location: str) -> bool:
    """True if the photon at ``location`` sits in the K track."""
    for mode in pattern.occupied:
        loc, _, rail = mode.partition(".")
        if loc != location:
            continue
        if rail in _K_TRACK:
            return True
        if rail in _R_TRACK:
            return False
        raise ValueError(f"photon in mode {mode} is outside the detection tracks")
    raise ValueError(f"no photon at location {location}")


def port_discriminate(
    state: HybridKet, delta: complex, theta: float, det: DetectorParams
) -> dict[tuple[bool, bool], tuple[float, HybridKet]]:
    """Measure which port pair the bi-photon left through.

    One QND module per location couples a delta probe to the K-track
    rails; a click means "photon went K".  Returns, for each of the four
    click patterns (A fired, B fired), the pattern probability and the
    post-measurement state, which is the unnormalized component of the
    input over the nominally matching port pair.  Probabilities account
    for detector imperfection (a missed click reassigns the pattern), the
    returned states do not: they are the ideal-port components.
    """
    bright = comparison_intensity(delta, theta)
    residual = math.exp(-0.5 * bright)
    if residual >= DISCRIMINATION_RESIDUAL:
        warnings.warn(
            f"port probes barely separated: vacuum overlap {residual:.3e} "
            f"exceeds {DISCRIMINATION_RESIDUAL:.0e}",
            stacklevel=2,
        )
    p_click = {True: threshold_click(bright, det), False: threshold_click(0.0, det)}

    blocks: dict[tuple[bool, bool], list] = {key: [] for key in PORT_BY_PATTERN}
    for term in state.terms:
        key = (_track_of(term.pattern, "A"), _track_of(term.pattern, "B"))
        blocks[key].append(term)

    weights = {}
    components = {}
    for key, terms in blocks.items():
        component = HybridKet(tuple(terms), state.registry)
        components[key] = component
        weights[key] = norm(component) ** 2

    out = {}
    for observed in PORT_BY_PATTERN:
        prob = 0.0
        for actual, w in weights.items():
            pa = p_click[actual[0]]
            pb = p_click[actual[1]]
            qa = pa if observed[0] else 1.0 - pa
            qb = pb if observed[1] else 1.0 - pb
            prob += w * qa * qb
        out[observed] = (prob, components[observed])
    return out
