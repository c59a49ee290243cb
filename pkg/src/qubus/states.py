"""Hybrid states of dual-rail photons entangled with coherent bus beams.

A ket is stored as a finite superposition of product terms

    sum_k  c_k |pattern_k> (x) |a_k1>_1 |a_k2>_2 ... |a_kM>_M

where |pattern> is a photon-number configuration over named discrete modes
(0 or 1 photon each) and each bus mode m carries a coherent state whose
complex label a_km is kept symbolically.  All inner products reduce to the
closed-form coherent overlap, so nothing is ever truncated to a Fock
cutoff and the algebra stays exact up to float rounding.

Bus loss turns a ket into a branched density operator: the branch terms
keep their (attenuated) labels and a Gram matrix records the decoherence
factor picked up by each pair of branches when the environment is traced
out.  Unitary bus operations commute with that bookkeeping, so downstream
code can keep transforming the branch terms while the Gram matrix rides
along unchanged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

import numpy as np

# Terms with |coeff| below this are dropped when states are assembled.
PRUNE_TOL = 1e-15

# Tolerance used when validating Gram matrices.
_GRAM_TOL = 1e-9


def coherent_overlap(a: complex, b: complex) -> complex:
    """Overlap <a|b> of two coherent states.

    Evaluated as exp(-|a-b|^2/2 + i Im(conj(a) b)), which is algebraically
    identical to exp(-|a|^2/2 - |b|^2/2 + conj(a) b) but avoids the
    catastrophic cancellation of the three-term exponent when a and b are
    large and nearly equal (the regime every near-unit-fidelity check
    lives in).
    """
    a = complex(a)
    b = complex(b)
    d = b - a
    mag2 = d.real * d.real + d.imag * d.imag
    phase = (a.conjugate() * b).imag
    return cmath.exp(complex(-0.5 * mag2, phase))


@dataclass(frozen=True)
class ComplexAmplitude:
    """Plain re/im pair, the on-disk form of a complex parameter."""

    re: float
    im: float = 0.0

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexAmplitude":
        z = complex(z)
        return cls(z.real, z.imag)


def _location(mode: str) -> str:
    return mode.split(".", 1)[0]


@dataclass(frozen=True)
class PhotonPattern:
    """Occupation of the discrete photonic modes.

    Modes are named "<location>.<rail>", e.g. "B.H" or "A.3".  Only the
    occupied modes are stored.  A location holds at most one photon, which
    is the dual-rail / which-path invariant every state here obeys.
    """

    occupied: frozenset[str]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for mode in self.occupied:
            loc = _location(mode)
            if loc in seen:
                raise ValueError(f"more than one photon at location {loc!r}")
            seen.add(loc)

    def has(self, mode: str) -> bool:
        return mode in self.occupied

    def photons_at(self, location: str) -> int:
        return sum(1 for m in self.occupied if _location(m) == location)


def photon_pattern(*modes: str) -> PhotonPattern:
    return PhotonPattern(frozenset(modes))


@dataclass(frozen=True)
class CoherentLabel:
    """Coherent amplitudes of the bus modes, keyed by mode name."""

    amplitudes: tuple[tuple[str, complex], ...]

    @classmethod
    def of(cls, amps: Mapping[str, complex]) -> "CoherentLabel":
        items = tuple(sorted((m, complex(a)) for m, a in amps.items()))
        return cls(items)

    def amp(self, mode: str) -> complex:
        for m, a in self.amplitudes:
            if m == mode:
                return a
        raise KeyError(mode)

    def replace(self, mode: str, amp: complex) -> "CoherentLabel":
        if not any(m == mode for m, _ in self.amplitudes):
            raise KeyError(mode)
        return CoherentLabel(
            tuple((m, complex(amp) if m == mode else a) for m, a in self.amplitudes)
        )

    def modes(self) -> tuple[str, ...]:
        return tuple(m for m, _ in self.amplitudes)


@dataclass(frozen=True)
class BranchTerm:
    """One product term: coefficient, photon pattern, bus labels."""

    coeff: complex
    pattern: PhotonPattern
    bus: CoherentLabel


def term_overlap(bra: BranchTerm, ket: BranchTerm) -> complex:
    """<bra term | ket term> ignoring the two coefficients."""
    if bra.pattern != ket.pattern:
        return 0.0
    out = 1.0 + 0.0j
    for (m1, a), (m2, b) in zip(bra.bus.amplitudes, ket.bus.amplitudes):
        if m1 != m2:
            raise ValueError("bus registries differ between terms")
        out *= coherent_overlap(a, b)
    return out


def _check_registry(terms: Iterable[BranchTerm], registry: tuple[str, ...]) -> None:
    for t in terms:
        if t.bus.modes() != registry:
            raise ValueError(
                f"term bus modes {t.bus.modes()} do not match registry {registry}"
            )


@dataclass(frozen=True)
class HybridKet:
    """Finite superposition of photon-pattern (x) coherent-product terms."""

    terms: tuple[BranchTerm, ...]
    registry: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_registry(self.terms, self.registry)

    @classmethod
    def assemble(
        cls, terms: Iterable[BranchTerm], registry: tuple[str, ...]
    ) -> "HybridKet":
        """Build a ket, merging identical terms and pruning tiny ones."""
        merged: dict[tuple[PhotonPattern, CoherentLabel], complex] = {}
        for t in terms:
            key = (t.pattern, t.bus)
            merged[key] = merged.get(key, 0.0 + 0.0j) + complex(t.coeff)
        kept = tuple(
            BranchTerm(c, pat, bus)
            for (pat, bus), c in merged.items()
            if abs(c) > PRUNE_TOL
        )
        return cls(kept, registry)

    def map_terms(self, fn: Callable[[BranchTerm], BranchTerm]) -> "HybridKet":
        return HybridKet.assemble((fn(t) for t in self.terms), self.registry)


def ket(
    entries: Iterable[tuple[complex, PhotonPattern, Mapping[str, complex]]],
    registry: tuple[str, ...],
) -> HybridKet:
    """Convenience constructor from (coeff, pattern, {mode: amp}) triples."""
    terms = [
        BranchTerm(complex(c), pat, CoherentLabel.of({m: amps.get(m, 0.0) for m in registry}))
        for c, pat, amps in entries
    ]
    return HybridKet.assemble(terms, registry)


@dataclass(frozen=True)
class BranchedDensity:
    """Mixed state rho = sum_ij c_i conj(c_j) G_ij |i><j| over branch terms.

    G is Hermitian with unit diagonal and |G_ij| <= 1; it carries exactly
    the decoherence factors accumulated by traced-out loss environments.
    G_ij multiplies the operator |i><j|, so a later environment overlap
    <e_j|e_i> lands in G_ij.
    """

    branches: tuple[BranchTerm, ...]
    gram: np.ndarray
    registry: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_registry(self.branches, self.registry)
        g = np.array(self.gram, dtype=complex)
        n = len(self.branches)
        if g.shape != (n, n):
            raise ValueError(f"gram shape {g.shape} does not match {n} branches")
        if not np.allclose(g, g.conj().T, atol=_GRAM_TOL):
            raise ValueError("gram matrix is not Hermitian")
        if not np.allclose(np.diag(g).real, 1.0, atol=_GRAM_TOL):
            raise ValueError("gram diagonal must be 1")
        if np.any(np.abs(g) > 1.0 + _GRAM_TOL):
            raise ValueError("gram entries must have modulus <= 1")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_ket(cls, state: HybridKet) -> "BranchedDensity":
        n = len(state.terms)
        return cls(state.terms, np.ones((n, n), dtype=complex), state.registry)

    def map_branches(self, fn: Callable[[BranchTerm], BranchTerm]) -> "BranchedDensity":
        """Apply a term-local unitary relabeling; the Gram matrix rides along."""
        return BranchedDensity(
            tuple(fn(b) for b in self.branches), self.gram, self.registry
        )

    def trace(self) -> float:
        return sum(
            (b.coeff * b.coeff.conjugate()).real * self.gram[i, i].real
            for i, b in enumerate(self.branches)
        )


State = Union[HybridKet, BranchedDensity]


def norm(state: HybridKet) -> float:
    """Euclidean norm sqrt(<psi|psi>) of a hybrid ket."""
    acc = 0.0 + 0.0j
    for i, ti in enumerate(state.terms):
        for j, tj in enumerate(state.terms):
            ov = term_overlap(ti, tj)
            if ov != 0.0:
                acc += ti.coeff.conjugate() * tj.coeff * ov
    val = acc.real
    return math.sqrt(val) if val > 0.0 else 0.0


def project_pattern(
    state: HybridKet, predicate: Callable[[PhotonPattern], bool]
) -> tuple[HybridKet, float]:
    """Project onto the photon patterns accepted by ``predicate``.

    Returns the unnormalized projected ket together with its squared norm,
    i.e. the probability of the projective outcome.  Projecting everything
    away is legal and yields an empty ket with probability 0.
    """
    kept = tuple(t for t in state.terms if predicate(t.pattern))
    projected = HybridKet(kept, state.registry)
    p = norm(projected) ** 2
    return projected, p


def loss_channel(state: State, bus_mode: str, eta: float) -> BranchedDensity:
    """Linear loss of transmittance ``eta`` on one bus mode.

    Each branch label a on that mode becomes sqrt(eta) a, and the pairwise
    Gram entries pick up the overlap of the environment kets
    |sqrt(1-eta) a_j> and |sqrt(1-eta) a_i>.  Applying the channel twice
    composes exactly: eta_1 then eta_2 equals eta_1 * eta_2.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmittance must be in [0, 1], got {eta}")
    if isinstance(state, HybridKet):
        state = BranchedDensity.from_ket(state)
    root_t = math.sqrt(eta)
    root_r = math.sqrt(1.0 - eta)
    amps = [b.bus.amp(bus_mode) for b in state.branches]
    n = len(state.branches)
    g = np.array(state.gram, dtype=complex)
    for i in range(n):
        for j in range(n):
            # environment overlap <e_j|e_i> attached to |i><j|
            g[i, j] *= coherent_overlap(root_r * amps[j], root_r * amps[i])
    branches = tuple(
        BranchTerm(b.coeff, b.pattern, b.bus.replace(bus_mode, root_t * amps[i]))
        for i, b in enumerate(state.branches)
    )
    return BranchedDensity(branches, g, state.registry)


def fidelity_with(state: State, target: HybridKet) -> float:
    """<target| rho |target> for a branched density (or |<t|psi>|^2 for a ket).

    The target is taken as given, without renormalization.
    """
    if isinstance(state, HybridKet):
        amp = 0.0 + 0.0j
        for tt in target.terms:
            for ts in state.terms:
                ov = term_overlap(tt, ts)
                if ov != 0.0:
                    amp += tt.coeff.conjugate() * ts.coeff * ov
        return abs(amp) ** 2
    # v_i = <target|branch_i>
    v = np.zeros(len(state.branches), dtype=complex)
    for i, b in enumerate(state.branches):
        acc = 0.0 + 0.0j
        for tt in target.terms:
            ov = term_overlap(tt, b)
            if ov != 0.0:
                acc += tt.coeff.conjugate() * b.coeff * ov
        v[i] = acc
    return float(np.real(v @ state.gram @ v.conj()))
