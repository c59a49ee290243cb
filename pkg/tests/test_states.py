"""Symbolic coherent-state layer: overlap kernel, loss, branched densities."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubus.states import (
    BranchTerm,
    BranchedDensity,
    CoherentLabel,
    HybridKet,
    coherent_overlap,
    fidelity_with,
    ket,
    loss_channel,
    norm,
    photon_pattern,
    project_pattern,
)

amplitudes = st.complex_numbers(max_magnitude=8.0, allow_nan=False, allow_infinity=False)


def brute_overlap(a, b):
    # Textbook form: susceptible to cancellation, fine at moderate values.
    return cmath.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b)


@given(amplitudes, amplitudes)
def test_overlap_matches_textbook_kernel(a, b):
    got = coherent_overlap(a, b)
    want = brute_overlap(a, b)
    assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


@given(amplitudes)
def test_overlap_of_identical_labels_is_one(a):
    assert coherent_overlap(a, a) == 1.0


@given(amplitudes, amplitudes)
def test_overlap_conjugate_symmetry_and_bound(a, b):
    f = coherent_overlap(a, b)
    g = coherent_overlap(b, a)
    assert abs(f - g.conjugate()) < 1e-12
    assert abs(f) <= 1.0 + 1e-12


def test_overlap_keeps_precision_for_close_labels():
    # 1 - overlap ~ |d|^2/2 = 5e-13 must survive. The textbook form
    # cancels two exponents of size 1e4 and is only good to ~2e-12 here;
    # the direct form is exact up to the final rounding near 1.
    a = 100.0
    b = 100.0 * cmath.exp(1e-8j)
    f = coherent_overlap(a, b)
    d = b - a
    assert abs((1.0 - abs(f)) - 0.5 * abs(d) ** 2) < 1e-15


def test_photon_pattern_rejects_double_occupation():
    with pytest.raises(ValueError):
        photon_pattern("A.H", "A.V")


def test_ket_assembly_merges_and_prunes():
    pat = photon_pattern("A.H")
    bus = {"bus1": 1.0}
    state = ket([(0.5, pat, bus), (0.5, pat, bus), (1e-20, photon_pattern("A.V"), bus)], ("bus1",))
    assert len(state.terms) == 1
    assert state.terms[0].coeff == pytest.approx(1.0)


def test_norm_and_projection():
    h = 1 / math.sqrt(2)
    state = ket(
        [
            (h, photon_pattern("A.H"), {"bus1": 2.0}),
            (h * 1j, photon_pattern("A.V"), {"bus1": 2.0}),
        ],
        ("bus1",),
    )
    assert norm(state) == pytest.approx(1.0)
    picked, prob = project_pattern(state, lambda pat: "A.H" in pat.occupied)
    assert prob == pytest.approx(0.5)
    assert len(picked.terms) == 1


def test_loss_scales_labels_and_preserves_trace():
    state = ket([(1.0, photon_pattern("A.H"), {"bus1": 3.0})], ("bus1",))
    rho = loss_channel(state, "bus1", 0.49)
    assert rho.branches[0].bus.amp("bus1") == pytest.approx(0.7 * 3.0)
    assert rho.trace() == pytest.approx(1.0)


def test_loss_composes_multiplicatively():
    h = 1 / math.sqrt(2)
    state = ket(
        [
            (h, photon_pattern("A.H"), {"bus1": 2.0}),
            (h, photon_pattern("A.V"), {"bus1": 2.0 * cmath.exp(0.2j)}),
        ],
        ("bus1",),
    )
    once = loss_channel(loss_channel(state, "bus1", 0.8), "bus1", 0.5)
    direct = loss_channel(state, "bus1", 0.4)
    assert once.branches[0].bus.amp("bus1") == pytest.approx(direct.branches[0].bus.amp("bus1"))
    np.testing.assert_allclose(once.gram, direct.gram, atol=1e-12)


def test_loss_gram_stays_positive_semidefinite():
    h = 1 / math.sqrt(3)
    state = ket(
        [
            (h, photon_pattern("A.H"), {"bus1": 1.5}),
            (h, photon_pattern("A.V"), {"bus1": 1.5 * cmath.exp(0.7j)}),
            (h, photon_pattern("B.H"), {"bus1": -0.5}),
        ],
        ("bus1",),
    )
    rho = loss_channel(state, "bus1", 0.3)
    evals = np.linalg.eigvalsh(rho.gram)
    assert evals.min() > -1e-12
    assert np.allclose(np.diag(rho.gram), 1.0)


# Frozen two-branch loss oracle: alpha = 2, theta = 0.3, eta = 0.6.
# chi = exp(-(1-eta) alpha^2 (1-cos theta)), weights (1 +- chi^2)/2.
CHI = 0.93103201233928076
W_PLUS = 0.93341030400026532
W_MINUS = 0.06658969599973468


def _interferometer_output(alpha=2.0, theta=0.3):
    """Both buses carry alpha; one branch shifts bus1, the other bus2."""
    h = 1 / math.sqrt(2)
    shift = alpha * cmath.exp(1j * theta)
    return ket(
        [
            (h, photon_pattern("A.H"), {"bus1": shift, "bus2": alpha}),
            (h * 1j, photon_pattern("A.V"), {"bus1": alpha, "bus2": shift}),
        ],
        ("bus1", "bus2"),
    )


def test_two_mode_loss_reproduces_frozen_decomposition():
    eta = 0.6
    rho = loss_channel(loss_channel(_interferometer_output(), "bus1", eta), "bus2", eta)
    g01 = rho.gram[0, 1]
    # The two bus overlaps carry opposite phases, so the product is real.
    assert abs(g01.imag) < 1e-12
    assert g01.real == pytest.approx(CHI**2, rel=1e-12)

    c = np.array([b.coeff for b in rho.branches])
    m = np.outer(c, c.conj()) * rho.gram
    evals = np.sort(np.linalg.eigvalsh(m))
    assert evals[-1] == pytest.approx(W_PLUS, rel=1e-12)
    assert evals[0] == pytest.approx(W_MINUS, rel=1e-12)


def test_fidelity_against_pure_target():
    h = 1 / math.sqrt(2)
    state = ket(
        [
            (h, photon_pattern("A.H"), {}),
            (h, photon_pattern("A.V"), {}),
        ],
        (),
    )
    same = fidelity_with(state, state)
    assert same == pytest.approx(1.0)
    flipped = ket(
        [
            (h, photon_pattern("A.H"), {}),
            (-h, photon_pattern("A.V"), {}),
        ],
        (),
    )
    assert fidelity_with(state, flipped) == pytest.approx(0.0, abs=1e-12)


def test_density_fidelity_matches_pure_case():
    h = 1 / math.sqrt(2)
    state = ket(
        [
            (h, photon_pattern("A.H"), {"bus1": 1.0}),
            (h, photon_pattern("A.V"), {"bus1": 1.0}),
        ],
        ("bus1",),
    )
    rho = BranchedDensity.from_ket(state)
    target = ket(
        [
            (h, photon_pattern("A.H"), {"bus1": 1.0}),
            (h, photon_pattern("A.V"), {"bus1": 1.0}),
        ],
        ("bus1",),
    )
    assert fidelity_with(rho, target) == pytest.approx(1.0)
