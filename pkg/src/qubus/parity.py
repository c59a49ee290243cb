"""Linear-optical parity filter over eight which-path modes per side.

A bi-photon state with one photon at location A and one at B is a matrix
C: the coefficient of creation operators a_m b_n is C[m, n].  Local mode
mixing multiplies C by the unitary on the left (side A) or by its
transpose on the right (side B).  Four fixed unitaries route even-parity
inputs to one set of track pairs and odd-parity inputs to the other, so a
which-track measurement splits the Bell basis two by two without touching
the photons' polarization content.

Mode numbering is 1-based in all docstrings and port tables: 1,2 are the
input rails, tracks (3,4) form the K port and (5,6) the R port of each
side, with H on the lower index.  Arrays are of course 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .states import HybridKet, ket, photon_pattern

RESIDUAL_TOL = 1e-10

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class ModeMatrix:
    """Bi-photon amplitude matrix over 8 A-modes x 8 B-modes."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (8, 8):
            raise ValueError(f"expected an 8x8 coefficient matrix, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class LocalUnitary:
    """8x8 mode transformation applied at one location.

    Unitarity is not enforced here (verify_circuit checks it), so faulty
    matrices can be injected deliberately when exercising the checker.
    """

    matrix: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (8, 8):
            raise ValueError(f"expected 8x8, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class PortPair:
    label: str
    a_modes: tuple[int, int]
    b_modes: tuple[int, int]


PORT_PAIRS = {
    "K_A K_B": PortPair("K_A K_B", (3, 4), (3, 4)),
    "K_A R_B": PortPair("K_A R_B", (3, 4), (5, 6)),
    "R_A K_B": PortPair("R_A K_B", (5, 6), (3, 4)),
    "R_A R_B": PortPair("R_A R_B", (5, 6), (5, 6)),
}

BELL_LABELS = {1: "Phi+", 2: "Phi-", 3: "Psi+", 4: "Psi-"}


def bell_to_whichpath(bell_index: int) -> ModeMatrix:
    """The four Bell states on the input rails 1, 2 of each side."""
    c = np.zeros((8, 8), dtype=complex)
    h = 1.0 / _SQRT2
    if bell_index == 1:
        c[0, 0], c[1, 1] = h, h
    elif bell_index == 2:
        c[0, 0], c[1, 1] = h, -h
    elif bell_index == 3:
        c[0, 1], c[1, 0] = h, h
    elif bell_index == 4:
        c[0, 1], c[1, 0] = h, -h
    else:
        raise ValueError(f"bell index must be 1..4, got {bell_index}")
    return ModeMatrix(c)


def polarization_to_whichpath(vec) -> ModeMatrix:
    """Embed a (HH, HV, VH, VV) polarization ket on the input rails."""
    v = np.asarray(vec, dtype=complex).reshape(4)
    c = np.zeros((8, 8), dtype=complex)
    c[0, 0], c[0, 1], c[1, 0], c[1, 1] = v[0], v[1], v[2], v[3]
    return ModeMatrix(c)


def build_unitaries() -> tuple[LocalUnitary, LocalUnitary, LocalUnitary, LocalUnitary]:
    """The four local stages, each embedded as an 8x8 unitary.

    U1 mixes rails (1,2) with (3,4) as a balanced splitter pair, U2
    permutes those four modes with an i V twist (V = [[0,1],[-1,0]]),
    U3 is U1 transposed, and U4 swaps (1,2) with (5,6) while flipping
    the sign of modes 7, 8; built from the complementary projectors
    P1 = diag(0,0,1,1) and P2 = diag(1,1,0,0).
    """
    eye2 = np.eye(2)
    u1 = np.eye(8, dtype=complex)
    u1[0:4, 0:4] = np.block([[eye2, eye2], [-eye2, eye2]]) / _SQRT2

    v = np.array([[0.0, 1.0], [-1.0, 0.0]])
    zero = np.zeros((2, 2))
    u2 = np.eye(8, dtype=complex)
    u2[0:4, 0:4] = np.block([[zero, 1j * v], [eye2, zero]])

    u3 = np.eye(8, dtype=complex)
    u3[0:4, 0:4] = u1[0:4, 0:4].T

    p1 = np.diag([0.0, 0.0, 1.0, 1.0])
    p2 = np.diag([1.0, 1.0, 0.0, 0.0])
    u4 = np.block([[p1, p2], [p2, -p1]]).astype(complex)

    return (
        LocalUnitary(u1, "U1"),
        LocalUnitary(u2, "U2"),
        LocalUnitary(u3, "U3"),
        LocalUnitary(u4, "U4"),
    )


def apply_local(state: ModeMatrix, u: LocalUnitary, side: str) -> ModeMatrix:
    if side == "A":
        return ModeMatrix(u.matrix @ state.coeffs)
    if side == "B":
        return ModeMatrix(state.coeffs @ u.matrix.T)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def full_transform(state: ModeMatrix, unitaries=None) -> ModeMatrix:
    """Run all four stages on both sides.

    The input must live on the input rails (modes 1, 2) of each side;
    the output is supported on the tracks 3..6.
    """
    c = state.coeffs
    outside = np.abs(c).copy()
    outside[0:2, 0:2] = 0.0
    if outside.max() > 1e-12:
        raise ValueError("input state must be supported on modes 1, 2 of each side")
    if unitaries is None:
        unitaries = build_unitaries()
    out = state
    for u in unitaries:
        out = apply_local(out, u, "A")
        out = apply_local(out, u, "B")
    return out


def project_port_pair(state: ModeMatrix, pair: PortPair) -> tuple[np.ndarray, float]:
    """Extract one 2x2 track block, relabeled to polarization (H, V).

    Returns the unnormalized block and its squared norm, the probability
    of finding the photons in that pair of ports.
    """
    rows = [m - 1 for m in pair.a_modes]
    cols = [m - 1 for m in pair.b_modes]
    block = state.coeffs[np.ix_(rows, cols)].copy()
    prob = float(np.sum(np.abs(block) ** 2))
    return block, prob


def schmidt_rank(block: np.ndarray, tol: float = 1e-10) -> int:
    """Number of singular values above tol; 1 means separable."""
    b = np.asarray(block, dtype=complex)
    if np.allclose(b, 0.0, atol=1e-300):
        raise ValueError("zero block has no Schmidt decomposition")
    return int(np.sum(np.linalg.svd(b, compute_uv=False) > tol))


def whichpath_to_hybrid(state: ModeMatrix, registry: tuple[str, ...] = ()) -> HybridKet:
    """Rewrite a mode matrix as a hybrid ket with empty bus content."""
    entries = []
    c = state.coeffs
    for m in range(8):
        for n in range(8):
            if c[m, n] != 0.0:
                entries.append((c[m, n], photon_pattern(f"A.{m + 1}", f"B.{n + 1}"), {}))
    return ket(entries, registry)


# Bell matrices in the (H, V) x (H, V) polarization basis.
_BELL_BLOCKS = {
    "Phi+": np.array([[1, 0], [0, 1]], dtype=complex) / _SQRT2,
    "Phi-": np.array([[1, 0], [0, -1]], dtype=complex) / _SQRT2,
    "Psi+": np.array([[0, 1], [1, 0]], dtype=complex) / _SQRT2,
    "Psi-": np.array([[0, 1], [-1, 0]], dtype=complex) / _SQRT2,
}


def bell_block(label: str) -> np.ndarray:
    return _BELL_BLOCKS[label].copy()


def _combo(*parts: tuple[complex, str]) -> np.ndarray:
    out = np.zeros((2, 2), dtype=complex)
    for coeff, label in parts:
        out += coeff * _BELL_BLOCKS[label]
    return out


# Expected output blocks of full_transform per Bell input: for each input
# index, the two nonzero port blocks with their exact 1/2-amplitude
# contents.  Every block is separable (Schmidt rank 1).
EXPECTED_BELL_BLOCKS: dict[int, dict[str, np.ndarray]] = {
    1: {
        "K_A R_B": _combo((-0.5, "Phi+"), (0.5j, "Psi-")),
        "R_A K_B": _combo((-0.5, "Phi+"), (-0.5j, "Psi-")),
    },
    2: {
        "K_A K_B": _combo((0.5, "Phi-"), (0.5j, "Psi+")),
        "R_A R_B": _combo((0.5, "Phi-"), (-0.5j, "Psi+")),
    },
    3: {
        "K_A K_B": _combo((0.5, "Psi+"), (-0.5j, "Phi-")),
        "R_A R_B": _combo((0.5, "Psi+"), (0.5j, "Phi-")),
    },
    4: {
        "K_A R_B": _combo((-0.5, "Psi-"), (-0.5j, "Phi+")),
        "R_A K_B": _combo((-0.5, "Psi-"), (0.5j, "Phi+")),
    },
}


@dataclass
class CircuitCheck:
    name: str
    residual: float

    @property
    def ok(self) -> bool:
        return self.residual < RESIDUAL_TOL


@dataclass
class CircuitReport:
    checks: list[CircuitCheck] = field(default_factory=list)

    def add(self, name: str, residual: float) -> None:
        self.checks.append(CircuitCheck(name, float(residual)))

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[CircuitCheck]:
        return [c for c in self.checks if not c.ok]

    def render(self) -> str:
        lines = []
        for c in self.checks:
            status = "ok  " if c.ok else "FAIL"
            lines.append(f"{status}  {c.residual:.3e}  {c.name}")
        verdict = "all checks passed" if self.all_ok else (
            f"{len(self.failures())} of {len(self.checks)} checks failed"
        )
        lines.append(verdict)
        return "\n".join(lines)


def verify_circuit(unitaries=None, rng_seed: int = 7) -> CircuitReport:
    """Run the full invariant suite against the (possibly injected) stages.

    Covers unitarity of each stage, the Bell-input block tables, the
    |HH> product-state output, index-swap symmetry, and linearity on a
    few pseudorandom superpositions.
    """
    if unitaries is None:
        unitaries = build_unitaries()
    report = CircuitReport()

    for u in unitaries:
        res = np.max(np.abs(u.matrix @ u.matrix.conj().T - np.eye(8)))
        report.add(f"unitarity {u.name or 'stage'}", res)

    transformed = {}
    for mu in range(1, 5):
        out = full_transform(bell_to_whichpath(mu), unitaries)
        transformed[mu] = out
        expected = EXPECTED_BELL_BLOCKS[mu]
        for label, pair in PORT_PAIRS.items():
            block, prob = project_port_pair(out, pair)
            want = expected.get(label)
            if want is None:
                report.add(f"{BELL_LABELS[mu]} -> {label} vanishes", np.max(np.abs(block)))
            else:
                report.add(
                    f"{BELL_LABELS[mu]} -> {label} block",
                    np.max(np.abs(block - want)),
                )
                # Each landing block is half the weight; its two Bell
                # components carry 1/4 each.
                report.add(
                    f"{BELL_LABELS[mu]} -> {label} block weight 1/2",
                    abs(prob - 0.5),
                )

    # |HH> = (Phi+ + Phi-)/sqrt2 lands on K_A K_B as the product state
    # (|H> + i|V>)(|H> + i|V>)/2 with amplitude 1/2.
    hh = polarization_to_whichpath([1.0, 0.0, 0.0, 0.0])
    hh_out = full_transform(hh, unitaries)
    uu = np.array([1.0, 1.0j], dtype=complex)
    want_hh = 0.25 * np.outer(uu, uu)
    block, _ = project_port_pair(hh_out, PORT_PAIRS["K_A K_B"])
    report.add("HH -> K_A K_B product block", np.max(np.abs(block - want_hh)))

    # Swapping input rails 1 and 2 on both sides fixes the symmetric Bell
    # inputs and negates the antisymmetric ones.
    swap = np.eye(8, dtype=complex)
    swap[0, 0] = swap[1, 1] = 0.0
    swap[0, 1] = swap[1, 0] = 1.0
    for mu, sign in ((1, 1.0), (2, -1.0), (3, 1.0), (4, -1.0)):
        c = bell_to_whichpath(mu).coeffs
        swapped = full_transform(ModeMatrix(swap @ c @ swap.T), unitaries)
        report.add(
            f"rail-swap parity of {BELL_LABELS[mu]}",
            np.max(np.abs(swapped.coeffs - sign * transformed[mu].coeffs)),
        )

    rng = np.random.default_rng(rng_seed)
    for trial in range(3):
        coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
        coeffs /= np.linalg.norm(coeffs)
        combined = sum(
            c * bell_to_whichpath(mu).coeffs for c, mu in zip(coeffs, range(1, 5))
        )
        lhs = full_transform(ModeMatrix(combined), unitaries).coeffs
        rhs = sum(c * transformed[mu].coeffs for c, mu in zip(coeffs, range(1, 5)))
        report.add(f"linearity on random input {trial}", np.max(np.abs(lhs - rhs)))

    return report
