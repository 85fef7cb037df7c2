"""Two-photon interference analysis on block kernels.

The HOM kernel of a device is

    K = conj(G_RR) @ G_BR.T - conj(G_RB) @ G_BB.T

(rows: red modes, columns: blue modes). A red/blue input pair interferes
perfectly, leaving no red-blue coincidences, exactly when the red packet is
proportional to ``K @ blue`` and the blue packet to ``K^dag @ red`` with
reciprocal constants. That requires a unit singular value of ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import (
    DegenerateSpectrum,
    InvalidArgument,
    NotUnitary,
    NumericalError,
    RankExceeded,
)
from .spectral import (
    ModeBasis,
    TwoPhotonState,
    WavePacket,
    apply_delay,
    check_same_grid,
    two_photon_input,
)
from .transforms import BlockKernel, apply_kernel, complex_vector, verify_unitarity

UNITARY_GATE = 1e-8
RANK_TOL = 1e-10
BETA_TOL = 1e-10
DEGENERACY_TOL = 1e-8
DECOMPOSITION_FAIL = 1e-6


def _require_unitary(kernel: BlockKernel):
    residual = verify_unitarity(kernel).max_residual
    if residual > UNITARY_GATE:
        raise NotUnitary(f"kernel unitarity residual {residual:.3g} exceeds {UNITARY_GATE:g}")


@dataclass(frozen=True, eq=False)
class HomKernelMatrix:
    basis: ModeBasis
    matrix: np.ndarray

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)


def hom_kernel(kernel: BlockKernel) -> HomKernelMatrix:
    _require_unitary(kernel)
    k = kernel.rr.conj() @ kernel.br.T - kernel.rb.conj() @ kernel.bb.T
    return HomKernelMatrix(kernel.basis, k)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``K = sum_n sigma_n R_n B_n^dag``; modes are stored as columns."""

    basis: ModeBasis
    sigma: np.ndarray
    red_modes: np.ndarray
    blue_modes: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.red_modes * self.sigma) @ self.blue_modes.conj().T

    def rank(self, tol: float = RANK_TOL) -> int:
        return int(np.sum(self.sigma > tol))

    def red_packet(self, n: int) -> WavePacket:
        return WavePacket(self.basis.red, self.red_modes[:, n])

    def blue_packet(self, n: int) -> WavePacket:
        return WavePacket(self.basis.blue, self.blue_modes[:, n])


def _fix_phases(lead: np.ndarray, follow: np.ndarray):
    # largest-magnitude entry of each lead column made real positive (first index wins ties)
    for n in range(lead.shape[1]):
        idx = int(np.argmax(np.abs(lead[:, n])))
        z = lead[idx, n]
        if z == 0:
            continue
        phase = z / abs(z)
        lead[:, n] /= phase
        follow[:, n] /= phase
        lead[idx, n] = abs(z)


def schmidt_decompose(k: HomKernelMatrix) -> SchmidtDecomposition:
    """Singular-value decomposition of the HOM kernel, sigma descending."""
    u, s, vh = np.linalg.svd(k.matrix, full_matrices=False)
    red = np.array(u, dtype=complex)
    blue = np.array(vh.conj().T, dtype=complex)
    _fix_phases(red, blue)
    return SchmidtDecomposition(k.basis, s, red, blue)


@dataclass(frozen=True, eq=False)
class BeamSplitterDecomposition:
    """Pairwise beam-splitter form of the column-vector transfer matrix ``T = M^T``.

    ``T = sum_j [[E1_j a_j F1_j^dag, E1_j b_j F2_j^dag],
                 [-E2_j b_j F1_j^dag, E2_j a_j F2_j^dag]]``
    with ``a_j**2 + b_j**2 = 1``. F1/F2 are the red/blue input vectors and
    E1/E2 the red/blue output vectors, all stored as matrix columns.
    """

    basis: ModeBasis
    alpha: np.ndarray
    beta: np.ndarray
    E1: np.ndarray
    F1: np.ndarray
    E2: np.ndarray
    F2: np.ndarray
    residual: float

    def transfer_matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        top = np.hstack([(self.E1 * a) @ self.F1.conj().T, (self.E1 * b) @ self.F2.conj().T])
        bottom = np.hstack([-(self.E2 * b) @ self.F1.conj().T, (self.E2 * a) @ self.F2.conj().T])
        return np.vstack([top, bottom])

    def reconstruct(self) -> BlockKernel:
        return BlockKernel(self.basis, self.transfer_matrix().T)

    def backward_transfer_matrix(self) -> np.ndarray:
        """``T^dag`` from the same vectors with parameters (a, -b, b, a)."""
        a, b = self.alpha, self.beta
        top = np.hstack([(self.F1 * a) @ self.E1.conj().T, -(self.F1 * b) @ self.E2.conj().T])
        bottom = np.hstack([(self.F2 * b) @ self.E1.conj().T, (self.F2 * a) @ self.E2.conj().T])
        return np.vstack([top, bottom])

    @property
    def schmidt_values(self) -> np.ndarray:
        return 2.0 * self.alpha * self.beta


def _isometry_part(mat: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(mat, full_matrices=False)
    return u @ vh


def beam_splitter_decompose(kernel: BlockKernel) -> BeamSplitterDecomposition:
    """Split a unitary block kernel into independent two-mode beam splitters.

    The SVD of the red-red transfer block gives the transmissions ``alpha``
    and the red vectors. Rows of ``E1^dag B`` are ``beta_j F2_j^dag`` and
    columns of ``C F1`` are ``-beta_j E2_j``; both facts follow from
    unitarity alone, so repeated ``alpha`` values need no special alignment.
    Modes with ``beta_j`` below 1e-10 are completed from the blue-blue block
    on the orthogonal complement of the converted blue vectors.

    Raises:
        NotUnitary: unitarity residual above 1e-8.
        DegenerateSpectrum: the reconstruction residual exceeds 1e-6 and
            the transmission spectrum has repeated values.
    """
    basis = kernel.basis
    n = basis.n_red
    if basis.n_blue != n:
        raise InvalidArgument("beam-splitter decomposition needs equally sized bands")
    _require_unitary(kernel)
    t = kernel.transfer_matrix
    a, b, c, d = t[:n, :n], t[:n, n:], t[n:, :n], t[n:, n:]

    e1, alpha, f1h = np.linalg.svd(a)
    e1 = np.array(e1, dtype=complex)
    f1 = np.array(f1h.conj().T, dtype=complex)
    _fix_phases(f1, e1)
    rows = e1.conj().T @ b
    cols = c @ f1
    beta = np.linalg.norm(rows, axis=1)
    converted = beta > BETA_TOL

    f2 = np.zeros((n, n), dtype=complex)
    e2 = np.zeros((n, n), dtype=complex)
    f2[:, converted] = rows[converted].conj().T / beta[converted]
    e2[:, converted] = -cols[:, converted] / beta[converted]
    idle = np.flatnonzero(~converted)
    if idle.size:
        beta[idle] = 0.0
        rest = null_space(f2[:, converted].conj().T) if converted.any() else np.eye(n)
        if rest.shape[1] != idle.size:
            raise NumericalError("converted blue vectors are not orthonormal")
        f2[:, idle] = rest
        e2[:, idle] = _isometry_part(d @ rest)

    decomposition = BeamSplitterDecomposition(basis, alpha, beta, e1, f1, e2, f2, 0.0)
    residual = float(np.max(np.abs(decomposition.transfer_matrix() - t)))
    if residual > DECOMPOSITION_FAIL:
        if np.any(np.abs(np.diff(alpha)) < DEGENERACY_TOL):
            raise DegenerateSpectrum(
                f"reconstruction residual {residual:.3g} with repeated transmission values")
        raise NumericalError(f"beam-splitter reconstruction residual {residual:.3g}")
    return BeamSplitterDecomposition(basis, alpha, beta, e1, f1, e2, f2, residual)


def hom_kernel_from_decomposition(d: BeamSplitterDecomposition) -> HomKernelMatrix:
    """``K = 2 sum_j conj(a_j) b_j F1_j F2_j^dag``."""
    weights = 2.0 * np.conj(d.alpha) * d.beta
    return HomKernelMatrix(d.basis, (d.F1 * weights) @ d.F2.conj().T)


def gram_spectrum_residual(kernel: BlockKernel) -> float:
    """Largest eigenvalue mismatch between ``K K^dag`` and ``4 A^dag A C^dag C``."""
    k = hom_kernel(kernel).matrix
    n = kernel.basis.n_red
    t = kernel.transfer_matrix
    a, c = t[:n, :n], t[n:, :n]
    lhs = np.sort(np.linalg.eigvalsh(k @ k.conj().T))
    rhs = np.sort(np.linalg.eigvals(4.0 * (a.conj().T @ a) @ (c.conj().T @ c)).real)
    return float(np.max(np.abs(lhs - rhs)))


def coincidence_from_sigma(sigma: float) -> float:
    """Red-blue coincidence probability ``(tau^2 - rho^2)^2`` for ``2 tau rho = sigma``.

    Uses the branch ``tau >= rho``; the other branch gives the same value.
    """
    sigma = min(max(float(sigma), 0.0), 1.0)
    root = math.sqrt(1.0 - sigma * sigma)
    tau2 = 0.5 * (1.0 + root)
    rho2 = 1.0 - tau2
    return (tau2 - rho2) ** 2


@dataclass(frozen=True, eq=False)
class MatchedInputs:
    red: WavePacket
    blue: WavePacket
    sigma: float
    predicted_p_rb: float


def matched_inputs(kernel: BlockKernel, index: int = 0) -> MatchedInputs:
    """Input pair on the ``index``-th (0-based) Schmidt mode pair of the HOM kernel."""
    sd = schmidt_decompose(hom_kernel(kernel))
    rank = sd.rank()
    if not 0 <= index < rank:
        raise RankExceeded(f"Schmidt index {index} outside the kernel rank {rank}")
    sigma = float(sd.sigma[index])
    return MatchedInputs(sd.red_packet(index), sd.blue_packet(index), sigma,
                         coincidence_from_sigma(sigma))


def matched_partner(kernel: BlockKernel, p_red: WavePacket) -> WavePacket:
    """Blue packet ``~ K^dag @ red``, the best interference partner of ``p_red``."""
    k = hom_kernel(kernel)
    check_same_grid(kernel.basis.red, p_red.grid, "red packet")
    return WavePacket.normalized(kernel.basis.blue, k.matrix.conj().T @ p_red.amps)


def _joint_residual(c_red, c_blue, x, y, r, phase) -> float:
    scale = r * phase
    return math.sqrt(float(np.sum(np.abs(c_red - scale * x) ** 2)
                           + np.sum(np.abs(c_blue - y / scale) ** 2)))


def check_interference_condition(p_red: WavePacket, p_blue: WavePacket,
                                 kernel: BlockKernel) -> float:
    """Distance of a packet pair from the perfect-interference conditions.

    Minimizes ``||red - C K blue||^2 + ||blue - K^dag red / C||^2`` over the
    complex constant ``C`` and returns the square root of the minimum. Zero
    exactly when both conditions hold with reciprocal constants.
    """
    check_same_grid(kernel.basis.red, p_red.grid, "red packet")
    check_same_grid(kernel.basis.blue, p_blue.grid, "blue packet")
    k = hom_kernel(kernel).matrix
    c_red, c_blue = p_red.amps, p_blue.amps
    x = k @ c_blue
    y = k.conj().T @ c_red
    xx = float(np.vdot(x, x).real)
    yy = float(np.vdot(y, y).real)
    g = complex(np.vdot(c_red, x))
    if xx == 0.0 or yy == 0.0 or abs(g) == 0.0:
        return math.sqrt(2.0)
    # optimal phase cancels arg(g); stationary |C| solves a quartic
    phase = np.conj(g) / abs(g)
    roots = np.roots([xx, -abs(g), 0.0, abs(g), -yy])
    candidates = [r.real for r in roots if abs(r.imag) <= 1e-8 * max(1.0, abs(r)) and r.real > 0]
    if not candidates:
        return math.sqrt(2.0)
    return min(_joint_residual(c_red, c_blue, x, y, r, phase) for r in candidates)


@dataclass(frozen=True)
class OutputProbabilities:
    p_rr: float
    p_rb: float
    p_bb: float

    @property
    def total(self) -> float:
        return self.p_rr + self.p_rb + self.p_bb

    def as_dict(self) -> dict:
        return {"P_RR": self.p_rr, "P_RB": self.p_rb, "P_BB": self.p_bb}


def output_probabilities(state: TwoPhotonState) -> OutputProbabilities:
    s = state.amplitudes
    r, b = state.basis.red_slice, state.basis.blue_slice
    p_rb = float(np.sum(np.abs(s[r, b]) ** 2))
    p_rr = 0.5 * float(np.sum(np.abs(s[r, r]) ** 2))
    p_bb = 0.5 * float(np.sum(np.abs(s[b, b]) ** 2))
    return OutputProbabilities(p_rr, p_rb, p_bb)


def simulate(kernel: BlockKernel, p_red: WavePacket, p_blue: WavePacket) -> OutputProbabilities:
    """Propagate one red and one blue photon and sort the outcomes by band."""
    state = two_photon_input(p_red, p_blue, kernel.basis)
    return output_probabilities(apply_kernel(kernel, state))


@dataclass(frozen=True, eq=False)
class DipCurve:
    delays: np.ndarray
    p_rb: np.ndarray

    def __len__(self):
        return int(self.delays.size)

    def rows(self):
        return zip(self.delays.tolist(), self.p_rb.tolist())


def dip_scan(kernel: BlockKernel, p_red: WavePacket, p_blue: WavePacket,
             delays: Sequence[float]) -> DipCurve:
    """Coincidence probability while delaying the blue photon by each of ``delays``."""
    delays = np.asarray(delays, dtype=float)
    values = np.array([simulate(kernel, p_red, apply_delay(p_blue, t)).p_rb for t in delays])
    return DipCurve(delays, values)


def decomposition_report(k: HomKernelMatrix, sd: SchmidtDecomposition,
                         bsd: BeamSplitterDecomposition = None) -> dict:
    """Structured summary of the Schmidt and beam-splitter decompositions."""
    doc = {
        "sigma": [float(s) for s in sd.sigma],
        "schmidt_reconstruction_residual": float(np.max(np.abs(sd.reconstruct() - k.matrix))),
        "red_modes": [complex_vector(sd.red_modes[:, n]) for n in range(sd.sigma.size)],
        "blue_modes": [complex_vector(sd.blue_modes[:, n]) for n in range(sd.sigma.size)],
    }
    if bsd is not None:
        doc["beam_splitter"] = {
            "tau": [float(a) for a in bsd.alpha],
            "rho": [float(b) for b in bsd.beta],
            "sigma": [float(s) for s in bsd.schmidt_values],
            "reconstruction_residual": bsd.residual,
            "E1": [complex_vector(bsd.E1[:, j]) for j in range(bsd.alpha.size)],
            "F1": [complex_vector(bsd.F1[:, j]) for j in range(bsd.alpha.size)],
            "E2": [complex_vector(bsd.E2[:, j]) for j in range(bsd.alpha.size)],
            "F2": [complex_vector(bsd.F2[:, j]) for j in range(bsd.alpha.size)],
        }
    return doc

