"""Device transformations as unitary block kernels.

A :class:`BlockKernel` stores the "maps-to" matrix ``M``: row ``i`` lists the
output creation operators that input creation operator ``i`` turns into,
``a_i^dag -> sum_k M[i, k] a_k^dag``. Rows and columns run over the red grid
followed by the blue grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import (
    BandOverlap,
    BasisMismatch,
    InvalidArgument,
    InvalidCoefficients,
    IoError,
    NonOrthonormalModes,
    NotUnitary,
    ParseError,
    TooManyModes,
)
from .spectral import (
    Band,
    FrequencyGrid,
    ModeBasis,
    TwoPhotonState,
    WavePacket,
    check_same_grid,
)

COEFF_TOL = 1e-9
UNITARITY_TOL = 1e-10
ORTHONORMAL_TOL = 1e-10
KERNEL_FORMAT = "homsim.kernel"


@dataclass(frozen=True, eq=False)
class BlockKernel:
    basis: ModeBasis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        size = self.basis.size
        if m.shape != (size, size):
            raise InvalidArgument(f"kernel matrix must be {size}x{size}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def rr(self) -> np.ndarray:
        """Red input to red output (G_RR)."""
        return self.matrix[self.basis.red_slice, self.basis.red_slice]

    @property
    def rb(self) -> np.ndarray:
        """Red input to blue output (G_RB)."""
        return self.matrix[self.basis.red_slice, self.basis.blue_slice]

    @property
    def br(self) -> np.ndarray:
        return self.matrix[self.basis.blue_slice, self.basis.red_slice]

    @property
    def bb(self) -> np.ndarray:
        return self.matrix[self.basis.blue_slice, self.basis.blue_slice]

    @property
    def transfer_matrix(self) -> np.ndarray:
        """Column-vector form: output amplitudes = T @ input amplitudes."""
        return self.matrix.T

    @property
    def blue_grid(self) -> FrequencyGrid:
        return self.basis.blue

    def adjoint(self) -> "BlockKernel":
        """Backward transformation (same basis, matrix M^dagger)."""
        return BlockKernel(self.basis, self.matrix.conj().T)


def _check_coefficients(tau: float, rho: float):
    if not (math.isfinite(tau) and math.isfinite(rho)) or tau < 0 or rho < 0:
        raise InvalidCoefficients(f"tau and rho must be non-negative reals, got {tau!r}, {rho!r}")
    if abs(tau * tau + rho * rho - 1.0) > COEFF_TOL:
        raise InvalidCoefficients(
            f"coefficients violate τ²+ρ²=1: {tau!r}² + {rho!r}² = {tau * tau + rho * rho!r}")


@dataclass(frozen=True)
class MirrorParams:
    tau: float
    rho: float
    beta: float

    def __post_init__(self):
        _check_coefficients(self.tau, self.rho)
        if not math.isfinite(self.beta) or abs(self.beta) >= 1:
            raise InvalidArgument(f"mirror speed must satisfy |beta| < 1, got {self.beta!r}")

    @property
    def alpha(self) -> float:
        """Doppler factor (1 - beta) / (1 + beta) of the double reflection."""
        return (1.0 - self.beta) / (1.0 + self.beta)


@dataclass(frozen=True)
class BraggParams:
    tau: float
    rho: float
    omega_shift: float

    def __post_init__(self):
        _check_coefficients(self.tau, self.rho)
        if not math.isfinite(self.omega_shift):
            raise InvalidArgument("omega_shift must be finite")


def _pairwise_kernel(basis: ModeBasis, tau: float, rho: float) -> BlockKernel:
    n = basis.n_red
    eye = np.eye(n)
    matrix = np.block([[tau * eye, -rho * eye], [rho * eye, tau * eye]])
    return BlockKernel(basis, matrix)


def passive_splitter(tau: float, rho: float, grid: FrequencyGrid) -> BlockKernel:
    """Frequency-preserving beam splitter; both ports share ``grid``."""
    _check_coefficients(tau, rho)
    basis = ModeBasis(grid.relabel(Band.PORT1), grid.relabel(Band.PORT2))
    return _pairwise_kernel(basis, tau, rho)


def moving_mirror(params: MirrorParams, red_grid: FrequencyGrid) -> BlockKernel:
    """Semi-transparent mirror moving at ``beta * c``.

    The blue grid is the red grid divided by the Doppler factor, so red mode
    ``k`` couples only to blue mode ``k``. With amplitudes carrying
    ``sqrt(d_omega)``, the ``sqrt(alpha)`` measure factors cancel and each pair
    sees the plain 2x2 rotation ``[[tau, -rho], [rho, tau]]``. The blue grid is
    available as ``kernel.blue_grid``.
    """
    red = red_grid.relabel(Band.RED)
    blue = red.scaled(1.0 / params.alpha, Band.BLUE)
    return _pairwise_kernel(ModeBasis(red, blue), params.tau, params.rho)


def cw_bragg(params: BraggParams, red_grid: FrequencyGrid) -> BlockKernel:
    """Frequency translation by ``omega_shift`` with monochromatic pumps."""
    red = red_grid.relabel(Band.RED)
    blue = red.shifted(params.omega_shift, Band.BLUE)
    if not (blue.points[0] > red.points[-1] or blue.points[-1] < red.points[0]):
        raise BandOverlap(
            f"shift {params.omega_shift!r} makes the blue band overlap the red band; "
            "use passive_splitter for an unshifted splitter")
    return _pairwise_kernel(ModeBasis(red, blue), params.tau, params.rho)


@dataclass(frozen=True, eq=False)
class SchmidtEntry:
    """One generalized beam splitter: inputs V (red), W (blue); outputs v, w."""

    tau: float
    V: WavePacket
    v: WavePacket
    W: WavePacket
    w: WavePacket
    theta: float = 0.0

    @property
    def rho(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.tau * self.tau))


@dataclass(frozen=True, eq=False)
class SchmidtSpec:
    entries: Sequence[SchmidtEntry] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def taus(self) -> np.ndarray:
        return np.array([e.tau for e in self.entries], dtype=float)


def _stack(packets, grid, label) -> np.ndarray:
    for p in packets:
        check_same_grid(grid, p.grid, label)
    if not packets:
        return np.zeros((grid.size, 0), dtype=complex)
    mat = np.column_stack([p.amps for p in packets])
    gram = mat.conj().T @ mat
    err = float(np.max(np.abs(gram - np.eye(len(packets)))))
    if err > ORTHONORMAL_TOL:
        raise NonOrthonormalModes(f"{label} modes are not orthonormal (Gram residual {err:.3g})")
    return mat


def _complement(mat: np.ndarray) -> np.ndarray:
    n = mat.shape[0]
    if mat.shape[1] == 0:
        return np.eye(n, dtype=complex)
    return null_space(mat.conj().T)


def synthesize_kernel(spec: SchmidtSpec, basis: ModeBasis) -> BlockKernel:
    """Build the kernel whose Schmidt-mode form is given by ``spec``.

    Each entry contributes ``tau V v^dag`` to G_RR, ``-rho e^{i theta} V w^dag``
    to G_RB, ``rho e^{-i theta} W v^dag`` to G_BR and ``tau W w^dag`` to G_BB.
    Modes outside the spanned subspaces pass through unconverted (tau = 1).
    """
    entries = spec.entries
    m = len(entries)
    if m > min(basis.n_red, basis.n_blue):
        raise TooManyModes(
            f"{m} Schmidt entries do not fit on {basis.n_red}+{basis.n_blue} modes")
    for e in entries:
        if not (math.isfinite(e.tau) and 0.0 <= e.tau <= 1.0):
            raise InvalidCoefficients(f"Schmidt coefficient tau={e.tau!r} outside [0, 1]")
    V = _stack([e.V for e in entries], basis.red, "red input (V)")
    v = _stack([e.v for e in entries], basis.red, "red output (v)")
    W = _stack([e.W for e in entries], basis.blue, "blue input (W)")
    w = _stack([e.w for e in entries], basis.blue, "blue output (w)")
    tau = np.array([e.tau for e in entries], dtype=float)
    rho = np.array([e.rho for e in entries], dtype=float)
    phase = np.exp(1j * np.array([e.theta for e in entries], dtype=float))

    rr = (V * tau) @ v.conj().T + _complement(V) @ _complement(v).conj().T
    rb = -(V * (rho * phase)) @ w.conj().T
    br = (W * (rho * phase.conj())) @ v.conj().T
    bb = (W * tau) @ w.conj().T + _complement(W) @ _complement(w).conj().T
    return BlockKernel(basis, np.block([[rr, rb], [br, bb]]))


@dataclass(frozen=True)
class UnitarityReport:
    max_residual: float
    row_residual: float
    column_residual: float
    block_residuals: dict

    def ok(self, tol: float = UNITARITY_TOL) -> bool:
        return self.max_residual <= tol

    def as_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "row_residual": self.row_residual,
            "column_residual": self.column_residual,
            "block_residuals": dict(self.block_residuals),
        }


def verify_unitarity(kernel: BlockKernel) -> UnitarityReport:
    """Residuals of M M^dag = I, M^dag M = I and of each block condition."""
    m = kernel.matrix
    eye = np.eye(m.shape[0])
    rows = m @ m.conj().T - eye
    cols = m.conj().T @ m - eye
    r, b = kernel.basis.red_slice, kernel.basis.blue_slice

    def peak(a):
        return float(np.max(np.abs(a))) if a.size else 0.0

    blocks = {
        "RR": peak(rows[r, r]),
        "RB": peak(rows[r, b]),
        "BR": peak(rows[b, r]),
        "BB": peak(rows[b, b]),
    }
    row_res, col_res = peak(rows), peak(cols)
    return UnitarityReport(max(row_res, col_res), row_res, col_res, blocks)


def apply_kernel(kernel: BlockKernel, state: TwoPhotonState) -> TwoPhotonState:
    """Propagate a two-photon state: ``S_out = M^T S_in M``."""
    if not kernel.basis.matches(state.basis):
        raise BasisMismatch("state and kernel are defined on different mode bases")
    m = kernel.matrix
    out = m.T @ state.amplitudes @ m
    out = 0.5 * (out + out.T)
    norm = 0.5 * float(np.sum(np.abs(out) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise NotUnitary(f"propagation changed the state norm to {norm!r}")
    return TwoPhotonState(kernel.basis, out)


# --- serialization -----------------------------------------------------------

def _complex_rows(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def complex_vector(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def parse_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ParseError("complex values must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def grid_to_dict(grid: FrequencyGrid) -> dict:
    return {"band": grid.band.value, "spacing": grid.spacing,
            "points": [float(x) for x in grid.points]}


def grid_from_dict(data: dict) -> FrequencyGrid:
    try:
        return FrequencyGrid(np.array(data["points"], dtype=float), float(data["spacing"]),
                             Band(data.get("band", "red")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad grid description: {exc}") from exc


def kernel_to_dict(kernel: BlockKernel) -> dict:
    return {
        "format": KERNEL_FORMAT,
        "version": 1,
        "basis": {"red": grid_to_dict(kernel.basis.red),
                  "blue": grid_to_dict(kernel.basis.blue)},
        "matrix": _complex_rows(kernel.matrix),
    }


def kernel_from_dict(data: dict) -> BlockKernel:
    if not isinstance(data, dict) or data.get("format") != KERNEL_FORMAT:
        raise ParseError(f"not a {KERNEL_FORMAT} document")
    try:
        basis = ModeBasis(grid_from_dict(data["basis"]["red"]),
                          grid_from_dict(data["basis"]["blue"]))
        matrix = parse_complex(data["matrix"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad kernel document: missing {exc}") from exc
    return BlockKernel(basis, matrix)


def dumps(doc) -> str:
    return json.dumps(doc, allow_nan=False) + "\n"


def save_kernel(kernel: BlockKernel, path) -> None:
    try:
        Path(path).write_text(dumps(kernel_to_dict(kernel)), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoError(f"cannot write kernel to {path}: {exc}") from exc


def load_kernel(path) -> BlockKernel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read kernel file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return kernel_from_dict(data)
