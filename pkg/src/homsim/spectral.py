"""Frequency grids, single-photon wavepackets and two-photon input states.

Amplitudes are stored in the discrete measure convention
``c_k = phi(omega_k) * sqrt(d_omega)``: a normalized packet is a unit vector and
every device transformation becomes an exactly unitary matrix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    GridMismatch,
    InvalidArgument,
    NonPositiveFrequency,
    PoorlyResolved,
    ValidationError,
)

NORM_TOL = 1e-12
STATE_NORM_TOL = 1e-10
SPACING_RTOL = 1e-12
GRID_MATCH_RTOL = 1e-12
TRUNCATION_TOL = 1e-6


class Band(str, enum.Enum):
    RED = "red"
    BLUE = "blue"
    PORT1 = "port1"
    PORT2 = "port2"


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Uniformly spaced angular frequencies (rad/s) belonging to one band."""

    points: np.ndarray
    spacing: float
    band: Band = Band.RED

    def __post_init__(self):
        points = _frozen(self.points, float)
        if points.ndim != 1 or points.size == 0:
            raise InvalidArgument("a grid needs at least one point")
        if not np.all(np.isfinite(points)):
            raise InvalidArgument("grid points must be finite")
        if np.any(points <= 0):
            raise NonPositiveFrequency(
                f"grid points must be > 0, smallest is {points.min()!r}")
        spacing = float(self.spacing)
        if not spacing > 0:
            raise InvalidArgument("grid spacing must be > 0")
        if points.size > 1:
            steps = np.diff(points)
            scale = float(np.max(np.abs(points)))
            if np.max(np.abs(steps - spacing)) > SPACING_RTOL * scale:
                raise InvalidArgument("grid points are not uniformly spaced")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "band", Band(self.band))

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def center(self) -> float:
        return float(0.5 * (self.points[0] + self.points[-1]))

    @property
    def edges(self) -> tuple:
        """Lower and upper edge of the band covered by the grid cells."""
        half = 0.5 * self.spacing
        return float(self.points[0] - half), float(self.points[-1] + half)

    def matches(self, other: "FrequencyGrid") -> bool:
        """True when both grids sample the same frequencies (labels ignored)."""
        if self.size != other.size:
            return False
        scale = max(float(np.max(np.abs(self.points))), 1.0)
        return (abs(self.spacing - other.spacing) <= GRID_MATCH_RTOL * self.spacing
                and np.allclose(self.points, other.points, rtol=0,
                                atol=GRID_MATCH_RTOL * scale))

    def relabel(self, band) -> "FrequencyGrid":
        return FrequencyGrid(self.points, self.spacing, Band(band))

    def scaled(self, factor: float, band=None) -> "FrequencyGrid":
        return FrequencyGrid(self.points * factor, self.spacing * factor,
                             self.band if band is None else band)

    def shifted(self, offset: float, band=None) -> "FrequencyGrid":
        return FrequencyGrid(self.points + offset, self.spacing,
                             self.band if band is None else band)

    def __repr__(self):
        return (f"FrequencyGrid(n={self.size}, {self.points[0]:g}..{self.points[-1]:g}, "
                f"spacing={self.spacing:g}, band={self.band.value})")


def make_uniform_grid(center: float, span: float, n_points: int,
                      band=Band.RED) -> FrequencyGrid:
    """Uniform grid of ``n_points`` covering ``[center - span/2, center + span/2]``.

    A single-point grid sits at ``center`` and takes ``span`` as its spacing.
    """
    if int(n_points) != n_points or n_points < 1:
        raise InvalidArgument(f"n_points must be a positive integer, got {n_points!r}")
    n_points = int(n_points)
    if not span > 0:
        raise InvalidArgument(f"span must be > 0, got {span!r}")
    low = center - 0.5 * span
    if low <= 0:
        raise NonPositiveFrequency(
            f"lowest grid frequency {low!r} is not positive")
    if n_points == 1:
        return FrequencyGrid(np.array([center], dtype=float), span, band)
    points = np.linspace(low, center + 0.5 * span, n_points)
    return FrequencyGrid(points, span / (n_points - 1), band)


@dataclass(frozen=True, eq=False)
class WavePacket:
    """Normalized discrete spectral amplitude of one photon."""

    grid: FrequencyGrid
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps, complex)
        if amps.shape != (self.grid.size,):
            raise InvalidArgument(
                f"expected {self.grid.size} amplitudes, got shape {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgument(f"packet norm is {norm!r}, expected 1")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, grid: FrequencyGrid, amps) -> "WavePacket":
        """Build a packet from unnormalized amplitudes."""
        amps = np.asarray(amps, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0 or not np.isfinite(norm):
            raise InvalidArgument("cannot normalize a zero or non-finite amplitude vector")
        return cls(grid, amps / norm)

    def spectral_density(self) -> np.ndarray:
        """Continuum amplitude phi(omega_k) = c_k / sqrt(d_omega)."""
        return self.amps / math.sqrt(self.grid.spacing)


def _gaussian_mass_outside(grid: FrequencyGrid, center: float, width: float) -> float:
    low, high = grid.edges
    scale = width * math.sqrt(2.0)
    return 0.5 * math.erfc((high - center) / scale) + 0.5 * math.erfc((center - low) / scale)


def gaussian_packet(grid: FrequencyGrid, center: float, width: float,
                    chirp: float = 0.0, delay: float = 0.0) -> WavePacket:
    """Chirped, delayed Gaussian packet.

    Args:
        grid: frequency grid to sample on.
        center: carrier frequency (rad/s).
        width: rms width of the spectral intensity |phi|^2 (rad/s).
        chirp: quadratic spectral phase coefficient (s^2).
        delay: arrival time offset (s).

    Raises:
        PoorlyResolved: more than 1e-6 of the packet's spectral mass falls
            outside the grid.
    """
    if not width > 0:
        raise InvalidArgument(f"width must be > 0, got {width!r}")
    lost = _gaussian_mass_outside(grid, center, width)
    if lost > TRUNCATION_TOL:
        raise PoorlyResolved(
            f"{lost:.3g} of the Gaussian spectral mass lies outside the grid")
    detuning = grid.points - center
    amps = (np.exp(-detuning ** 2 / (4.0 * width ** 2))
            * np.exp(1j * chirp * detuning ** 2)
            * np.exp(1j * grid.points * delay))
    return WavePacket.normalized(grid, amps)


def _hermite_functions(x: np.ndarray, m: int) -> np.ndarray:
    # three-term recurrence for the normalized Hermite functions; stable for large orders
    out = np.empty((m, x.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    if m > 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, m - 1):
        out[n + 1] = (math.sqrt(2.0 / (n + 1)) * x * out[n]
                      - math.sqrt(n / (n + 1)) * out[n - 1])
    return out


def hermite_gauss_family(grid: FrequencyGrid, center: float, width: float,
                         m: int) -> list:
    """First ``m`` Hermite-Gauss spectral modes, orthonormalized on the grid.

    The modes are sampled and then Gram-Schmidt orthonormalized in order, so
    the order-0 member equals ``gaussian_packet(grid, center, width)``.
    """
    if int(m) != m or m < 0:
        raise InvalidArgument(f"m must be a non-negative integer, got {m!r}")
    m = int(m)
    if m > grid.size:
        raise InvalidArgument(f"cannot fit {m} orthonormal modes on {grid.size} points")
    if not width > 0:
        raise InvalidArgument(f"width must be > 0, got {width!r}")
    if m == 0:
        return []
    x = (grid.points - center) / (math.sqrt(2.0) * width)
    samples = _hermite_functions(x, m).T
    q, r = np.linalg.qr(samples)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    return [WavePacket.normalized(grid, q[:, n]) for n in range(m)]


def apply_delay(packet: WavePacket, delay: float) -> WavePacket:
    """Delay a packet by ``delay`` seconds (linear spectral phase)."""
    if delay == 0:
        return packet
    return WavePacket(packet.grid, packet.amps * np.exp(1j * packet.grid.points * delay))


def check_same_grid(expected: FrequencyGrid, actual: FrequencyGrid, what: str = "packet"):
    if not expected.matches(actual):
        raise GridMismatch(f"{what} lives on {actual!r}, expected {expected!r}")


def inner_product(p: WavePacket, q: WavePacket) -> complex:
    """<p|q> = sum_k conj(p_k) q_k."""
    check_same_grid(p.grid, q.grid)
    return complex(np.vdot(p.amps, q.amps))


@dataclass(frozen=True, eq=False)
class TemporalAmplitude:
    """Time-domain amplitude on the grid conjugate to a frequency grid.

    Normalized so that ``sum(|amps|**2) * dt == 1``.
    """

    times: np.ndarray
    amps: np.ndarray
    grid: FrequencyGrid

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else \
            2 * np.pi / self.grid.spacing

    @property
    def n_times(self) -> int:
        return int(self.times.size)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2) * self.dt)

    def rms_width(self) -> float:
        weight = np.abs(self.amps) ** 2 * self.dt
        mean = float(np.sum(weight * self.times))
        return math.sqrt(float(np.sum(weight * (self.times - mean) ** 2)))

    def mean_time(self) -> float:
        weight = np.abs(self.amps) ** 2 * self.dt
        return float(np.sum(weight * self.times))

    def peak_time(self) -> float:
        return float(self.times[int(np.argmax(np.abs(self.amps)))])


def _time_axis(n_times: int, spacing: float) -> np.ndarray:
    dt = 2.0 * np.pi / (n_times * spacing)
    return (np.arange(n_times) - n_times // 2) * dt


def to_time_domain(packet: WavePacket, n_times: Optional[int] = None) -> TemporalAmplitude:
    """Fourier transform to the DFT-conjugate time grid centered on t = 0.

    Uses ``phi(t) = (2 pi)^-1/2 * integral phi(omega) exp(-i omega t) d omega``,
    so a packet delayed by ``t_d`` peaks at ``t = t_d``. ``n_times`` larger
    than the grid size zero-pads the spectrum, refining the time step to
    ``2 pi / (n_times * d_omega)``.
    """
    grid = packet.grid
    n = grid.size
    n_times = n if n_times is None else int(n_times)
    if n_times < n:
        raise InvalidArgument(f"n_times={n_times} is smaller than the grid size {n}")
    padded = np.zeros(n_times, dtype=complex)
    padded[:n] = packet.amps
    times = _time_axis(n_times, grid.spacing)
    spectrum = np.roll(np.fft.fft(padded), n_times // 2)
    amps = (math.sqrt(grid.spacing / (2 * np.pi)) * np.exp(-1j * grid.points[0] * times)
            * spectrum)
    times.setflags(write=False)
    amps.setflags(write=False)
    return TemporalAmplitude(times, amps, grid)


def from_time_domain(temporal: TemporalAmplitude) -> WavePacket:
    """Inverse of :func:`to_time_domain`; drops any zero padding."""
    grid = temporal.grid
    n_times = temporal.n_times
    carrier = np.exp(1j * grid.points[0] * temporal.times)
    spectrum = temporal.amps * carrier / math.sqrt(grid.spacing / (2 * np.pi))
    padded = np.fft.ifft(np.roll(spectrum, -(n_times // 2)))
    return WavePacket.normalized(grid, padded[:grid.size])


def temporal_amplitude_at(packet: WavePacket, times) -> np.ndarray:
    """Evaluate the time-domain amplitude at arbitrary times (direct sum)."""
    grid = packet.grid
    times = np.atleast_1d(np.asarray(times, dtype=float))
    offsets = grid.points - grid.points[0]
    phases = np.exp(-1j * np.outer(times, offsets))
    return (math.sqrt(grid.spacing / (2 * np.pi)) * np.exp(-1j * grid.points[0] * times)
            * (phases @ packet.amps))


@dataclass(frozen=True, eq=False)
class ModeBasis:
    """Combined mode basis: the red-band grid followed by the blue-band grid."""

    red: FrequencyGrid
    blue: FrequencyGrid

    @property
    def n_red(self) -> int:
        return self.red.size

    @property
    def n_blue(self) -> int:
        return self.blue.size

    @property
    def size(self) -> int:
        return self.red.size + self.blue.size

    @property
    def red_slice(self) -> slice:
        return slice(0, self.red.size)

    @property
    def blue_slice(self) -> slice:
        return slice(self.red.size, self.size)

    def matches(self, other: "ModeBasis") -> bool:
        return self.red.matches(other.red) and self.blue.matches(other.blue)


@dataclass(frozen=True, eq=False)
class TwoPhotonState:
    """Pair-amplitude matrix ``S[k, l] = <vac| a_k a_l |psi>`` over a mode basis.

    A doubly occupied mode contributes ``|S[k, k]|**2 / 2`` to the norm.
    """

    basis: ModeBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        s = _frozen(self.amplitudes, complex)
        size = self.basis.size
        if s.shape != (size, size):
            raise InvalidArgument(f"expected a {size}x{size} pair matrix, got {s.shape}")
        if not np.array_equal(s, s.T):
            raise ValidationError("pair-amplitude matrix must be exactly symmetric")
        norm = 0.5 * float(np.sum(np.abs(s) ** 2))
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise ValidationError(f"two-photon state norm is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", s)

    def norm(self) -> float:
        # sum_{k<l} |S_kl|^2 + 1/2 sum_k |S_kk|^2 for a symmetric S
        return 0.5 * float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def cross_block(self) -> np.ndarray:
        return self.amplitudes[self.basis.red_slice, self.basis.blue_slice]


def two_photon_input(p_red: WavePacket, p_blue: WavePacket,
                     basis: Optional[ModeBasis] = None) -> TwoPhotonState:
    """One photon in each band: ``S = u v^T + v u^T`` (exactly symmetric)."""
    if basis is None:
        basis = ModeBasis(p_red.grid, p_blue.grid)
    check_same_grid(basis.red, p_red.grid, "red packet")
    check_same_grid(basis.blue, p_blue.grid, "blue packet")
    u = np.zeros(basis.size, dtype=complex)
    v = np.zeros(basis.size, dtype=complex)
    u[basis.red_slice] = p_red.amps
    v[basis.blue_slice] = p_blue.amps
    half = np.outer(u, v)
    return TwoPhotonState(basis, half + half.T)

