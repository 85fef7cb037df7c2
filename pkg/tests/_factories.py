"""Seeded generators shared by the test modules."""

import math

import numpy as np
from scipy.stats import unitary_group

from homsim.spectral import Band, ModeBasis, WavePacket, make_uniform_grid
from homsim.transforms import (
    BlockKernel,
    BraggParams,
    MirrorParams,
    SchmidtEntry,
    SchmidtSpec,
    cw_bragg,
    moving_mirror,
    passive_splitter,
    synthesize_kernel,
)

DEVICE_TYPES = ("passive", "mirror", "cw_bragg", "synthesized")


def basis_pair(n_red, n_blue=None, red_center=10.0, blue_center=30.0, span=8.0):
    n_blue = n_red if n_blue is None else n_blue
    return ModeBasis(make_uniform_grid(red_center, span, n_red, Band.RED),
                     make_uniform_grid(blue_center, span, n_blue, Band.BLUE))


def orthonormal_columns(rng, n, m):
    z = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
    q, _ = np.linalg.qr(z)
    return q


def random_packet(rng, grid):
    z = rng.normal(size=grid.size) + 1j * rng.normal(size=grid.size)
    return WavePacket.normalized(grid, z)


def random_schmidt_spec(rng, basis, m, taus=None):
    red = orthonormal_columns(rng, basis.n_red, 2 * m)
    blue = orthonormal_columns(rng, basis.n_blue, 2 * m)
    if taus is None:
        taus = rng.uniform(0.05, 0.995, size=m)
    entries = []
    for n in range(m):
        entries.append(SchmidtEntry(
            tau=float(taus[n]),
            V=WavePacket(basis.red, red[:, 2 * n]),
            v=WavePacket(basis.red, red[:, 2 * n + 1]),
            W=WavePacket(basis.blue, blue[:, 2 * n]),
            w=WavePacket(basis.blue, blue[:, 2 * n + 1]),
            theta=float(rng.uniform(0, 2 * math.pi)),
        ))
    return SchmidtSpec(entries)


def random_synthesized(rng, n, m, taus=None):
    basis = basis_pair(n)
    spec = random_schmidt_spec(rng, basis, m, taus)
    return synthesize_kernel(spec, basis), spec


def haar_kernel(rng, n):
    basis = basis_pair(n)
    u = unitary_group.rvs(2 * n, random_state=rng)
    return BlockKernel(basis, u)


def random_coefficients(rng):
    angle = rng.uniform(0, math.pi / 2)
    return math.cos(angle), math.sin(angle)


def random_device(rng, kind, n):
    """One random built-in kernel of the given kind with ``n`` modes per band."""
    tau, rho = random_coefficients(rng)
    red = make_uniform_grid(10.0, 4.0, n)
    if kind == "passive":
        return passive_splitter(tau, rho, red)
    if kind == "mirror":
        return moving_mirror(MirrorParams(tau, rho, float(rng.uniform(-0.9, 0.9))), red)
    if kind == "cw_bragg":
        return cw_bragg(BraggParams(tau, rho, float(rng.uniform(5.0, 20.0))), red)
    if kind == "synthesized":
        m = max(1, n // 2) if n >= 2 else 0
        if m == 0:
            return passive_splitter(tau, rho, red)
        kernel, _ = random_synthesized(rng, n, int(rng.integers(1, m + 1)))
        return kernel
    raise ValueError(kind)
