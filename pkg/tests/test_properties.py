"""Randomized invariants (hypothesis); the conservation and unitarity checks
together cover well over 1000 generated cases."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from _factories import DEVICE_TYPES, random_device, random_packet, random_synthesized
from homsim.analysis import hom_kernel, simulate
from homsim.spectral import (
    WavePacket,
    apply_delay,
    from_time_domain,
    inner_product,
    make_uniform_grid,
    to_time_domain,
    two_photon_input,
)
from homsim.transforms import (
    BraggParams,
    MirrorParams,
    apply_kernel,
    cw_bragg,
    moving_mirror,
    verify_unitarity,
)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
angles = st.floats(min_value=0.0, max_value=math.pi / 2)


def _conserves(kernel, rng):
    assert verify_unitarity(kernel).max_residual <= 1e-10
    red, blue = random_packet(rng, kernel.basis.red), random_packet(rng, kernel.basis.blue)
    p = simulate(kernel, red, blue)
    assert abs(p.total - 1) <= 1e-10
    assert min(p.p_rr, p.p_rb, p.p_bb) >= 0


@settings(max_examples=500, deadline=None)
@given(kind=st.sampled_from(DEVICE_TYPES), n=st.integers(1, 12), seed=seeds)
def test_builtin_devices_conserve_probability(kind, n, seed):
    rng = np.random.default_rng(seed)
    _conserves(random_device(rng, kind, n), rng)


@settings(max_examples=250, deadline=None)
@given(angle=angles, beta=st.floats(-0.95, 0.95), shift=st.floats(6.0, 40.0),
       n=st.integers(1, 10), seed=seeds)
def test_active_devices_from_parameters(angle, beta, shift, n, seed):
    rng = np.random.default_rng(seed)
    tau, rho = math.cos(angle), math.sin(angle)
    red = make_uniform_grid(10.0, 4.0, n)
    _conserves(moving_mirror(MirrorParams(tau, rho, beta), red), rng)
    _conserves(cw_bragg(BraggParams(tau, rho, shift), red), rng)


@settings(max_examples=250, deadline=None)
@given(n=st.integers(2, 16), data=st.data(), seed=seeds)
def test_synthesized_kernels(n, data, seed):
    m = data.draw(st.integers(1, n // 2))
    rng = np.random.default_rng(seed)
    kernel, spec = random_synthesized(rng, n, m)
    _conserves(kernel, rng)
    sigma = hom_kernel(kernel).singular_values()
    assert sigma[0] <= 1 + 1e-10
    expected = np.sort(2 * spec.taus * np.sqrt(1 - spec.taus ** 2))[::-1]
    assert np.max(np.abs(sigma[:m] - expected)) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 32), t=st.floats(-50, 50), seed=seeds)
def test_delay_preserves_overlaps(n, t, seed):
    rng = np.random.default_rng(seed)
    grid = make_uniform_grid(10.0, 4.0, n)
    p, q = random_packet(rng, grid), random_packet(rng, grid)
    before = abs(inner_product(p, q))
    after = abs(inner_product(apply_delay(p, t), apply_delay(q, t)))
    assert abs(before - after) < 1e-12
    assert abs(np.sum(np.abs(apply_delay(p, t).amps) ** 2) - 1) < 1e-12


@settings(max_examples=100, deadline=None)
@given(n_red=st.integers(1, 10), n_blue=st.integers(1, 10), seed=seeds)
def test_two_photon_input_invariants(n_red, n_blue, seed):
    rng = np.random.default_rng(seed)
    red = random_packet(rng, make_uniform_grid(10.0, 4.0, n_red))
    blue = random_packet(rng, make_uniform_grid(30.0, 4.0, n_blue))
    s = two_photon_input(red, blue)
    a = s.amplitudes
    assert np.array_equal(a, a.T)
    assert not np.any(a[s.basis.red_slice, s.basis.red_slice])
    assert not np.any(a[s.basis.blue_slice, s.basis.blue_slice])
    assert abs(s.norm() - 1) < 1e-12


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 64), pad=st.integers(0, 64), seed=seeds)
def test_time_domain_round_trip(n, pad, seed):
    rng = np.random.default_rng(seed)
    p = random_packet(rng, make_uniform_grid(10.0, 4.0, n))
    temporal = to_time_domain(p, n + pad)
    assert abs(temporal.norm() - 1) < 1e-10
    np.testing.assert_allclose(from_time_domain(temporal).amps, p.amps, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(kind=st.sampled_from(DEVICE_TYPES), n=st.integers(1, 6), seed=seeds)
def test_propagation_keeps_symmetry(kind, n, seed):
    rng = np.random.default_rng(seed)
    kernel = random_device(rng, kind, n)
    state = two_photon_input(random_packet(rng, kernel.basis.red),
                             WavePacket(kernel.basis.blue,
                                        random_packet(rng, kernel.basis.blue).amps),
                             kernel.basis)
    out = apply_kernel(kernel, state).amplitudes
    assert np.array_equal(out, out.T)
