import math

import numpy as np
import pytest

from _factories import basis_pair, haar_kernel, random_packet, random_synthesized
from homsim.analysis import (
    beam_splitter_decompose,
    check_interference_condition,
    coincidence_from_sigma,
    decomposition_report,
    dip_scan,
    gram_spectrum_residual,
    hom_kernel,
    hom_kernel_from_decomposition,
    matched_inputs,
    matched_partner,
    schmidt_decompose,
    simulate,
)
from homsim.errors import NotUnitary, RankExceeded
from homsim.spectral import WavePacket, apply_delay, gaussian_packet, make_uniform_grid
from homsim.transforms import (
    BlockKernel,
    BraggParams,
    MirrorParams,
    cw_bragg,
    moving_mirror,
    passive_splitter,
)

H = 1 / math.sqrt(2)


def test_passive_balanced_kernel_is_identity():
    k = hom_kernel(passive_splitter(H, H, make_uniform_grid(10.0, 4.0, 6)))
    np.testing.assert_allclose(k.matrix, np.eye(6), atol=1e-15)


def test_transmitting_kernel_is_zero():
    k = hom_kernel(passive_splitter(1.0, 0.0, make_uniform_grid(10.0, 4.0, 6)))
    assert np.max(np.abs(k.matrix)) == 0


def test_hom_kernel_requires_unitary():
    basis = basis_pair(2)
    with pytest.raises(NotUnitary):
        hom_kernel(BlockKernel(basis, 1.1 * np.eye(4)))


def test_sigma_equals_two_tau_rho():
    rng = np.random.default_rng(10)
    k, spec = random_synthesized(rng, 24, 6)
    s = hom_kernel(k).singular_values()[:6]
    taus = spec.taus
    expected = np.sort(2 * taus * np.sqrt(1 - taus ** 2))[::-1]
    np.testing.assert_allclose(s, expected, atol=1e-10)


def test_sigma_for_point_eight():
    rng = np.random.default_rng(11)
    k, _ = random_synthesized(rng, 8, 1, taus=[0.8])
    assert abs(hom_kernel(k).singular_values()[0] - 0.96) < 1e-10


def test_schmidt_reconstruction_and_phase_convention():
    rng = np.random.default_rng(12)
    k = hom_kernel(haar_kernel(rng, 12))
    sd = schmidt_decompose(k)
    assert np.max(np.abs(sd.reconstruct() - k.matrix)) < 1e-10
    assert np.all(np.diff(sd.sigma) <= 0)
    assert sd.sigma[0] <= 1 + 1e-10
    for n in range(sd.sigma.size):
        col = sd.red_modes[:, n]
        lead = col[np.argmax(np.abs(col))]
        assert lead.imag == 0 and lead.real > 0


def test_beam_splitter_round_trip_and_unit_sum():
    rng = np.random.default_rng(13)
    for kernel in (haar_kernel(rng, 16), random_synthesized(rng, 16, 5)[0]):
        d = beam_splitter_decompose(kernel)
        assert np.max(np.abs(d.reconstruct().matrix - kernel.matrix)) < 1e-8
        np.testing.assert_allclose(d.alpha ** 2 + d.beta ** 2, 1.0, atol=1e-10)


def test_beam_splitter_recovers_taus():
    rng = np.random.default_rng(14)
    kernel, spec = random_synthesized(rng, 12, 4)
    d = beam_splitter_decompose(kernel)
    expected = np.sort(np.concatenate([spec.taus, np.ones(8)]))
    np.testing.assert_allclose(np.sort(d.alpha), expected, atol=1e-8)


def test_beam_splitter_degenerate_passive():
    kernel = passive_splitter(0.6, 0.8, make_uniform_grid(10.0, 4.0, 8))
    d = beam_splitter_decompose(kernel)
    assert d.residual < 1e-12
    np.testing.assert_allclose(d.alpha, 0.6)
    np.testing.assert_allclose(d.beta, 0.8)


def test_backward_transformation_pattern():
    rng = np.random.default_rng(15)
    kernel = haar_kernel(rng, 10)
    d = beam_splitter_decompose(kernel)
    t = kernel.transfer_matrix
    assert np.max(np.abs(d.backward_transfer_matrix() - t.conj().T)) < 1e-10
    back = beam_splitter_decompose(kernel.adjoint())
    np.testing.assert_allclose(back.alpha, d.alpha, atol=1e-10)
    np.testing.assert_allclose(back.beta, d.beta, atol=1e-10)


def test_two_route_kernel_and_gram_spectrum():
    rng = np.random.default_rng(16)
    for kernel in (haar_kernel(rng, 12), random_synthesized(rng, 12, 3)[0]):
        direct = hom_kernel(kernel).matrix
        routed = hom_kernel_from_decomposition(beam_splitter_decompose(kernel)).matrix
        assert np.max(np.abs(direct - routed)) < 1e-8
        assert gram_spectrum_residual(kernel) < 1e-8


def test_no_conversion_gives_zero_kernel_by_decomposition():
    kernel = passive_splitter(1.0, 0.0, make_uniform_grid(10.0, 4.0, 5))
    routed = hom_kernel_from_decomposition(beam_splitter_decompose(kernel))
    assert np.max(np.abs(routed.matrix)) == 0


def test_coincidence_from_sigma_branches():
    for tau2 in (0.5, 0.6, 0.75, 0.9, 0.1):
        sigma = 2 * math.sqrt(tau2 * (1 - tau2))
        assert abs(coincidence_from_sigma(sigma) - (2 * tau2 - 1) ** 2) < 1e-12


def test_matched_inputs_balanced_null():
    rng = np.random.default_rng(17)
    kernel, _ = random_synthesized(rng, 16, 3, taus=[H, 0.9, 0.3])
    m = matched_inputs(kernel)
    assert abs(m.sigma - 1) < 1e-10
    assert simulate(kernel, m.red, m.blue).p_rb < 1e-10
    assert check_interference_condition(m.red, m.blue, kernel) < 1e-10


def test_matched_inputs_imperfect():
    rng = np.random.default_rng(18)
    kernel, _ = random_synthesized(rng, 16, 1, taus=[math.sqrt(0.6)])
    m = matched_inputs(kernel)
    assert abs(m.predicted_p_rb - 0.04) < 1e-9
    assert abs(simulate(kernel, m.red, m.blue).p_rb - 0.04) < 1e-9
    with pytest.raises(RankExceeded):
        matched_inputs(kernel, 1)


def test_matched_inputs_mirror_paired_indices():
    params = MirrorParams(H, H, 1 / 3)
    kernel = moving_mirror(params, make_uniform_grid(10.0, 2.0, 6))
    # balanced mirror has K = I: any pair of identical index profiles is matched
    red = gaussian_packet(kernel.basis.red, 10.0, 0.2)
    blue = matched_partner(kernel, red)
    ratio = red.amps / blue.amps
    np.testing.assert_allclose(ratio, ratio[0], atol=1e-12)
    assert abs(abs(ratio[0]) - 1) < 1e-12
    assert simulate(kernel, red, blue).p_rb < 1e-10


def test_condition_orthogonal_mode_is_far():
    rng = np.random.default_rng(19)
    kernel, _ = random_synthesized(rng, 12, 2, taus=[H, H])
    sd = schmidt_decompose(hom_kernel(kernel))
    red, other_blue = sd.red_packet(0), sd.blue_packet(1)
    assert check_interference_condition(red, other_blue, kernel) >= 0.5


def test_condition_bragg_offset_gaussians():
    kernel = cw_bragg(BraggParams(H, H, 9.0), make_uniform_grid(10.0, 8.0, 64))
    red = gaussian_packet(kernel.basis.red, 10.0, 0.5)
    blue = gaussian_packet(kernel.basis.blue, 19.0, 0.5)
    assert check_interference_condition(red, blue, kernel) < 1e-10
    assert simulate(kernel, red, blue).p_rb < 1e-10


def test_condition_passive_iff_equal_up_to_phase():
    rng = np.random.default_rng(20)
    kernel = passive_splitter(H, H, make_uniform_grid(10.0, 4.0, 6))
    p = random_packet(rng, kernel.basis.red)
    same = WavePacket(kernel.basis.blue, p.amps * np.exp(0.7j))
    assert check_interference_condition(p, same, kernel) < 1e-10
    assert simulate(kernel, p, same).p_rb < 1e-10
    for eps in (1e-3, 1e-2, 0.3):
        bent = WavePacket.normalized(kernel.basis.blue,
                                     same.amps + eps * random_packet(rng, kernel.basis.blue).amps)
        assert check_interference_condition(p, bent, kernel) > 1e-10
        assert simulate(kernel, p, bent).p_rb > 1e-10


def test_condition_zero_iff_null_on_synthesized():
    rng = np.random.default_rng(21)
    for _ in range(10):
        kernel, _ = random_synthesized(rng, 8, 2, taus=[H, rng.uniform(0.1, 0.6)])
        m = matched_inputs(kernel)
        assert check_interference_condition(m.red, m.blue, kernel) < 1e-10
        assert simulate(kernel, m.red, m.blue).p_rb < 1e-9
        red, blue = random_packet(rng, kernel.basis.red), random_packet(rng, kernel.basis.blue)
        assert check_interference_condition(red, blue, kernel) > 1e-10
        assert simulate(kernel, red, blue).p_rb > 1e-9


def test_output_probabilities_identity():
    rng = np.random.default_rng(22)
    basis = basis_pair(4)
    kernel = BlockKernel(basis, np.eye(8))
    p = simulate(kernel, random_packet(rng, basis.red), random_packet(rng, basis.blue))
    assert (p.p_rr, p.p_rb, p.p_bb) == (0.0, pytest.approx(1.0, abs=1e-12), 0.0)


def test_hom_baseline_probabilities():
    kernel = passive_splitter(H, H, make_uniform_grid(10.0, 4.0, 16))
    red = gaussian_packet(kernel.basis.red, 10.0, 0.4)
    blue = WavePacket(kernel.basis.blue, red.amps)
    p = simulate(kernel, red, blue)
    assert abs(p.p_rr - 0.5) < 1e-12 and abs(p.p_bb - 0.5) < 1e-12 and p.p_rb < 1e-12


def test_dip_curve_closed_form():
    sigma = 0.5
    kernel = passive_splitter(H, H, make_uniform_grid(10.0, 8.0, 128))
    red = gaussian_packet(kernel.basis.red, 10.0, sigma)
    blue = WavePacket(kernel.basis.blue, red.amps)
    delays = np.linspace(-4 / sigma, 4 / sigma, 41)
    curve = dip_scan(kernel, red, blue, delays)
    expected = (1 - np.exp(-sigma ** 2 * delays ** 2)) / 2
    assert np.max(np.abs(curve.p_rb - expected)) < 1e-6
    assert curve.p_rb[20] < 1e-12
    np.testing.assert_allclose(curve.p_rb, curve.p_rb[::-1], atol=1e-10)
    far = dip_scan(kernel, red, blue, [40.0]).p_rb[0]
    assert abs(far - 0.5) < 1e-4


def test_dip_delay_symmetry_of_photons():
    kernel = passive_splitter(H, H, make_uniform_grid(10.0, 8.0, 64))
    red = gaussian_packet(kernel.basis.red, 10.0, 0.5)
    blue = WavePacket(kernel.basis.blue, red.amps)
    a = simulate(kernel, apply_delay(red, 1.1), blue).p_rb
    b = dip_scan(kernel, red, blue, [1.1]).p_rb[0]
    assert abs(a - b) < 1e-12


def test_decomposition_report_fields():
    rng = np.random.default_rng(23)
    kernel, _ = random_synthesized(rng, 6, 2)
    k = hom_kernel(kernel)
    doc = decomposition_report(k, schmidt_decompose(k), beam_splitter_decompose(kernel))
    assert doc["schmidt_reconstruction_residual"] < 1e-12
    assert len(doc["beam_splitter"]["tau"]) == 6
    assert len(doc["red_modes"][0]) == 6
