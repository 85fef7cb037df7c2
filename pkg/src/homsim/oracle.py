"""Brute-force Fock-space expansion used to cross-check the matrix pipeline.

Deliberately written with plain loops and a dictionary of occupation
patterns; it shares no code with :mod:`homsim.analysis`.
"""

import math

from .analysis import OutputProbabilities
from .errors import TooLarge
from .spectral import WavePacket, check_same_grid
from .transforms import BlockKernel

MAX_MODES = 8


def brute_force_output(kernel: BlockKernel, p_red: WavePacket,
                       p_blue: WavePacket) -> OutputProbabilities:
    """Expand ``(sum_i c_i a_i^dag)(sum_j d_j a_j^dag)|vac>`` through the device.

    Each creation operator is replaced by its output combination, the product
    is multiplied out term by term, and ``(a_k^dag)^2 |vac> = sqrt(2) |2_k>``.
    """
    basis = kernel.basis
    size = basis.size
    if size > MAX_MODES:
        raise TooLarge(f"brute-force expansion limited to {MAX_MODES} modes, got {size}")
    check_same_grid(basis.red, p_red.grid, "red packet")
    check_same_grid(basis.blue, p_blue.grid, "blue packet")
    n_red = basis.n_red
    m = kernel.matrix.tolist()
    red_in = [complex(c) for c in p_red.amps]
    blue_in = [complex(c) for c in p_blue.amps]

    fock = {}
    for i, ci in enumerate(red_in):
        for k in range(size):
            first = ci * m[i][k]
            if first == 0:
                continue
            for j, cj in enumerate(blue_in):
                for l in range(size):
                    amp = first * cj * m[n_red + j][l]
                    if amp == 0:
                        continue
                    if k == l:
                        key = (k, k)
                        amp *= math.sqrt(2.0)
                    else:
                        key = (min(k, l), max(k, l))
                    fock[key] = fock.get(key, 0j) + amp

    p_rr = p_rb = p_bb = 0.0
    for (k, l), amp in fock.items():
        prob = abs(amp) ** 2
        k_red, l_red = k < n_red, l < n_red
        if k_red and l_red:
            p_rr += prob
        elif not k_red and not l_red:
            p_bb += prob
        else:
            p_rb += prob
    return OutputProbabilities(p_rr, p_rb, p_bb)
