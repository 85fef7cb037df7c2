"""Two-photon interference at passive and frequency-shifting beam splitters."""

__version__ = "0.1.0"

from .errors import HomError, NumericalError, ValidationError  # noqa: E402
from .spectral import (  # noqa: E402
    Band,
    FrequencyGrid,
    ModeBasis,
    TwoPhotonState,
    WavePacket,
    gaussian_packet,
    hermite_gauss_family,
    make_uniform_grid,
    to_time_domain,
    two_photon_input,
)
from .transforms import (  # noqa: E402
    BlockKernel,
    BraggParams,
    MirrorParams,
    SchmidtEntry,
    SchmidtSpec,
    apply_kernel,
    cw_bragg,
    load_kernel,
    moving_mirror,
    passive_splitter,
    save_kernel,
    synthesize_kernel,
    verify_unitarity,
)
from .analysis import (  # noqa: E402
    beam_splitter_decompose,
    check_interference_condition,
    dip_scan,
    hom_kernel,
    matched_inputs,
    schmidt_decompose,
    simulate,
)

__all__ = [
    "__version__",
    "HomError", "NumericalError", "ValidationError",
    "Band", "FrequencyGrid", "ModeBasis", "TwoPhotonState", "WavePacket",
    "gaussian_packet", "hermite_gauss_family", "make_uniform_grid", "to_time_domain",
    "two_photon_input",
    "BlockKernel", "BraggParams", "MirrorParams", "SchmidtEntry", "SchmidtSpec",
    "apply_kernel", "cw_bragg", "load_kernel", "moving_mirror", "passive_splitter",
    "save_kernel", "synthesize_kernel", "verify_unitarity",
    "beam_splitter_decompose", "check_interference_condition", "dip_scan", "hom_kernel",
    "matched_inputs", "schmidt_decompose", "simulate",
]
