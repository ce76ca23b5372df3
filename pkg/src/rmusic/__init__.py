"""Fast randomized MUSIC direction-of-arrival estimation.

Typical use::

    from rmusic import make_scene, generate_snapshots, sample_covariance
    from rmusic import rmusic_subspace, spectrum_from_signal_basis, find_peaks, AngularGrid

    scene = make_scene(num_elements=300, num_targets=9, snr_db=-5, seed=1)
    R = sample_covariance(generate_snapshots(scene, seed=1))
    est = rmusic_subspace(R, K=9)
    spec = spectrum_from_signal_basis(est.basis, scene.array, AngularGrid())
    doas = find_peaks(spec, K=9)
"""

from .array_sim import (
    ArrayGeometry,
    FmcwParams,
    Scene,
    Target,
    dechirp,
    draw_doas,
    fmcw_chirp,
    generate_snapshots,
    make_scene,
    snapshot_components,
    steering_matrix,
    steering_vector,
)
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    NumericalError,
    OrthonormalityError,
    RankDeficiencyError,
    RMusicError,
)
from .numerics import QrResult, SvdResult, principal_angles, qr_thin, svd_full, svd_truncate, tri_pinv
from .sketching import (
    CompositeSketch,
    CountSketch,
    SketchConfig,
    apply_sketch_left,
    composite_sketch,
    count_sketch,
    gaussian_sketch,
)
from .spectrum import (
    AngularGrid,
    DoaEstimate,
    PseudoSpectrum,
    doa_rmse,
    find_peaks,
    spectrum_from_kernel,
    spectrum_from_noise_basis,
    spectrum_from_signal_basis,
)
from .subspace import (
    CovarianceMatrix,
    SubspaceEstimate,
    exact_ksvd_subspace,
    exact_music_subspace,
    inverse_spectrum_weights,
    propagator_subspace,
    rank_k_svd_via_sketch,
    rmusic_subspace,
    sample_covariance,
)

__version__ = "0.1.0"
