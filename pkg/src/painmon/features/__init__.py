from .bands import ALPHA, BETA, CANONICAL_BANDS, DELTA, GAMMA, THETA, FrequencyBand
from .config import DEFAULT_CHANNELS, FeatureConfig, realtime_config
from .entropy import sample_entropy
from .fractal import higuchi_fd
from .manifest import (
    CANONICAL_SLOTS,
    FeatureManifest,
    ManifestEntry,
    build_manifest,
)
from .matrix import FeatureMatrix, featurize_epoch_set, read_matrix, write_matrix
from .spectral import (
    RATIO_NAMES,
    WelchParams,
    band_power,
    band_ratios,
    coherence,
    peak_frequency,
    spectral_entropy,
    subwindow_band_powers,
    welch_psd,
)
from .standardize import (
    StandardizationState,
    apply_standardization,
    fit_from_vectors,
    fit_standardization,
    transform_matrix,
)
from .timedomain import hjorth, time_stats
from .vector import FeatureVector, extract_epoch_features, extract_features
from .wavelet import dwt_decompose, dwt_energies

__all__ = [
    "FrequencyBand", "CANONICAL_BANDS", "DELTA", "THETA", "ALPHA", "BETA", "GAMMA",
    "FeatureConfig", "DEFAULT_CHANNELS", "realtime_config",
    "WelchParams", "welch_psd", "band_power", "subwindow_band_powers",
    "band_ratios", "RATIO_NAMES", "spectral_entropy", "peak_frequency", "coherence",
    "time_stats", "hjorth", "sample_entropy", "higuchi_fd",
    "dwt_decompose", "dwt_energies",
    "CANONICAL_SLOTS", "FeatureManifest", "ManifestEntry", "build_manifest",
    "FeatureVector", "extract_features", "extract_epoch_features",
    "StandardizationState", "fit_standardization", "fit_from_vectors",
    "transform_matrix", "apply_standardization",
    "FeatureMatrix", "featurize_epoch_set", "write_matrix", "read_matrix",
]
