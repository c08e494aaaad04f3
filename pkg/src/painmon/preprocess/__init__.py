from .filters import (
    FilterSpec,
    bandpass_zero_phase,
    highpass_zero_phase,
    notch_zero_phase,
    resample_polyphase,
)
from .pipeline import PreprocessConfig, PreprocessResult, preprocess_recording
from .quality import (
    ChannelQuality,
    channel_stats,
    detect_bad_channels,
    estimate_snr_db,
    reject_artifact_epochs,
    robust_z,
)

__all__ = [
    "FilterSpec", "highpass_zero_phase", "notch_zero_phase", "bandpass_zero_phase",
    "resample_polyphase",
    "ChannelQuality", "robust_z", "channel_stats", "detect_bad_channels",
    "reject_artifact_epochs", "estimate_snr_db",
    "PreprocessConfig", "PreprocessResult", "preprocess_recording",
]
