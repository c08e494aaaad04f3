from __future__ import annotations

import numpy as np
import pytest

from painmon.ingest import (
    Epoch,
    EpochSet,
    Label,
    MarkerEvent,
    RawRecording,
    RecordingHeader,
)


def make_header(n_channels=4, fs=500.0, binary_format="float32",
                orientation="multiplexed", resolution=1.0, names=None,
                prefix="rec"):
    names = names or [f"Ch{i + 1}" for i in range(n_channels)]
    return RecordingHeader(
        channel_names=names,
        channel_count=n_channels,
        sampling_rate_hz=fs,
        resolution_per_channel=[resolution] * n_channels,
        binary_format=binary_format,
        orientation=orientation,
        reference_label="FCz",
        data_filename=f"{prefix}.eeg",
        marker_filename=f"{prefix}.vmrk",
    )


def make_recording(n_channels=4, fs=500.0, seconds=30.0, markers=None,
                   seed=0, subject_id="subj01", **kw):
    rng = np.random.default_rng(seed)
    n = int(seconds * fs)
    samples = rng.standard_normal((n_channels, n)) * 20.0
    header = make_header(n_channels=n_channels, fs=fs, **kw)
    return RawRecording(header=header, samples=samples,
                        markers=markers or [], subject_id=subject_id)


def stim(desc, pos, index=1):
    return MarkerEvent(index=index, kind="Stimulus", description=desc,
                       position_samples=pos)


def make_epoch_set(n_subjects=3, per_class=4, n_channels=4, fs=500.0,
                   seconds=4.0, seed=0, label_noise=None):
    rng = np.random.default_rng(seed)
    n = int(seconds * fs)
    epochs = []
    for s in range(n_subjects):
        for label in (Label.LOW_PAIN, Label.HIGH_PAIN):
            for i in range(per_class):
                epochs.append(Epoch(
                    subject_id=f"P{s:02d}", label=label, onset_sample=i * n,
                    samples=rng.standard_normal((n_channels, n)) * 10.0,
                    fs_hz=fs,
                    channel_mask=np.ones(n_channels, dtype=bool)))
    return EpochSet([f"Ch{i + 1}" for i in range(n_channels)], fs, epochs)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
