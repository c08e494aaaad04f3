from .bundle import (
    MarkerEvent,
    RawRecording,
    RecordingHeader,
    load_recording,
    parse_header,
    parse_markers,
    read_signal,
    write_bundle,
)
from .cache import read_epochs, write_epochs
from .epochs import (
    DEFAULT_LABEL_MAP,
    Epoch,
    EpochConfig,
    EpochSet,
    Label,
    extract_epochs,
    merge_epoch_sets,
)

__all__ = [
    "RecordingHeader", "MarkerEvent", "RawRecording",
    "parse_header", "parse_markers", "read_signal", "load_recording", "write_bundle",
    "Label", "Epoch", "EpochSet", "EpochConfig", "DEFAULT_LABEL_MAP",
    "extract_epochs", "merge_epoch_sets",
    "write_epochs", "read_epochs",
]
