"""Reader/writer for the three-file EEG recording bundle.

A session is stored as a ``.vhdr`` ASCII header, a flat binary ``.eeg``
signal file, and a ``.vmrk`` ASCII marker file sharing one path prefix.
The grammar follows the public Core Format 1.0 conventions: INI-style
sections in the header, ``Mk<n>=...`` entries in the marker file, int16 or
IEEE float32 samples in the binary file. Marker positions are sample
offsets into the signal (0-based; writer and reader share the convention).
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import (
    CompanionFileMissing,
    MalformedMarkerLine,
    MissingRequiredKey,
    MissingSection,
    OrientationUnsupported,
    TruncatedData,
    UnsupportedBinaryFormat,
)

_BINARY_FORMATS = {"INT_16": "int16", "IEEE_FLOAT_32": "float32"}
_FORMAT_NAMES = {v: k for k, v in _BINARY_FORMATS.items()}
_BYTES_PER_SAMPLE = {"int16": 2, "float32": 4}
_ORIENTATIONS = ("multiplexed", "vectorized")


@dataclass
class RecordingHeader:
    channel_names: list[str]
    channel_count: int
    sampling_rate_hz: float
    resolution_per_channel: list[float]
    binary_format: str            # "int16" | "float32"
    orientation: str              # "multiplexed" | "vectorized"
    reference_label: str
    data_filename: str
    marker_filename: str

    def __post_init__(self):
        if self.channel_count != len(self.channel_names):
            raise ValueError("channel_count inconsistent with channel_names")
        if self.channel_count != len(self.resolution_per_channel):
            raise ValueError("channel_count inconsistent with resolutions")
        if self.sampling_rate_hz <= 0:
            raise ValueError("sampling_rate_hz must be positive")


@dataclass
class MarkerEvent:
    index: int
    kind: str
    description: str
    position_samples: int
    duration_samples: int = 1
    channel_ref: int = 0          # 0 = all channels


@dataclass
class RawRecording:
    header: RecordingHeader
    samples: np.ndarray           # (channel_count, n_samples) float64, microvolt
    markers: list[MarkerEvent]
    subject_id: str = ""

    def __post_init__(self):
        if self.samples.ndim != 2 or self.samples.shape[0] != self.header.channel_count:
            raise ValueError("sample matrix shape inconsistent with header")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]


def _sections_from_text(text: str) -> configparser.ConfigParser:
    # Drop the identification line(s) before the first section so that a
    # plain INI parser accepts the file. Keys are case-sensitive here.
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if line.strip().startswith("["):
            lines = lines[i:]
            break
    else:
        raise MissingSection("no INI sections found")
    parser = configparser.ConfigParser(strict=False, interpolation=None,
                                       comment_prefixes=(";",))
    parser.optionxform = str
    parser.read_string("\n".join(lines))
    return parser


def _require(section, key: str) -> str:
    if key not in section:
        raise MissingRequiredKey(key)
    return section[key]


def parse_header(text: str) -> RecordingHeader:
    """Parse header ASCII into a :class:`RecordingHeader`.

    Unknown keys are ignored. Channel resolution defaults to 1.0 when the
    field is empty or absent.
    """
    parser = _sections_from_text(text)
    if "Common Infos" not in parser:
        raise MissingSection("[Common Infos]")
    common = parser["Common Infos"]

    data_filename = _require(common, "DataFile")
    marker_filename = common.get("MarkerFile", "")
    n_channels = int(_require(common, "NumberOfChannels"))
    interval_us = float(_require(common, "SamplingInterval"))
    if interval_us <= 0:
        raise MissingRequiredKey("SamplingInterval")
    orientation = common.get("DataOrientation", "MULTIPLEXED").strip().lower()
    if orientation not in _ORIENTATIONS:
        raise OrientationUnsupported(orientation)

    if "Binary Infos" not in parser:
        raise MissingSection("[Binary Infos]")
    fmt_raw = _require(parser["Binary Infos"], "BinaryFormat").strip()
    if fmt_raw not in _BINARY_FORMATS:
        raise UnsupportedBinaryFormat(fmt_raw)

    if "Channel Infos" not in parser:
        raise MissingSection("[Channel Infos]")
    chan_section = parser["Channel Infos"]
    names: list[str] = []
    resolutions: list[float] = []
    references: list[str] = []
    for i in range(1, n_channels + 1):
        key = f"Ch{i}"
        if key not in chan_section:
            raise MissingRequiredKey(key)
        parts = chan_section[key].split(",")
        names.append(parts[0].strip())
        references.append(parts[1].strip() if len(parts) > 1 else "")
        res = parts[2].strip() if len(parts) > 2 else ""
        resolutions.append(float(res) if res else 1.0)

    reference_label = next((r for r in references if r), "")
    return RecordingHeader(
        channel_names=names,
        channel_count=n_channels,
        sampling_rate_hz=1e6 / interval_us,
        resolution_per_channel=resolutions,
        binary_format=_BINARY_FORMATS[fmt_raw],
        orientation=orientation,
        reference_label=reference_label,
        data_filename=data_filename,
        marker_filename=marker_filename,
    )


_MK_RE = re.compile(r"^Mk(\d+)=(.*)$")


def parse_markers(text: str) -> list[MarkerEvent]:
    """Parse marker ASCII into an ordered list of :class:`MarkerEvent`.

    Entries have the shape ``Mk<n>=<kind>,<description>,<position>,
    <duration>,<channel>[,...]``; trailing fields (e.g. the New Segment
    date) are ignored. Descriptions are preserved verbatim, slashes
    included. Non-monotonic positions are re-sorted with a warning rather
    than rejected.
    """
    import warnings

    events: list[MarkerEvent] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line.startswith("Mk"):
            continue
        m = _MK_RE.match(line)
        if m is None:
            raise MalformedMarkerLine(lineno, line)
        parts = m.group(2).split(",")
        if len(parts) < 3:
            raise MalformedMarkerLine(lineno, line)
        try:
            position = int(float(parts[2]))
            duration = int(float(parts[3])) if len(parts) > 3 and parts[3].strip() else 1
            channel = int(float(parts[4])) if len(parts) > 4 and parts[4].strip() else 0
        except ValueError:
            raise MalformedMarkerLine(lineno, line) from None
        if position < 0:
            raise MalformedMarkerLine(lineno, line)
        events.append(MarkerEvent(
            index=int(m.group(1)),
            kind=parts[0].strip(),
            description=parts[1].strip(),
            position_samples=position,
            duration_samples=duration,
            channel_ref=channel,
        ))

    positions = [e.position_samples for e in events]
    if any(b < a for a, b in zip(positions, positions[1:])):
        warnings.warn("marker positions not monotonic; re-sorting", stacklevel=2)
        events.sort(key=lambda e: (e.position_samples, e.index))
    return events


def read_signal(payload: bytes, header: RecordingHeader) -> np.ndarray:
    """Decode the flat binary sample payload into a (channels, samples)
    float64 matrix in microvolt (raw counts scaled by per-channel
    resolution)."""
    bps = _BYTES_PER_SAMPLE[header.binary_format]
    frame = header.channel_count * bps
    trailing = len(payload) % frame
    if trailing:
        raise TruncatedData(trailing)
    dtype = "<i2" if header.binary_format == "int16" else "<f4"
    flat = np.frombuffer(payload, dtype=dtype)
    n_samples = len(flat) // header.channel_count
    if header.orientation == "multiplexed":
        mat = flat.reshape(n_samples, header.channel_count).T
    else:
        mat = flat.reshape(header.channel_count, n_samples)
    res = np.asarray(header.resolution_per_channel, dtype=np.float64)
    return mat.astype(np.float64) * res[:, None]


def load_recording(header_path: str | Path, subject_id: str | None = None) -> RawRecording:
    """Load a full bundle given the header path.

    Companion files are resolved next to the header via the filenames the
    header declares. ``subject_id`` defaults to the header filename stem.
    Markers beyond the recording end are dropped with a warning.
    """
    import warnings

    header_path = Path(header_path)
    header = parse_header(header_path.read_text(encoding="utf-8", errors="replace"))

    data_path = header_path.parent / header.data_filename
    if not data_path.exists():
        raise CompanionFileMissing(str(data_path))
    samples = read_signal(data_path.read_bytes(), header)

    markers: list[MarkerEvent] = []
    if header.marker_filename:
        marker_path = header_path.parent / header.marker_filename
        if not marker_path.exists():
            raise CompanionFileMissing(str(marker_path))
        markers = parse_markers(marker_path.read_text(encoding="utf-8", errors="replace"))
        n = samples.shape[1]
        in_range = [e for e in markers if e.position_samples < n]
        if len(in_range) != len(markers):
            warnings.warn(f"dropped {len(markers) - len(in_range)} marker(s) "
                          "positioned past the end of the recording", stacklevel=2)
        markers = in_range

    return RawRecording(
        header=header,
        samples=samples,
        markers=markers,
        subject_id=subject_id or header_path.stem,
    )


def write_bundle(rec: RawRecording, prefix: str | Path) -> Path:
    """Write a recording as a three-file bundle; returns the header path.

    The int16 path quantizes to the per-channel resolution; float32 is
    stored verbatim.
    """
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    header = rec.header
    name = prefix.name

    chan_lines = []
    for i, (ch, res) in enumerate(zip(header.channel_names, header.resolution_per_channel),
                                  start=1):
        ref = header.reference_label
        chan_lines.append(f"Ch{i}={ch},{ref},{res:g},µV")
    vhdr = "\n".join([
        "Data Exchange Header File Version 1.0",
        "[Common Infos]",
        f"DataFile={name}.eeg",
        f"MarkerFile={name}.vmrk",
        "DataFormat=BINARY",
        f"DataOrientation={header.orientation.upper()}",
        f"NumberOfChannels={header.channel_count}",
        f"SamplingInterval={1e6 / header.sampling_rate_hz:g}",
        "[Binary Infos]",
        f"BinaryFormat={_FORMAT_NAMES[header.binary_format]}",
        "[Channel Infos]",
        *chan_lines,
    ]) + "\n"

    mk_lines = ["Data Exchange Marker File Version 1.0", "[Marker Infos]"]
    for i, e in enumerate(rec.markers, start=1):
        mk_lines.append(f"Mk{i}={e.kind},{e.description},{e.position_samples},"
                        f"{e.duration_samples},{e.channel_ref}")
    vmrk = "\n".join(mk_lines) + "\n"

    res = np.asarray(header.resolution_per_channel, dtype=np.float64)[:, None]
    if header.binary_format == "int16":
        counts = np.clip(np.round(rec.samples / res), -32768, 32767).astype("<i2")
    else:
        counts = (rec.samples / res).astype("<f4")
    if header.orientation == "multiplexed":
        payload = np.ascontiguousarray(counts.T).tobytes()
    else:
        payload = np.ascontiguousarray(counts).tobytes()

    (prefix.parent / f"{name}.vhdr").write_text(vhdr, encoding="utf-8")
    (prefix.parent / f"{name}.vmrk").write_text(vmrk, encoding="utf-8")
    (prefix.parent / f"{name}.eeg").write_bytes(payload)
    return prefix.parent / f"{name}.vhdr"
