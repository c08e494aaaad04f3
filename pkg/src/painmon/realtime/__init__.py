from .alerts import AlertState, AlertTransition, update_alert
from .pipeline import (
    TARGET_RATE_HZ,
    TICK_SECONDS,
    LoopSummary,
    PredictionEvent,
    RealtimePipeline,
    run_loop,
)
from .publish import PublishServer
from .ring import RingBuffer
from .serve import ServeSession, event_message, serve
from .sources import (
    FileReplaySource,
    SocketSource,
    SyntheticSource,
    stream_bundle_over_socket,
    stream_synthetic_over_socket,
)

__all__ = [
    "RingBuffer", "RealtimePipeline", "PredictionEvent", "LoopSummary",
    "run_loop", "TICK_SECONDS", "TARGET_RATE_HZ",
    "AlertState", "AlertTransition", "update_alert",
    "SyntheticSource", "FileReplaySource", "SocketSource",
    "stream_bundle_over_socket", "stream_synthetic_over_socket",
    "PublishServer", "ServeSession", "serve", "event_message",
]
