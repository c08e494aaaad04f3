"""Serving session: loop + alert engine + publish server, wired together."""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .alerts import AlertState, update_alert
from .pipeline import LoopSummary, PredictionEvent, RealtimePipeline, run_loop
from .publish import PublishServer

log = logging.getLogger(__name__)


def event_message(event: PredictionEvent) -> dict:
    return {
        "type": "prediction",
        "t": event.wall_time,
        "tick": event.tick_index,
        "p": round(event.probability, 6),
        "label": event.label,
        "threshold": event.threshold,
        "latency_us": event.latencies_us,
        "masked": event.masked,
        "flags": event.flags,
    }


@dataclass
class ServeSession:
    pipeline: RealtimePipeline
    publisher: PublishServer
    alert: AlertState
    paused: bool = False
    _settings_seq: int = 0

    def _echo_settings(self) -> None:
        self._settings_seq += 1
        self.publisher.publish({
            "type": "settings",
            "seq": self._settings_seq,
            "threshold": self.alert.threshold,
            "sustain": self.alert.sustain_seconds,
            "paused": self.paused,
        })

    def _apply_controls(self, pipeline: RealtimePipeline) -> None:
        changed = False
        for msg in self.publisher.drain_controls():
            kind = msg.get("type")
            if kind == "set_threshold":
                try:
                    value = float(msg["value"])
                except (KeyError, TypeError, ValueError):
                    continue
                if 0.0 < value < 1.0:
                    self.alert = replace(self.alert, threshold=value)
                    pipeline.threshold = value
                    changed = True
            elif kind == "set_sustain":
                try:
                    value = float(msg["value"])
                except (KeyError, TypeError, ValueError):
                    continue
                if value > 0:
                    self.alert = replace(self.alert, sustain_seconds=value)
                    changed = True
            elif kind == "pause":
                self.paused = True
                changed = True
            elif kind == "resume":
                self.paused = False
                changed = True
        if changed:
            self._echo_settings()

    def _on_event(self, event: PredictionEvent) -> None:
        if self.paused:
            return
        self.publisher.publish(event_message(event))
        self.alert, transition = update_alert(self.alert, event.probability,
                                              event.wall_time)
        if transition is not None:
            self.publisher.publish({
                "type": "alert",
                "active": transition.active,
                "since": self.alert.since,
                "at": transition.at_time,
            })

    def run(self, source, duration_s: float | None = None,
            tick_ms: float = 125.0) -> LoopSummary:
        self._echo_settings()
        return run_loop(source, self.pipeline, tick_ms=tick_ms,
                        duration_s=duration_s, on_event=self._on_event,
                        on_tick_boundary=self._apply_controls)


def serve(pipeline: RealtimePipeline, source, *, host: str = "127.0.0.1",
          port: int = 0, threshold: float = 0.80, sustain_s: float = 10.0,
          duration_s: float | None = None) -> tuple[ServeSession, LoopSummary]:
    publisher = PublishServer(host, port)
    pipeline.threshold = threshold
    session = ServeSession(pipeline=pipeline, publisher=publisher,
                           alert=AlertState(threshold=threshold,
                                            sustain_seconds=sustain_s))
    log.info("publishing on %s:%d", publisher.host, publisher.port)
    try:
        summary = session.run(source, duration_s=duration_s)
    finally:
        publisher.close()
    return session, summary
