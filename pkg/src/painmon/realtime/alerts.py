"""Threshold/sustain alert engine with deactivation hysteresis."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class AlertState:
    threshold: float = 0.80
    sustain_seconds: float = 10.0
    hysteresis: float = 0.05
    streak_seconds: float = 0.0
    active: bool = False
    since: float | None = None          # wall time the alert became active
    last_time: float | None = None


@dataclass(frozen=True)
class AlertTransition:
    active: bool
    at_time: float


def update_alert(state: AlertState, probability: float, at_time: float
                 ) -> tuple[AlertState, AlertTransition | None]:
    """Advance the alert state with one time-ordered probability sample.

    The alert activates once probability has stayed at or above the
    threshold for ``sustain_seconds`` of continuous streak; it deactivates
    only when probability drops below threshold - hysteresis, so values
    wobbling inside the band do not flap the alarm.
    """
    dt = 0.0 if state.last_time is None else max(0.0, at_time - state.last_time)
    transition = None

    if probability >= state.threshold:
        streak = state.streak_seconds + dt
        active = state.active
        since = state.since
        if not active and streak >= state.sustain_seconds:
            active = True
            since = at_time
            transition = AlertTransition(active=True, at_time=at_time)
        state = replace(state, streak_seconds=streak, active=active,
                        since=since, last_time=at_time)
    elif state.active and probability >= state.threshold - state.hysteresis:
        # Inside the hysteresis band: hold the alert, freeze the streak.
        state = replace(state, last_time=at_time)
    else:
        if state.active:
            transition = AlertTransition(active=False, at_time=at_time)
        state = replace(state, streak_seconds=0.0, active=False, since=None,
                        last_time=at_time)
    return state, transition
