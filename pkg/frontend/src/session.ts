// View state of one monitoring session. Pure state machine over server
// messages so it can be driven headless in tests; controls are sent
// through an injected sender and the UI reflects only server echoes.

import { parseMessage, PredictionMsg, ServerMsg, setSustain, setThreshold } from "./protocol.js";
import { BoundedTrace } from "./trace.js";

export type ColorState = "below" | "within_hysteresis" | "alert";
export type ConnectionState = "connecting" | "connected" | "reconnecting";

const HYSTERESIS = 0.05;

export interface Settings {
    threshold: number;
    sustain: number;
    paused: boolean;
    seq: number;
}

export class SessionView {
    trace = new BoundedTrace(120);
    connection: ConnectionState = "connecting";
    // Always the last server echo, never an optimistic local value.
    settings: Settings = { threshold: 0.8, sustain: 10, paused: false, seq: 0 };
    probability = 0;
    colorState: ColorState = "below";
    alertActive = false;
    alertSince: number | null = null;
    maskedChannels: string[] = [];
    totalLatencyMs = 0;
    lastEventAt = 0;
    droppedTotal = 0;
    suppressedPartial = 0;

    constructor(private send: (raw: string) => void = () => {}) {}

    requestThreshold(value: number): void {
        this.send(setThreshold(value));
    }

    requestSustain(value: number): void {
        this.send(setSustain(value));
    }

    onRaw(raw: string): void {
        const msg = parseMessage(raw);
        if (msg) this.onMessage(msg);
    }

    onMessage(msg: ServerMsg): void {
        switch (msg.type) {
            case "prediction":
                this.onPrediction(msg);
                break;
            case "alert":
                this.alertActive = msg.active;
                this.alertSince = msg.active ? (msg.since ?? msg.at) : null;
                break;
            case "settings":
                if (msg.seq >= this.settings.seq) {
                    this.settings = {
                        threshold: msg.threshold,
                        sustain: msg.sustain,
                        paused: msg.paused,
                        seq: msg.seq,
                    };
                }
                break;
            case "gap":
                this.droppedTotal = msg.dropped;
                this.trace.markGap();
                break;
        }
    }

    private onPrediction(msg: PredictionMsg): void {
        this.lastEventAt = msg.t;
        if (msg.flags.includes("partial_window")) {
            // Cold-start windows carry no usable probability; keep them off
            // the trace entirely.
            this.suppressedPartial++;
            return;
        }
        this.probability = msg.p;
        this.maskedChannels = msg.masked;
        this.totalLatencyMs = (msg.latency_us["total"] ?? 0) / 1000;
        this.colorState = this.classify(msg.p);
        this.trace.push(msg.t, msg.p, this.colorState === "alert");
    }

    private classify(p: number): ColorState {
        const th = this.settings.threshold;
        if (p >= th) return "alert";
        if (p >= th - HYSTERESIS) return "within_hysteresis";
        return "below";
    }
}
