import { describe, expect, it } from "vitest";

import { parseMessage, setSustain, setThreshold } from "../src/protocol.js";
import { SessionView } from "../src/session.js";
import { BoundedTrace } from "../src/trace.js";
import { backoffMs } from "../src/socket.js";

function prediction(t: number, p: number, extra: Partial<Record<string, unknown>> = {}) {
    return JSON.stringify({
        type: "prediction", t, tick: Math.round(t / 0.125), p,
        label: p >= 0.8 ? 1 : 0, threshold: 0.8,
        latency_us: { total: 4100 }, masked: [], flags: [], ...extra,
    });
}

describe("protocol", () => {
    it("parses known message types and rejects junk", () => {
        expect(parseMessage(prediction(1, 0.5))?.type).toBe("prediction");
        expect(parseMessage('{"type":"alert","active":true,"since":1,"at":1}')?.type).toBe("alert");
        expect(parseMessage('{"type":"nope"}')).toBeNull();
        expect(parseMessage("not json")).toBeNull();
        expect(parseMessage("42")).toBeNull();
    });

    it("encodes controls", () => {
        expect(JSON.parse(setThreshold(0.61))).toEqual({ type: "set_threshold", value: 0.61 });
        expect(JSON.parse(setSustain(5))).toEqual({ type: "set_sustain", value: 5 });
    });
});

describe("settings echo contract", () => {
    it("controls go out, state changes only on echo", () => {
        const sent: string[] = [];
        const view = new SessionView((raw) => sent.push(raw));
        view.requestThreshold(0.6);
        expect(sent).toHaveLength(1);
        expect(view.settings.threshold).toBe(0.8);   // unchanged: no echo yet

        view.onRaw(JSON.stringify({ type: "settings", seq: 1, threshold: 0.6, sustain: 10, paused: false }));
        expect(view.settings.threshold).toBe(0.6);
    });

    it("stale echoes (lower seq) are ignored", () => {
        const view = new SessionView();
        view.onRaw(JSON.stringify({ type: "settings", seq: 5, threshold: 0.7, sustain: 10, paused: false }));
        view.onRaw(JSON.stringify({ type: "settings", seq: 3, threshold: 0.9, sustain: 10, paused: false }));
        expect(view.settings.threshold).toBe(0.7);
    });
});

describe("color rule", () => {
    it("classifies against the echoed threshold with hysteresis band", () => {
        const view = new SessionView();
        view.onRaw(JSON.stringify({ type: "settings", seq: 1, threshold: 0.8, sustain: 10, paused: false }));
        view.onRaw(prediction(1, 0.9));
        expect(view.colorState).toBe("alert");
        view.onRaw(prediction(2, 0.78));
        expect(view.colorState).toBe("within_hysteresis");
        view.onRaw(prediction(3, 0.5));
        expect(view.colorState).toBe("below");
    });
});

describe("alert banner", () => {
    it("raises on the first alert message and records onset", () => {
        const view = new SessionView();
        for (let k = 0; k < 80; k++) view.onRaw(prediction(k * 0.125, 0.9));
        expect(view.alertActive).toBe(false);        // server decides, not us
        view.onRaw(JSON.stringify({ type: "alert", active: true, since: 10.0, at: 10.0 }));
        expect(view.alertActive).toBe(true);
        expect(view.alertSince).toBe(10.0);
        view.onRaw(JSON.stringify({ type: "alert", active: false, since: null, at: 20.0 }));
        expect(view.alertActive).toBe(false);
        expect(view.alertSince).toBeNull();
    });
});

describe("trace behavior", () => {
    it("stays bounded over a long stream (8 events per second)", () => {
        const view = new SessionView();
        // 10 minutes at 8 Hz = 4800 events; window keeps only 120 s ~ 960
        for (let k = 0; k < 4800; k++) {
            view.onRaw(prediction(k * 0.125, Math.random()));
        }
        expect(view.trace.size).toBeLessThanOrEqual(961);
        expect(view.trace.size).toBeGreaterThan(900);
    });

    it("suppresses partial-window events entirely", () => {
        const view = new SessionView();
        view.onRaw(prediction(0, 0.7, { flags: ["partial_window"] }));
        expect(view.trace.size).toBe(0);
        expect(view.suppressedPartial).toBe(1);
        expect(view.probability).toBe(0);            // untouched
        view.onRaw(prediction(0.125, 0.7));
        expect(view.trace.size).toBe(1);
    });

    it("renders gap notices as trace breaks", () => {
        const trace = new BoundedTrace(120);
        trace.push(0, 0.5, false);
        trace.markGap();
        trace.push(1, 0.6, false);
        const points = trace.snapshot();
        expect(points[0].gapBefore).toBe(false);
        expect(points[1].gapBefore).toBe(true);
    });

    it("gap messages update the dropped counter", () => {
        const view = new SessionView();
        view.onRaw(JSON.stringify({ type: "gap", dropped: 12 }));
        expect(view.droppedTotal).toBe(12);
    });
});

describe("latency and masked readouts", () => {
    it("exposes tick latency in ms and masked channels", () => {
        const view = new SessionView();
        view.onRaw(prediction(1, 0.4, { masked: ["T7", "O2"], latency_us: { total: 4100 } }));
        expect(view.totalLatencyMs).toBeCloseTo(4.1);
        expect(view.maskedChannels).toEqual(["T7", "O2"]);
    });
});

describe("reconnect backoff", () => {
    it("doubles and caps", () => {
        expect(backoffMs(0)).toBe(500);
        expect(backoffMs(1)).toBe(1000);
        expect(backoffMs(3)).toBe(4000);
        expect(backoffMs(10)).toBe(15000);
    });
});
