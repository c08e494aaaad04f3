// Message types of the publish protocol (newline JSON / WebSocket text).

export interface PredictionMsg {
    type: "prediction";
    t: number;
    tick: number;
    p: number;
    label: number;
    threshold: number;
    latency_us: Record<string, number>;
    masked: string[];
    flags: string[];
}

export interface AlertMsg {
    type: "alert";
    active: boolean;
    since: number | null;
    at: number;
}

export interface SettingsMsg {
    type: "settings";
    seq: number;
    threshold: number;
    sustain: number;
    paused: boolean;
}

export interface GapMsg {
    type: "gap";
    dropped: number;
}

export type ServerMsg = PredictionMsg | AlertMsg | SettingsMsg | GapMsg;

export function parseMessage(raw: string): ServerMsg | null {
    let data: unknown;
    try {
        data = JSON.parse(raw);
    } catch {
        return null;
    }
    if (typeof data !== "object" || data === null) return null;
    const msg = data as { type?: string };
    switch (msg.type) {
        case "prediction":
        case "alert":
        case "settings":
        case "gap":
            return data as ServerMsg;
        default:
            return null;
    }
}

export function setThreshold(value: number): string {
    return JSON.stringify({ type: "set_threshold", value });
}

export function setSustain(value: number): string {
    return JSON.stringify({ type: "set_sustain", value });
}
