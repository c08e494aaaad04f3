// Reconnecting WebSocket wrapper with exponential backoff.

export interface SocketHooks {
    onMessage: (raw: string) => void;
    onState: (state: "connecting" | "connected" | "reconnecting") => void;
}

export function backoffMs(attempt: number, baseMs = 500, capMs = 15000): number {
    return Math.min(baseMs * 2 ** attempt, capMs);
}

export class ReconnectingSocket {
    private ws: WebSocket | null = null;
    private attempts = 0;
    private closed = false;

    constructor(private url: string, private hooks: SocketHooks) {
        this.connect();
    }

    private connect(): void {
        this.hooks.onState(this.attempts === 0 ? "connecting" : "reconnecting");
        this.ws = new WebSocket(this.url);
        this.ws.onopen = () => {
            this.attempts = 0;
            this.hooks.onState("connected");
        };
        this.ws.onmessage = (event) => {
            this.hooks.onMessage(String(event.data));
        };
        this.ws.onclose = () => {
            if (this.closed) return;
            const wait = backoffMs(this.attempts++);
            this.hooks.onState("reconnecting");
            setTimeout(() => this.connect(), wait);
        };
        this.ws.onerror = () => {
            this.ws?.close();
        };
    }

    send(raw: string): void {
        if (this.ws && this.ws.readyState === WebSocket.OPEN) {
            this.ws.send(raw);
        }
    }

    close(): void {
        this.closed = true;
        this.ws?.close();
    }
}
