// Canvas + DOM rendering of a SessionView at a fixed refresh rate.

import { SessionView } from "./session.js";

const COLORS = { below: "#3fb950", within_hysteresis: "#d29922", alert: "#f85149" };

export class Renderer {
    private timer: number | null = null;

    constructor(private view: SessionView,
                private canvas: HTMLCanvasElement,
                private dom: {
                    probability: HTMLElement;
                    state: HTMLElement;
                    connection: HTMLElement;
                    masked: HTMLElement;
                    latency: HTMLElement;
                    banner: HTMLElement;
                    thresholdEcho: HTMLElement;
                    sustainEcho: HTMLElement;
                }) {}

    start(hz = 8): void {
        const period = 1000 / hz;
        this.timer = window.setInterval(() => this.draw(), period);
    }

    stop(): void {
        if (this.timer !== null) window.clearInterval(this.timer);
    }

    draw(): void {
        const v = this.view;
        this.dom.probability.textContent = v.probability.toFixed(2);
        this.dom.probability.style.color = COLORS[v.colorState];
        this.dom.state.textContent = v.colorState.replace("_", " ");
        this.dom.connection.textContent = v.connection;
        this.dom.connection.className = `conn ${v.connection}`;
        this.dom.masked.textContent = v.maskedChannels.length
            ? `masked: ${v.maskedChannels.join(", ")}` : "all channels live";
        this.dom.latency.textContent = `${v.totalLatencyMs.toFixed(1)} ms`;
        this.dom.thresholdEcho.textContent = v.settings.threshold.toFixed(2);
        this.dom.sustainEcho.textContent = `${v.settings.sustain.toFixed(0)} s`;
        if (v.alertActive && v.alertSince !== null) {
            const onset = new Date(v.alertSince * 1000).toLocaleTimeString();
            this.dom.banner.textContent = `PAIN ALERT since ${onset}`;
            this.dom.banner.style.display = "block";
        } else {
            this.dom.banner.style.display = "none";
        }
        this.drawTrace();
    }

    private drawTrace(): void {
        const ctx = this.canvas.getContext("2d");
        if (!ctx) return;
        const { width, height } = this.canvas;
        const v = this.view;
        ctx.clearRect(0, 0, width, height);

        ctx.strokeStyle = "#30363d";
        ctx.setLineDash([4, 4]);
        const thY = height * (1 - v.settings.threshold);
        ctx.beginPath();
        ctx.moveTo(0, thY);
        ctx.lineTo(width, thY);
        ctx.stroke();
        ctx.setLineDash([]);

        const points = v.trace.snapshot();
        if (points.length < 2) return;
        const t1 = points[points.length - 1].t;
        const t0 = t1 - v.trace.windowSeconds;
        ctx.lineWidth = 1.5;
        let started = false;
        for (let i = 0; i < points.length; i++) {
            const pt = points[i];
            const x = ((pt.t - t0) / v.trace.windowSeconds) * width;
            const y = height * (1 - pt.p);
            if (!started || pt.gapBefore) {
                if (started) ctx.stroke();
                ctx.beginPath();
                ctx.strokeStyle = pt.alerting ? COLORS.alert : COLORS.below;
                ctx.moveTo(x, y);
                started = true;
            } else {
                ctx.strokeStyle = pt.alerting ? COLORS.alert : COLORS.below;
                ctx.lineTo(x, y);
            }
        }
        if (started) ctx.stroke();
    }
}
