// Rolling probability trace with a bounded time window. Gap markers break
// the drawn line so dropped stretches are visible.

export interface TracePoint {
    t: number;
    p: number;
    alerting: boolean;
    gapBefore: boolean;
}

export class BoundedTrace {
    private points: TracePoint[] = [];
    private pendingGap = false;

    constructor(public windowSeconds = 120) {}

    push(t: number, p: number, alerting: boolean): void {
        this.points.push({ t, p, alerting, gapBefore: this.pendingGap });
        this.pendingGap = false;
        this.trim(t);
    }

    markGap(): void {
        this.pendingGap = true;
    }

    private trim(now: number): void {
        const cutoff = now - this.windowSeconds;
        let drop = 0;
        while (drop < this.points.length && this.points[drop].t < cutoff) drop++;
        if (drop > 0) this.points.splice(0, drop);
    }

    get size(): number {
        return this.points.length;
    }

    snapshot(): readonly TracePoint[] {
        return this.points;
    }
}
