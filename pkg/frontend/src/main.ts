import { Renderer } from "./render.js";
import { SessionView } from "./session.js";
import { ReconnectingSocket } from "./socket.js";

function el(id: string): HTMLElement {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node;
}

const params = new URLSearchParams(window.location.search);
const endpoint = params.get("endpoint") ?? "ws://127.0.0.1:8799";
const windowSeconds = Number(params.get("window") ?? "120");

const view = new SessionView((raw) => socket.send(raw));
view.trace.windowSeconds = windowSeconds;

const socket = new ReconnectingSocket(endpoint, {
    onMessage: (raw) => view.onRaw(raw),
    onState: (state) => { view.connection = state; },
});

const renderer = new Renderer(view, el("trace") as HTMLCanvasElement, {
    probability: el("probability"),
    state: el("state"),
    connection: el("connection"),
    masked: el("masked"),
    latency: el("latency"),
    banner: el("banner"),
    thresholdEcho: el("threshold-echo"),
    sustainEcho: el("sustain-echo"),
});
renderer.start(8);

const thresholdDial = el("threshold") as HTMLInputElement;
thresholdDial.addEventListener("change", () => {
    view.requestThreshold(Number(thresholdDial.value));
});
const sustainDial = el("sustain") as HTMLInputElement;
sustainDial.addEventListener("change", () => {
    view.requestSustain(Number(sustainDial.value));
});
