/**
 * Browser working position: wires the radar canvas, strip board, and action
 * panel to a gateway connection. Served as static assets next to a
 * WebSocket-to-TCP bridge (see README).
 */

import { GatewayClient } from "./client.js";
import { WebSocketTransport } from "./wsTransport.js";
import { RadarViewState } from "./radar.js";
import { StripBoard } from "./strips.js";
import { ActionPanel } from "./panel.js";
import { LivePauseBuffer } from "./replay.js";
import { paint, Context2D } from "./canvas.js";
import { ClearanceKind, PANEL_CATALOGUE } from "./clearances.js";

export interface AppConfig {
    bridgeUrl: string;          // ws://host:port bridging to the gateway TCP port
    role: "controller" | "observer";
    groups: string[];
}

export class WorkingPosition {
    view = new RadarViewState();
    strips: StripBoard;
    pauseBuffer = new LivePauseBuffer(this.view);
    client: GatewayClient | null = null;
    panel: ActionPanel | null = null;

    constructor(private config: AppConfig) {
        this.strips = new StripBoard(new Set(config.groups));
    }

    async connect(): Promise<void> {
        const transport = await WebSocketTransport.connect(this.config.bridgeUrl);
        this.client = new GatewayClient(transport);
        await this.client.hello(this.config.role, this.config.groups, "working-position");
        this.panel = new ActionPanel(this.client, this.strips);
        this.client.onSnapshot((obs, seq) => {
            this.pauseBuffer.feed(obs, seq);
            this.strips.update(obs);
        });
        this.client.onControlLost((callsign) => {
            this.strips.noteRejected(callsign, "control lost");
        });
    }

    render(ctx: Context2D): void {
        paint(ctx, this.view);
    }
}

/** Mount into a page with #radar (canvas), #strips, #panel containers. */
export async function mount(config: AppConfig): Promise<WorkingPosition> {
    const wp = new WorkingPosition(config);
    await wp.connect();

    const canvas = document.getElementById("radar") as HTMLCanvasElement | null;
    const stripsEl = document.getElementById("strips");
    const panelEl = document.getElementById("panel");
    if (canvas) {
        wp.view.transform.width = canvas.width;
        wp.view.transform.height = canvas.height;
        const ctx = canvas.getContext("2d");
        const redraw = () => {
            if (ctx) wp.render(ctx as unknown as Context2D);
            if (stripsEl) renderStrips(stripsEl, wp);
            requestAnimationFrame(redraw);
        };
        canvas.addEventListener("click", (ev) => {
            const rect = canvas.getBoundingClientRect();
            wp.view.select(pickBlip(wp.view, ev.clientX - rect.left, ev.clientY - rect.top));
            wp.panel?.select(wp.view.selected);
        });
        canvas.addEventListener("wheel", (ev) => {
            ev.preventDefault();
            wp.view.zoom(ev.deltaY < 0 ? 1.15 : 1 / 1.15);
        });
        requestAnimationFrame(redraw);
    }
    if (panelEl && wp.panel) renderPanel(panelEl, wp);
    return wp;
}

function pickBlip(view: RadarViewState, x: number, y: number): string | null {
    let best: string | null = null;
    let bestD = 12 * 12;
    for (const blip of view.blips.values()) {
        const p = view.project(blip.lat, blip.lon);
        const d = (p.x - x) ** 2 + (p.y - y) ** 2;
        if (d < bestD) {
            bestD = d;
            best = blip.callsign;
        }
    }
    return best;
}

function renderStrips(el: HTMLElement, wp: WorkingPosition): void {
    el.innerHTML = wp.strips.list().map((s) => `
      <div class="strip${s.pendingClearance ? " pending" : ""}">
        <b>${s.callsign}</b> ${s.aircraftType} FL${Math.round(s.fl)}
        &rarr; FL${Math.round(s.clearedFl)} ${s.verticalMode}
        <span class="route">${s.routeExcerpt}</span>
        ${s.coordinations.map((c) => `<span class="coord">${c}</span>`).join("")}
        ${s.lastRejection ? `<span class="reject">${s.lastRejection}</span>` : ""}
      </div>`).join("");
}

function renderPanel(el: HTMLElement, wp: WorkingPosition): void {
    el.innerHTML = PANEL_CATALOGUE.map((entry) => `
      <form data-kind="${entry.kind}" class="clearance">
        <span>${entry.label}</span>
        ${entry.fields.map((f) => f.input === "direction"
            ? `<select name="${f.name}"><option>left</option><option>right</option></select>`
            : `<input name="${f.name}" placeholder="${f.label}">`).join("")}
        <button type="submit">Issue</button>
        <span class="panel-error"></span>
      </form>`).join("");
    el.querySelectorAll("form.clearance").forEach((form) => {
        form.addEventListener("submit", async (ev) => {
            ev.preventDefault();
            const f = form as HTMLFormElement;
            const kind = f.dataset.kind as ClearanceKind;
            const inputs: Record<string, unknown> = {};
            new FormData(f).forEach((value, key) => { inputs[key] = value; });
            const result = await wp.panel?.issue(kind, inputs);
            const errEl = f.querySelector(".panel-error");
            if (errEl) {
                errEl.textContent = result?.error ?? result?.reason ?? "";
            }
        });
    });
}
