/**
 * Canvas painting of a radar view. Takes the minimal 2-D context surface so
 * headless tests can hand in a recorder; the browser passes the real thing.
 */

import { RadarViewState } from "./radar.js";

export interface Context2D {
    fillStyle: string | CanvasGradient | CanvasPattern;
    strokeStyle: string | CanvasGradient | CanvasPattern;
    lineWidth: number;
    font: string;
    clearRect(x: number, y: number, w: number, h: number): void;
    beginPath(): void;
    moveTo(x: number, y: number): void;
    lineTo(x: number, y: number): void;
    arc(x: number, y: number, r: number, a0: number, a1: number): void;
    stroke(): void;
    fill(): void;
    fillText(text: string, x: number, y: number): void;
}

export interface SectorOutline {
    id: string;
    boundary: [number, number][];
}

const BLIP_RADIUS = 4;
const ALERT_COLOR = "#ff5050";
const BLIP_COLOR = "#50ff8a";
const TRAIL_COLOR = "#2a7a4a";
const SECTOR_COLOR = "#3a3a5a";
const TEXT_COLOR = "#d0ffd0";

export function paint(ctx: Context2D, view: RadarViewState,
                      sectors: SectorOutline[] = []): void {
    const { width, height } = view.transform;
    ctx.clearRect(0, 0, width, height);

    ctx.strokeStyle = SECTOR_COLOR;
    ctx.lineWidth = 1;
    for (const sector of sectors) {
        ctx.beginPath();
        sector.boundary.forEach(([lat, lon], i) => {
            const p = view.project(lat, lon);
            if (i === 0) ctx.moveTo(p.x, p.y);
            else ctx.lineTo(p.x, p.y);
        });
        const first = view.project(sector.boundary[0][0], sector.boundary[0][1]);
        ctx.lineTo(first.x, first.y);
        ctx.stroke();
    }

    for (const blip of view.blips.values()) {
        ctx.fillStyle = TRAIL_COLOR;
        for (const past of blip.trail) {
            const p = view.project(past.lat, past.lon);
            ctx.beginPath();
            ctx.arc(p.x, p.y, 1.5, 0, Math.PI * 2);
            ctx.fill();
        }
        const pos = view.project(blip.lat, blip.lon);
        ctx.fillStyle = blip.inLos ? ALERT_COLOR : BLIP_COLOR;
        ctx.beginPath();
        ctx.arc(pos.x, pos.y, BLIP_RADIUS, 0, Math.PI * 2);
        ctx.fill();
        ctx.fillStyle = blip.callsign === view.selected ? "#ffffff" : TEXT_COLOR;
        ctx.font = "11px monospace";
        blip.label.forEach((line, i) => {
            ctx.fillText(line, pos.x + 8, pos.y - 8 + i * 12);
        });
    }

    ctx.fillStyle = TEXT_COLOR;
    ctx.font = "13px monospace";
    ctx.fillText(`t=${view.simTime.toFixed(0)}s`, 8, 16);
    if (view.openLos.length > 0) {
        ctx.fillStyle = ALERT_COLOR;
        ctx.fillText(`LoS: ${view.openLos.map((p) => p.join("/")).join("  ")}`, 8, 32);
    }
}
