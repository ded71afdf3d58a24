/**
 * Radar display state. Blips, labels, strips, and banners update atomically
 * per snapshot; trails keep the last five positions at the radar cadence.
 * Everything except the trails is rebuildable from the latest snapshot alone
 * (the core-state idempotence the tests pin down); trails are the one
 * message-history artifact, mirroring an operational radar's afterglow.
 */

import { AircraftObs, Observation } from "./protocol.js";

export const TRAIL_LENGTH = 5;

export interface ViewTransform {
    centerLat: number;
    centerLon: number;
    /** pixels per degree of longitude at the view centre */
    scale: number;
    width: number;
    height: number;
}

export interface Blip {
    callsign: string;
    lat: number;
    lon: number;
    fl: number;
    heading: number;
    groundSpeedKt: number;
    selectedFl: number | null;
    clearedFl: number;
    source: string;
    inLos: boolean;
    trail: { lat: number; lon: number }[];
    label: string[];
    intent?: Record<string, unknown>;
}

export class RadarViewState {
    transform: ViewTransform = {
        centerLat: 51.5, centerLon: 0.0, scale: 120, width: 1024, height: 768,
    };
    simTime = 0;
    done = false;
    blips = new Map<string, Blip>();
    selected: string | null = null;
    openLos: [string, string][] = [];
    minNormSep: number | null = null;
    rewardLastTick = 0;
    /** dropped / out-of-order snapshot sequence numbers */
    droppedSeqs: number[] = [];
    private lastSeq = -1;

    /** Apply one snapshot; stale sequence numbers are dropped and logged. */
    applySnapshot(obs: Observation, seq: number): boolean {
        if (seq <= this.lastSeq) {
            this.droppedSeqs.push(seq);
            return false;
        }
        this.lastSeq = seq;
        this.simTime = obs.sim_time;
        this.done = obs.done;
        this.openLos = obs.open_los;
        this.minNormSep = obs.min_norm_sep;
        this.rewardLastTick = obs.reward_last_tick;
        const losMembers = new Set(obs.open_los.flat());
        const seen = new Set<string>();
        for (const ac of obs.aircraft) {
            seen.add(ac.callsign);
            const prior = this.blips.get(ac.callsign);
            const trail = prior
                ? [...prior.trail, { lat: prior.lat, lon: prior.lon }].slice(-TRAIL_LENGTH)
                : [];
            this.blips.set(ac.callsign, {
                callsign: ac.callsign,
                lat: ac.lat,
                lon: ac.lon,
                fl: ac.fl,
                heading: ac.heading,
                groundSpeedKt: ac.ground_speed_kt,
                selectedFl: ac.selected_fl,
                clearedFl: ac.cleared_fl,
                source: ac.source,
                inLos: losMembers.has(ac.callsign),
                trail,
                label: blipLabel(ac),
                intent: ac.published_intent,
            });
        }
        for (const callsign of [...this.blips.keys()]) {
            if (!seen.has(callsign)) this.blips.delete(callsign);
        }
        if (this.selected && !seen.has(this.selected)) this.selected = null;
        return true;
    }

    select(callsign: string | null): void {
        this.selected = callsign && this.blips.has(callsign) ? callsign : null;
    }

    pan(dLat: number, dLon: number): void {
        this.transform.centerLat += dLat;
        this.transform.centerLon += dLon;
    }

    zoom(factor: number): void {
        this.transform.scale = Math.min(5000, Math.max(5, this.transform.scale * factor));
    }

    /** Equirectangular projection of a position into view pixels. */
    project(lat: number, lon: number): { x: number; y: number } {
        const t = this.transform;
        const kLat = Math.cos((t.centerLat * Math.PI) / 180);
        return {
            x: t.width / 2 + (lon - t.centerLon) * t.scale,
            y: t.height / 2 - (lat - t.centerLat) * t.scale / kLat,
        };
    }

    /**
     * The rebuildable core: everything derived from the latest snapshot,
     * trails (message-history afterglow) excluded.
     */
    coreState(): Record<string, unknown> {
        const blips = [...this.blips.values()]
            .map(({ trail, ...rest }) => rest)
            .sort((a, b) => a.callsign.localeCompare(b.callsign));
        return {
            simTime: this.simTime,
            done: this.done,
            openLos: this.openLos,
            minNormSep: this.minNormSep,
            blips,
        };
    }
}

function blipLabel(ac: AircraftObs): string[] {
    const lines = [ac.callsign, `${Math.round(ac.fl)} ${Math.round(ac.ground_speed_kt)}`];
    if (ac.selected_fl !== null) lines.push(`S${Math.round(ac.selected_fl)}`);
    return lines;
}
