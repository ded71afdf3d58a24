/**
 * Replay controls over a logged run: scrub, pause, speed. Replay is strictly
 * read-only; in live mode pausing freezes the display while the world runs,
 * with a lag banner showing how far behind the view is.
 */

import { Observation } from "./protocol.js";
import { RadarViewState } from "./radar.js";

interface SnapshotRecord {
    t: number;
    aircraft: Record<string, unknown>[];
    open_los: [string, string][];
    reward: number;
    min_norm_sep: number | null;
}

/** Parse the canonical event-log lines into replayable observations. */
export function snapshotsFromLog(lines: string[]): Observation[] {
    if (lines.length === 0) throw new Error("empty event log");
    const header = JSON.parse(lines[0]) as { schema_version?: number };
    if (header.schema_version !== 1) {
        throw new Error(`unsupported event log schema ${header.schema_version}`);
    }
    const out: Observation[] = [];
    for (const line of lines.slice(1)) {
        const rec = JSON.parse(line) as { kind: string } & SnapshotRecord;
        if (rec.kind !== "snapshot") continue;
        out.push({
            sim_time: rec.t,
            done: false,
            wind_access: "forecast",
            aircraft: rec.aircraft.map(snapshotAircraftToObs),
            coordinations: [],
            open_los: rec.open_los,
            reward_last_tick: rec.reward,
            min_norm_sep: rec.min_norm_sep,
        });
    }
    return out;
}

function snapshotAircraftToObs(a: Record<string, unknown>) {
    return {
        callsign: String(a.callsign),
        lat: Number(a.lat),
        lon: Number(a.lon),
        fl: Number(a.fl),
        heading: Number(a.heading),
        ground_speed_kt: 0,
        rocd_fpm: Number(a.rocd),
        selected_fl: (a.selected_fl as number | null) ?? null,
        cleared_fl: Number(a.target_fl),
        vertical_mode: String(a.vertical_mode),
        source: String(a.source),
        controlling_group: (a.controlling_group as string | null) ?? null,
        comms_group: (a.comms_group as string | null) ?? null,
        plan: { aircraft_type: "", route: [], requested_fl: 0, departure: "", destination: "" },
    };
}

export class ReplayController {
    readonly readOnly = true;
    view = new RadarViewState();
    playing = false;
    speed = 1.0;
    private index = -1;

    constructor(private snapshots: Observation[]) {
        if (snapshots.length === 0) throw new Error("log carries no snapshots");
        this.scrubToIndex(0);
    }

    get length(): number {
        return this.snapshots.length;
    }

    get position(): number {
        return this.index;
    }

    get simTime(): number {
        return this.view.simTime;
    }

    /** Rebuild the view from scratch up to the target index (inclusive). */
    scrubToIndex(i: number): void {
        const target = Math.max(0, Math.min(this.snapshots.length - 1, i));
        this.view = new RadarViewState();
        for (let k = 0; k <= target; k++) {
            this.view.applySnapshot(this.snapshots[k], k);
        }
        this.index = target;
    }

    /** Scrub to the last snapshot at or before a sim time. */
    scrubToTime(t: number): void {
        let target = 0;
        for (let k = 0; k < this.snapshots.length; k++) {
            if (this.snapshots[k].sim_time <= t) target = k;
        }
        this.scrubToIndex(target);
    }

    stepForward(): void {
        if (this.index < this.snapshots.length - 1) this.scrubToIndex(this.index + 1);
    }

    stepBack(): void {
        if (this.index > 0) this.scrubToIndex(this.index - 1);
    }

    play(): void {
        this.playing = true;
    }

    pause(): void {
        this.playing = false;
    }

    setSpeed(multiple: number): void {
        this.speed = Math.max(0.1, Math.min(64, multiple));
    }
}

/** Live display pause: the world keeps running; the view freezes. */
export class LivePauseBuffer {
    paused = false;
    private buffered: { obs: Observation; seq: number }[] = [];

    constructor(private view: RadarViewState) {}

    /** Seconds of simulation the frozen display lags behind the live feed. */
    get lagS(): number {
        if (!this.paused || this.buffered.length === 0) return 0;
        return this.buffered[this.buffered.length - 1].obs.sim_time - this.view.simTime;
    }

    feed(obs: Observation, seq: number): void {
        if (this.paused) {
            this.buffered.push({ obs, seq });
            return;
        }
        this.view.applySnapshot(obs, seq);
    }

    pause(): void {
        this.paused = true;
    }

    resume(): void {
        this.paused = false;
        for (const { obs, seq } of this.buffered.splice(0)) {
            this.view.applySnapshot(obs, seq);
        }
    }
}
