import { describe, expect, it } from "vitest";

import { AircraftObs, Observation } from "../src/protocol.js";
import { RadarViewState, TRAIL_LENGTH } from "../src/radar.js";
import { StripBoard } from "../src/strips.js";
import { Context2D, paint } from "../src/canvas.js";

function aircraft(callsign: string, over: Partial<AircraftObs> = {}): AircraftObs {
    return {
        callsign,
        lat: 51.5,
        lon: 0.0,
        fl: 330,
        heading: 90,
        ground_speed_kt: 440,
        rocd_fpm: 0,
        selected_fl: null,
        cleared_fl: 330,
        vertical_mode: "level",
        source: "simulated",
        controlling_group: "G1",
        comms_group: "G1",
        plan: { aircraft_type: "B738", route: ["AA", "BB", "CC", "DD"],
                requested_fl: 350, departure: "ZZZA", destination: "ZZZB" },
        ...over,
    };
}

function snapshot(t: number, acs: AircraftObs[],
                  los: [string, string][] = []): Observation {
    return {
        sim_time: t,
        done: false,
        wind_access: "forecast",
        aircraft: acs,
        coordinations: [],
        open_los: los,
        reward_last_tick: 0,
        min_norm_sep: null,
    };
}

describe("radar view", () => {
    it("updates blips, labels, and LoS flags atomically per snapshot", () => {
        const view = new RadarViewState();
        view.applySnapshot(snapshot(6, [
            aircraft("AAA111"),
            aircraft("BBB222", { lat: 51.52, fl: 335 }),
        ], [["AAA111", "BBB222"]]), 0);
        expect(view.blips.size).toBe(2);
        expect(view.blips.get("AAA111")?.inLos).toBe(true);
        expect(view.blips.get("BBB222")?.inLos).toBe(true);
        expect(view.blips.get("AAA111")?.label[0]).toBe("AAA111");
        expect(view.blips.get("AAA111")?.label[1]).toContain("330");
    });

    it("keeps a five-position trail at the radar cadence", () => {
        const view = new RadarViewState();
        for (let k = 0; k < 10; k++) {
            view.applySnapshot(snapshot(6 * (k + 1),
                                        [aircraft("AAA111", { lon: 0.01 * k })]), k);
        }
        const trail = view.blips.get("AAA111")?.trail ?? [];
        expect(trail).toHaveLength(TRAIL_LENGTH);
        expect(trail[TRAIL_LENGTH - 1].lon).toBeCloseTo(0.08, 10);
    });

    it("drops out-of-order snapshots and logs the gap", () => {
        const view = new RadarViewState();
        expect(view.applySnapshot(snapshot(6, [aircraft("AAA111")]), 5)).toBe(true);
        expect(view.applySnapshot(snapshot(12, [aircraft("AAA111", { lon: 9 })]), 4)).toBe(false);
        expect(view.blips.get("AAA111")?.lon).toBe(0.0);
        expect(view.droppedSeqs).toContain(4);
    });

    it("empty snapshot clears the board but advances the clock", () => {
        const view = new RadarViewState();
        view.applySnapshot(snapshot(6, [aircraft("AAA111")]), 0);
        view.applySnapshot(snapshot(12, []), 1);
        expect(view.blips.size).toBe(0);
        expect(view.simTime).toBe(12);
    });

    it("rebuild equivalence: 100 snapshots equal a rebuild from the last alone", () => {
        const incremental = new RadarViewState();
        let last: Observation | null = null;
        for (let k = 0; k < 100; k++) {
            last = snapshot(6 * (k + 1), [
                aircraft("AAA111", { lon: 0.005 * k, fl: 330 + 0.1 * k }),
                aircraft("BBB222", { lat: 51.0 + 0.002 * k }),
            ], k % 7 === 0 ? [["AAA111", "BBB222"]] : []);
            incremental.applySnapshot(last, k);
        }
        const rebuilt = new RadarViewState();
        rebuilt.applySnapshot(last!, 99);
        expect(incremental.coreState()).toEqual(rebuilt.coreState());
    });

    it("selection follows aircraft lifetime", () => {
        const view = new RadarViewState();
        view.applySnapshot(snapshot(6, [aircraft("AAA111")]), 0);
        view.select("AAA111");
        expect(view.selected).toBe("AAA111");
        view.applySnapshot(snapshot(12, []), 1);
        expect(view.selected).toBeNull();
    });

    it("projection is centred and zoomable", () => {
        const view = new RadarViewState();
        const centre = view.project(view.transform.centerLat, view.transform.centerLon);
        expect(centre.x).toBe(view.transform.width / 2);
        expect(centre.y).toBe(view.transform.height / 2);
        const before = view.project(52.0, 1.0);
        view.zoom(2.0);
        const after = view.project(52.0, 1.0);
        expect(Math.abs(after.x - centre.x)).toBeCloseTo(2 * Math.abs(before.x - centre.x), 6);
    });
});

describe("canvas painting", () => {
    it("paints blips, trails, labels, and the LoS banner", () => {
        const calls: string[] = [];
        const ctx: Context2D = {
            fillStyle: "", strokeStyle: "", lineWidth: 1, font: "",
            clearRect: () => calls.push("clear"),
            beginPath: () => calls.push("begin"),
            moveTo: () => calls.push("move"),
            lineTo: () => calls.push("line"),
            arc: () => calls.push("arc"),
            stroke: () => calls.push("stroke"),
            fill: () => calls.push("fill"),
            fillText: (text: string) => calls.push(`text:${text}`),
        };
        const view = new RadarViewState();
        view.applySnapshot(snapshot(6, [aircraft("AAA111")], []), 0);
        view.applySnapshot(snapshot(12, [aircraft("AAA111", { lon: 0.02 }),
                                         aircraft("BBB222", { lat: 51.51 })],
                                    [["AAA111", "BBB222"]]), 1);
        paint(ctx, view, [{ id: "S1", boundary: [[51, -1], [52, -1], [52, 1], [51, 1]] }]);
        expect(calls).toContain("clear");
        expect(calls.filter((c) => c === "arc").length).toBeGreaterThanOrEqual(3);
        expect(calls.some((c) => c.startsWith("text:AAA111"))).toBe(true);
        expect(calls.some((c) => c.startsWith("text:LoS"))).toBe(true);
    });
});

describe("strip board", () => {
    it("strip set equals the observation's aircraft for the groups", () => {
        const board = new StripBoard(new Set(["G1"]));
        board.update(snapshot(6, [
            aircraft("AAA111"),
            aircraft("BBB222", { comms_group: "G2" }),
        ]));
        expect(board.list().map((s) => s.callsign)).toEqual(["AAA111"]);
    });

    it("keeps ordering stable under updates", () => {
        const board = new StripBoard();
        board.update(snapshot(6, [aircraft("CCC333"), aircraft("AAA111")]));
        board.update(snapshot(12, [aircraft("AAA111"), aircraft("CCC333"),
                                   aircraft("BBB222")]));
        expect(board.list().map((s) => s.callsign)).toEqual(["CCC333", "AAA111", "BBB222"]);
    });

    it("route excerpt, pending flag, and rejection surface on the strip", () => {
        const board = new StripBoard();
        board.noteIssued("AAA111", 20.0);
        board.update(snapshot(6, [aircraft("AAA111")]));
        expect(board.get("AAA111")?.routeExcerpt).toBe("AA BB CC");
        expect(board.get("AAA111")?.pendingClearance).toBe(true);
        board.update(snapshot(24, [aircraft("AAA111")]));
        expect(board.get("AAA111")?.pendingClearance).toBe(false);

        board.noteRejected("AAA111", "control lost");
        board.update(snapshot(30, [aircraft("AAA111")]));
        expect(board.get("AAA111")?.lastRejection).toBe("control lost");
    });
});
