/**
 * Digital flight strips: one strip per aircraft on the session's frequency,
 * stable ordering under updates, pending-clearance and rejection surfacing.
 */

import { CoordinationObs, Observation } from "./protocol.js";

export interface Strip {
    callsign: string;
    aircraftType: string;
    routeExcerpt: string;
    fl: number;
    clearedFl: number;
    verticalMode: string;
    coordinations: string[];
    pendingClearance: boolean;
    lastRejection: string | null;
}

export class StripBoard {
    /** groups this board works; empty set means everything visible */
    constructor(public groups: Set<string> = new Set()) {}

    private order: string[] = [];
    private strips = new Map<string, Strip>();
    private pendingUntil = new Map<string, number>();
    private rejections = new Map<string, string>();

    update(obs: Observation): void {
        const mine = obs.aircraft.filter(
            (ac) => this.groups.size === 0 ||
                (ac.comms_group !== null && this.groups.has(ac.comms_group)));
        const seen = new Set<string>();
        for (const ac of mine) {
            seen.add(ac.callsign);
            if (!this.strips.has(ac.callsign)) this.order.push(ac.callsign);
            const pendingAt = this.pendingUntil.get(ac.callsign);
            this.strips.set(ac.callsign, {
                callsign: ac.callsign,
                aircraftType: ac.plan.aircraft_type,
                routeExcerpt: ac.plan.route.slice(0, 3).join(" "),
                fl: ac.fl,
                clearedFl: ac.cleared_fl,
                verticalMode: ac.vertical_mode,
                coordinations: obs.coordinations
                    .filter((c) => c.callsign === ac.callsign && describeActive(c))
                    .map(describeCoordination),
                pendingClearance: pendingAt !== undefined && obs.sim_time < pendingAt,
                lastRejection: this.rejections.get(ac.callsign) ?? null,
            });
        }
        this.order = this.order.filter((cs) => seen.has(cs));
        for (const cs of [...this.strips.keys()]) {
            if (!seen.has(cs)) this.strips.delete(cs);
        }
    }

    /** Mark an issued clearance as pending until its execution time. */
    noteIssued(callsign: string, executeAt: number | null): void {
        if (executeAt !== null) this.pendingUntil.set(callsign, executeAt);
        this.rejections.delete(callsign);
    }

    /** Surface a server rejection on the strip. */
    noteRejected(callsign: string, reason: string): void {
        this.rejections.set(callsign, reason);
    }

    list(): Strip[] {
        return this.order
            .map((cs) => this.strips.get(cs))
            .filter((s): s is Strip => s !== undefined);
    }

    get(callsign: string): Strip | undefined {
        return this.strips.get(callsign);
    }
}

function describeActive(c: CoordinationObs): boolean {
    return c.status === "standing" || c.status === "tactical";
}

function describeCoordination(c: CoordinationObs): string {
    const point = c.transfer_point ? " @pt" : "";
    return `${c.from_group}>${c.to_group} FL${Math.round(c.transfer_fl)}${point}`;
}
