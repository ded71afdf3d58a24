/**
 * Wire protocol client side: length-delimited JSON frames and the message
 * envelope. See docs/protocol.md in the repository root for the catalogue.
 */

export const PROTOCOL_VERSION = 1;
export const MAX_FRAME_BYTES = 8 * 1024 * 1024;

export interface Envelope {
    v: number;
    session: string;
    seq: number;
    type: string;
    payload: Record<string, unknown>;
}

export interface PlanSummary {
    aircraft_type: string;
    route: string[];
    requested_fl: number;
    departure: string;
    destination: string;
}

export interface AircraftObs {
    callsign: string;
    lat: number;
    lon: number;
    fl: number;
    heading: number;
    ground_speed_kt: number;
    rocd_fpm: number;
    selected_fl: number | null;
    cleared_fl: number;
    vertical_mode: string;
    source: string;
    controlling_group: string | null;
    comms_group: string | null;
    plan: PlanSummary;
    published_intent?: Record<string, unknown>;
}

export interface CoordinationObs {
    callsign: string;
    from_group: string;
    to_group: string;
    transfer_fl: number;
    transfer_point: [number, number] | null;
    estimate: number | null;
    status: string;
}

export interface Observation {
    sim_time: number;
    done: boolean;
    wind_access: string;
    aircraft: AircraftObs[];
    coordinations: CoordinationObs[];
    open_los: [string, string][];
    reward_last_tick: number;
    min_norm_sep: number | null;
}

export function makeMsg(session: string, seq: number, type: string,
                        payload: Record<string, unknown>): Envelope {
    return { v: PROTOCOL_VERSION, session, seq, type, payload };
}

export function encodeMessage(msg: Envelope): Uint8Array {
    const payload = new TextEncoder().encode(JSON.stringify(msg));
    if (payload.length > MAX_FRAME_BYTES) {
        throw new Error(`frame of ${payload.length} bytes exceeds cap`);
    }
    const head = new TextEncoder().encode(`${payload.length}\n`);
    const out = new Uint8Array(head.length + payload.length);
    out.set(head, 0);
    out.set(payload, head.length);
    return out;
}

/** Incremental decoder; transports may split or coalesce frames freely. */
export class FrameDecoder {
    private buf = new Uint8Array(0);

    feed(data: Uint8Array): Envelope[] {
        const joined = new Uint8Array(this.buf.length + data.length);
        joined.set(this.buf, 0);
        joined.set(data, this.buf.length);
        this.buf = joined;
        const out: Envelope[] = [];
        for (;;) {
            const nl = this.buf.indexOf(0x0a);
            if (nl < 0) {
                if (this.buf.length > 32) throw new Error("frame header too long");
                break;
            }
            const head = new TextDecoder().decode(this.buf.subarray(0, nl));
            const length = Number(head);
            if (!Number.isInteger(length) || length < 0 || length > MAX_FRAME_BYTES) {
                throw new Error(`bad frame header ${JSON.stringify(head)}`);
            }
            if (this.buf.length < nl + 1 + length) break;
            const body = this.buf.subarray(nl + 1, nl + 1 + length);
            this.buf = this.buf.slice(nl + 1 + length);
            out.push(JSON.parse(new TextDecoder().decode(body)) as Envelope);
        }
        return out;
    }
}
