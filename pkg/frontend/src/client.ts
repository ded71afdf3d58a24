/**
 * Gateway client: transport-agnostic session handling with request/response
 * helpers and a snapshot subscription. Node tests drive it over TCP; a
 * browser build supplies a WebSocket-to-TCP bridge transport.
 */

import {
    Envelope,
    FrameDecoder,
    Observation,
    PROTOCOL_VERSION,
    encodeMessage,
    makeMsg,
} from "./protocol.js";

export interface Transport {
    send(data: Uint8Array): void;
    onData(cb: (data: Uint8Array) => void): void;
    onClose(cb: () => void): void;
    close(): void;
}

export type Role = "agent" | "controller" | "observer";

interface Waiter {
    match: (msg: Envelope) => boolean;
    resolve: (msg: Envelope) => void;
    reject: (err: Error) => void;
}

export class GatewayClient {
    session = "";
    role: Role = "observer";
    private seq = 0;
    private decoder = new FrameDecoder();
    private waiters: Waiter[] = [];
    private snapshotCbs: ((obs: Observation, seq: number) => void)[] = [];
    private controlLostCbs: ((callsign: string) => void)[] = [];
    private lastServerSeq = -1;
    /** sequence gaps observed in the server stream (stale drops) */
    readonly gaps: number[] = [];

    constructor(private transport: Transport) {
        transport.onData((data) => this.ingest(data));
        transport.onClose(() => {
            const err = new Error("connection closed");
            for (const w of this.waiters.splice(0)) w.reject(err);
        });
    }

    private ingest(data: Uint8Array): void {
        for (const msg of this.decoder.feed(data)) {
            if (msg.seq <= this.lastServerSeq) {
                this.gaps.push(msg.seq);   // stale or duplicated: drop, log
                continue;
            }
            if (msg.seq > this.lastServerSeq + 1 && this.lastServerSeq >= 0) {
                this.gaps.push(msg.seq);
            }
            this.lastServerSeq = msg.seq;
            if (msg.type === "snapshot") {
                const obs = (msg.payload as { observation: Observation }).observation;
                for (const cb of this.snapshotCbs) cb(obs, msg.seq);
                continue;
            }
            if (msg.type === "control-lost") {
                const callsign = (msg.payload as { callsign: string }).callsign;
                for (const cb of this.controlLostCbs) cb(callsign);
                continue;
            }
            const i = this.waiters.findIndex((w) => w.match(msg));
            if (i >= 0) {
                const [w] = this.waiters.splice(i, 1);
                w.resolve(msg);
            }
        }
    }

    private send(type: string, payload: Record<string, unknown>): void {
        this.transport.send(encodeMessage(makeMsg(this.session, this.seq++, type, payload)));
    }

    private expect(types: string[], timeoutMs = 5000): Promise<Envelope> {
        return new Promise((resolve, reject) => {
            const timer = setTimeout(
                () => reject(new Error(`timeout waiting for ${types.join("/")}`)), timeoutMs);
            this.waiters.push({
                match: (m) => types.includes(m.type),
                resolve: (m) => { clearTimeout(timer); resolve(m); },
                reject: (e) => { clearTimeout(timer); reject(e); },
            });
        });
    }

    async hello(role: Role, groups: string[] = [], name = ""): Promise<Envelope> {
        this.send("hello", { protocol_version: PROTOCOL_VERSION, role, groups, name });
        const ack = await this.expect(["hello-ack", "error"]);
        if (ack.type === "error") {
            throw new Error(String((ack.payload as { message: string }).message));
        }
        this.session = String(ack.payload.session);
        this.role = role;
        return ack;
    }

    async reset(seed?: number): Promise<Observation> {
        this.send("reset", seed === undefined ? {} : { seed });
        const ok = await this.expect(["reset-ok", "error"]);
        if (ok.type === "error") {
            throw new Error(String((ok.payload as { message: string }).message));
        }
        return (ok.payload as { observation: Observation }).observation;
    }

    async step(actions: { callsign: string; clearance: Record<string, unknown> }[],
               nTicks = 1): Promise<Envelope> {
        this.send("step", { actions, n_ticks: nTicks });
        return this.expect(["step-result", "error"]);
    }

    async action(callsign: string,
                 clearance: Record<string, unknown>): Promise<Envelope> {
        this.send("action", { callsign, clearance });
        return this.expect(["action-ack", "error"]);
    }

    async takeover(callsign: string): Promise<Envelope> {
        this.send("takeover", { callsign });
        return this.expect(["takeover-result", "error"]);
    }

    async publishIntent(callsign: string,
                        intent: Record<string, unknown>): Promise<Envelope> {
        this.send("intent", { callsign, intent });
        return this.expect(["intent-ack", "error"]);
    }

    async windLookup(points: [number, number, number][]): Promise<[number, number][]> {
        this.send("wind", { points });
        const res = await this.expect(["wind-result", "error"]);
        return (res.payload as { values: [number, number][] }).values;
    }

    async requestLog(): Promise<string[]> {
        this.send("log-request", {});
        const res = await this.expect(["log-data", "error"]);
        return (res.payload as { lines: string[] }).lines;
    }

    onSnapshot(cb: (obs: Observation, seq: number) => void): void {
        this.snapshotCbs.push(cb);
    }

    onControlLost(cb: (callsign: string) => void): void {
        this.controlLostCbs.push(cb);
    }

    close(): void {
        this.transport.close();
    }
}
