import { describe, expect, it } from "vitest";

import { FrameDecoder, encodeMessage, makeMsg } from "../src/protocol.js";

describe("frame codec", () => {
    it("round-trips a message", () => {
        const msg = makeMsg("s1", 3, "hello", { role: "agent" });
        const dec = new FrameDecoder();
        expect(dec.feed(encodeMessage(msg))).toEqual([msg]);
    });

    it("handles split and coalesced delivery", () => {
        const a = makeMsg("s1", 0, "bye", {});
        const b = makeMsg("s1", 1, "bye", { last: true });
        const raw = new Uint8Array([...encodeMessage(a), ...encodeMessage(b)]);
        const dec = new FrameDecoder();
        const got = [];
        for (let i = 0; i < raw.length; i += 5) {
            got.push(...dec.feed(raw.subarray(i, Math.min(i + 5, raw.length))));
        }
        expect(got).toEqual([a, b]);
    });

    it("rejects a garbage header", () => {
        const dec = new FrameDecoder();
        expect(() => dec.feed(new TextEncoder().encode("nope\n{}"))).toThrow(/bad frame header/);
    });

    it("survives multi-byte characters in payloads", () => {
        const msg = makeMsg("s1", 0, "intent", { note: "éçん✓" });
        const dec = new FrameDecoder();
        expect(dec.feed(encodeMessage(msg))).toEqual([msg]);
    });
});
