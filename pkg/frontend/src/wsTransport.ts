/**
 * Browser transport: a WebSocket carrying the raw byte stream to a
 * WS-to-TCP bridge in front of the gateway (browsers cannot open plain TCP
 * sockets). Frame boundaries are independent of WebSocket message
 * boundaries; the decoder reassembles either way.
 */

import { Transport } from "./client.js";

export class WebSocketTransport implements Transport {
    private dataCb: ((data: Uint8Array) => void) | null = null;
    private closeCb: (() => void) | null = null;

    private constructor(private ws: WebSocket) {
        ws.binaryType = "arraybuffer";
        ws.onmessage = (ev) => {
            const body = ev.data instanceof ArrayBuffer
                ? new Uint8Array(ev.data)
                : new TextEncoder().encode(String(ev.data));
            this.dataCb?.(body);
        };
        ws.onclose = () => this.closeCb?.();
        ws.onerror = () => this.closeCb?.();
    }

    static connect(url: string, timeoutMs = 5000): Promise<WebSocketTransport> {
        return new Promise((resolve, reject) => {
            const ws = new WebSocket(url);
            const timer = setTimeout(() => {
                ws.close();
                reject(new Error(`connect timeout to ${url}`));
            }, timeoutMs);
            ws.onopen = () => {
                clearTimeout(timer);
                resolve(new WebSocketTransport(ws));
            };
            ws.onerror = () => {
                clearTimeout(timer);
                reject(new Error(`cannot reach ${url}`));
            };
        });
    }

    send(data: Uint8Array): void {
        this.ws.send(data);
    }

    onData(cb: (data: Uint8Array) => void): void {
        this.dataCb = cb;
    }

    onClose(cb: () => void): void {
        this.closeCb = cb;
    }

    close(): void {
        this.ws.close();
    }
}
