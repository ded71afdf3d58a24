/** Node TCP transport; the test harness and headless tooling use this. */

import * as net from "node:net";

import { Transport } from "./client.js";

export class TcpTransport implements Transport {
    private dataCb: ((data: Uint8Array) => void) | null = null;
    private closeCb: (() => void) | null = null;

    private constructor(private socket: net.Socket) {
        socket.on("data", (chunk) => this.dataCb?.(new Uint8Array(chunk)));
        socket.on("close", () => this.closeCb?.());
        socket.on("error", () => this.closeCb?.());
    }

    static connect(host: string, port: number, timeoutMs = 5000): Promise<TcpTransport> {
        return new Promise((resolve, reject) => {
            const socket = net.createConnection({ host, port });
            const timer = setTimeout(() => {
                socket.destroy();
                reject(new Error(`connect timeout to ${host}:${port}`));
            }, timeoutMs);
            socket.once("connect", () => {
                clearTimeout(timer);
                resolve(new TcpTransport(socket));
            });
            socket.once("error", (err) => {
                clearTimeout(timer);
                reject(err);
            });
        });
    }

    send(data: Uint8Array): void {
        this.socket.write(data);
    }

    onData(cb: (data: Uint8Array) => void): void {
        this.dataCb = cb;
    }

    onClose(cb: () => void): void {
        this.closeCb = cb;
    }

    close(): void {
        this.socket.end();
        this.socket.destroy();
    }
}
