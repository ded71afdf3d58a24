/**
 * Action panel model: selected aircraft plus typed inputs per clearance
 * kind. Validation failures stay inline; only clean payloads reach the wire.
 */

import { buildClearance, ClearanceKind, PANEL_CATALOGUE } from "./clearances.js";
import { GatewayClient } from "./client.js";
import { StripBoard } from "./strips.js";

export interface PanelIssueResult {
    sent: boolean;
    accepted?: boolean;
    error?: string;
    reason?: string;
}

export class ActionPanel {
    selected: string | null = null;
    lastError: string | null = null;

    constructor(private client: GatewayClient, private strips?: StripBoard) {}

    catalogue() {
        return PANEL_CATALOGUE;
    }

    select(callsign: string | null): void {
        this.selected = callsign;
        this.lastError = null;
    }

    /** Validate, send, and surface the outcome on the strip board. */
    async issue(kind: ClearanceKind,
                inputs: Record<string, unknown>): Promise<PanelIssueResult> {
        if (!this.selected) {
            this.lastError = "no aircraft selected";
            return { sent: false, error: this.lastError };
        }
        const check = buildClearance(kind, inputs);
        if (!check.ok || !check.clearance) {
            this.lastError = check.error ?? "invalid input";
            return { sent: false, error: this.lastError };
        }
        this.lastError = null;
        const reply = await this.client.action(this.selected, check.clearance);
        const payload = reply.payload as {
            accepted?: boolean; reason?: string; execute_at?: number | null;
        };
        if (payload.accepted) {
            this.strips?.noteIssued(this.selected, payload.execute_at ?? null);
            return { sent: true, accepted: true };
        }
        const reason = payload.reason ?? "rejected";
        this.strips?.noteRejected(this.selected, reason);
        return { sent: true, accepted: false, reason };
    }
}
