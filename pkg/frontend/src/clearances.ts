/**
 * The eleven clearance types and client-side validation mirroring the
 * server's attribute ranges, so obviously bad input never leaves the panel.
 */

export type ClearanceKind =
    | "direct_to"
    | "fly_heading"
    | "turn_by"
    | "maintain_present_heading"
    | "climb_descend_now"
    | "descend_when_ready_level_by"
    | "descend_now_level_by"
    | "change_cas"
    | "change_mach"
    | "change_rocd"
    | "contact_frequency";

export interface ClearancePayload {
    kind: ClearanceKind;
    [field: string]: unknown;
}

export interface FieldSpec {
    name: string;
    label: string;
    input: "number" | "waypoint" | "direction" | "group";
    min?: number;
    max?: number;
    minExclusive?: boolean;
    maxExclusive?: boolean;
}

export interface PanelEntry {
    kind: ClearanceKind;
    label: string;
    fields: FieldSpec[];
}

/** Panel catalogue: one entry per issuable clearance type. */
export const PANEL_CATALOGUE: PanelEntry[] = [
    { kind: "direct_to", label: "Route direct to",
      fields: [{ name: "waypoint", label: "Waypoint", input: "waypoint" }] },
    { kind: "fly_heading", label: "Fly heading",
      fields: [{ name: "heading", label: "Heading", input: "number", min: 0, max: 360, maxExclusive: true }] },
    { kind: "turn_by", label: "Turn left/right by degrees",
      fields: [{ name: "direction", label: "Direction", input: "direction" },
               { name: "degrees", label: "Degrees", input: "number", min: 0, max: 360, minExclusive: true }] },
    { kind: "maintain_present_heading", label: "Maintain present heading", fields: [] },
    { kind: "climb_descend_now", label: "Climb/descend now",
      fields: [{ name: "fl", label: "Flight level", input: "number", min: 0, max: 600 }] },
    { kind: "descend_when_ready_level_by", label: "Descend when ready to be level by",
      fields: [{ name: "fl", label: "Flight level", input: "number", min: 0, max: 600 },
               { name: "waypoint", label: "Waypoint", input: "waypoint" }] },
    { kind: "descend_now_level_by", label: "Descend now to be level by",
      fields: [{ name: "fl", label: "Flight level", input: "number", min: 0, max: 600 },
               { name: "waypoint", label: "Waypoint", input: "waypoint" }] },
    { kind: "change_cas", label: "Change CAS to",
      fields: [{ name: "cas", label: "CAS (kt)", input: "number", min: 120, max: 370 }] },
    { kind: "change_mach", label: "Change Mach speed to",
      fields: [{ name: "mach", label: "Mach", input: "number", min: 0.3, max: 0.95,
                 minExclusive: true, maxExclusive: true }] },
    { kind: "change_rocd", label: "Change rate of climb/descent to",
      fields: [{ name: "rocd", label: "Vertical speed (ft/min)", input: "number", min: 100, max: 8000 }] },
    { kind: "contact_frequency", label: "Contact another frequency",
      fields: [{ name: "group", label: "Next sector", input: "group" }] },
];

export interface ValidationResult {
    ok: boolean;
    error?: string;
    clearance?: ClearancePayload;
}

/** Typed range validation; returns the wire payload when everything holds. */
export function buildClearance(kind: ClearanceKind,
                               inputs: Record<string, unknown>): ValidationResult {
    const entry = PANEL_CATALOGUE.find((e) => e.kind === kind);
    if (!entry) return { ok: false, error: `unknown clearance kind ${kind}` };
    const clearance: ClearancePayload = { kind };
    for (const field of entry.fields) {
        const raw = inputs[field.name];
        if (raw === undefined || raw === null || raw === "") {
            return { ok: false, error: `${field.label} is required` };
        }
        if (field.input === "number") {
            const value = Number(raw);
            if (!Number.isFinite(value)) {
                return { ok: false, error: `${field.label} must be a number` };
            }
            if (field.min !== undefined &&
                (field.minExclusive ? value <= field.min : value < field.min)) {
                return { ok: false, error: `${field.label} below ${field.min}` };
            }
            if (field.max !== undefined &&
                (field.maxExclusive ? value >= field.max : value > field.max)) {
                return { ok: false, error: `${field.label} above ${field.max}` };
            }
            clearance[field.name] = value;
        } else if (field.input === "direction") {
            if (raw !== "left" && raw !== "right") {
                return { ok: false, error: "direction must be left or right" };
            }
            clearance[field.name] = raw;
        } else {
            const text = String(raw).trim();
            if (!text) return { ok: false, error: `${field.label} is required` };
            clearance[field.name] = text;
        }
    }
    return { ok: true, clearance };
}
