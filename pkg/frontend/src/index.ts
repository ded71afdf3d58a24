export * from "./protocol.js";
export * from "./clearances.js";
export * from "./client.js";
export * from "./radar.js";
export * from "./strips.js";
export * from "./panel.js";
export * from "./replay.js";
export * from "./canvas.js";
