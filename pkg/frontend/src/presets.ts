/**
 * Built-in design sessions. The first mirrors the lag-plus-saturation
 * plant walked through C0 = 1, C1 = s(s+1)/(1+s+s^2), C2 = s; the second
 * drives a first-order controller under a bandlimited signal class with
 * a single gain knob.
 */

import type { SystemExpr } from "./schema.js";
import { newSession, type DesignSessionDoc, type Parameters } from "./session.js";

export const LAG_SAT_PLANT: SystemExpr = {
  type: "compose",
  outer: { type: "lti", num: [1], den: [1, 1] },
  inner: { type: "static", kind: "saturation", limit: 1.0 },
};

export const DOUBLE_INTEGRATOR_LAG: SystemExpr = { type: "lti", num: [1], den: [0, 1, 1] };

export const CONTROLLER_PRESETS: Record<string, Parameters> = {
  "C0 = 1": { num: [1], den: [1] },
  "C1 = s(s+1)/(1+s+s^2)": { num: [0, 1, 1], den: [1, 1, 1] },
  "C2 = s": { num: [0, 1], den: [1] },
};

export function example1Session(): DesignSessionDoc {
  return newSession("loop shaping: lag + saturation plant", LAG_SAT_PLANT, {
    num: ["num"],
    den: ["den"],
    fixed_plant: DOUBLE_INTEGRATOR_LAG,
    parameters: { num: [1], den: [1] },
    ranges: {},
  });
}

export function example2Session(): DesignSessionDoc {
  return newSession(
    "bandlimited first-order controller",
    { type: "static", kind: "saturation", limit: 1.0 },
    {
      num: [1],
      den: [1, "k"],
      fixed_plant: null,
      parameters: { k: 1.0 },
      ranges: { k: [0.05, 4] },
    },
    { band: [0.0, 1.0], amplitude: 1.0, horizon: 20.0, dt: 1e-3 },
  );
}
