/**
 * A design session: one plant, one controller template with named numeric
 * parameters, and the append-only history of margin evaluations. Every
 * snapshot keeps the exact /api/margin request body it was computed from,
 * so a session file replays against a live server and must reproduce the
 * recorded numbers.
 */

import { canonicalStringify } from "./canonical.js";
import type {
  MarginReport,
  MarginRequest,
  SignalClassDoc,
  SystemExpr,
} from "./schema.js";

export const SESSION_SCHEMA_VERSION = "1";

/** A coefficient is a literal, or the name of a template parameter. */
export type Coefficient = number | string;

/** Scalar parameters drive sliders; list parameters splice whole coefficient rows. */
export type ParameterValue = number | number[];
export type Parameters = Record<string, ParameterValue>;

export interface ControllerTemplate {
  /** Controller numerator/denominator in ascending powers of s. */
  num: Coefficient[];
  den: Coefficient[];
  /** Linear plant composed after the controller to form the loop, if any. */
  fixed_plant: SystemExpr | null;
  parameters: Parameters;
  /** Declared slider ranges for scalar parameters. */
  ranges: Record<string, [number, number]>;
}

export interface Snapshot {
  parameters: Parameters;
  /** Body POSTed to /api/margin, kept verbatim for replay. */
  request: MarginRequest;
  report: MarginReport;
}

export interface DesignSessionDoc {
  schema_version: string;
  title: string;
  /** The uncertain block whose SRG closure the margin separates from. */
  plant: SystemExpr;
  controller_template: ControllerTemplate;
  signal_class: SignalClassDoc | null;
  resolution: number | null;
  history: Snapshot[];
}

export class SessionFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SessionFormatError";
  }
}

// ---------------------------------------------------------------------------
// Template evaluation
// ---------------------------------------------------------------------------

function resolveRow(row: Coefficient[], params: Parameters, what: string): number[] {
  const out: number[] = [];
  for (const c of row) {
    if (typeof c === "number") {
      out.push(c);
      continue;
    }
    const v = params[c];
    if (v === undefined) {
      throw new SessionFormatError(`${what} references unknown parameter '${c}'`);
    }
    if (typeof v === "number") {
      out.push(v);
    } else {
      out.push(...v);
    }
  }
  if (out.length === 0) {
    throw new SessionFormatError(`${what} resolved to an empty coefficient list`);
  }
  return out;
}

/** The controller transfer function for one parameter assignment. */
export function controllerExpr(tpl: ControllerTemplate, params: Parameters): SystemExpr {
  const c: SystemExpr = {
    type: "lti",
    num: resolveRow(tpl.num, params, "numerator"),
    den: resolveRow(tpl.den, params, "denominator"),
  };
  return tpl.fixed_plant === null ? c : { type: "compose", outer: c, inner: tpl.fixed_plant };
}

export function validateParameters(tpl: ControllerTemplate, updates: Parameters): void {
  for (const [name, value] of Object.entries(updates)) {
    if (!(name in tpl.parameters)) {
      throw new SessionFormatError(`unknown parameter '${name}'`);
    }
    const values = typeof value === "number" ? [value] : value;
    for (const v of values) {
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new SessionFormatError(`parameter '${name}' must be finite, got ${v}`);
      }
    }
    const range = tpl.ranges[name];
    if (range && typeof value === "number" && (value < range[0] || value > range[1])) {
      throw new SessionFormatError(
        `parameter '${name}' = ${value} outside declared range [${range[0]}, ${range[1]}]`,
      );
    }
  }
}

/** The /api/margin body for one parameter assignment. */
export function marginRequest(doc: DesignSessionDoc, params: Parameters): MarginRequest {
  const body: MarginRequest = {
    controller: controllerExpr(doc.controller_template, params),
    plant: doc.plant,
  };
  if (doc.signal_class !== null) {
    body.class = doc.signal_class;
  }
  if (doc.resolution !== null) {
    body.resolution = doc.resolution;
  }
  return body;
}

// ---------------------------------------------------------------------------
// Session lifecycle
// ---------------------------------------------------------------------------

export function newSession(
  title: string,
  plant: SystemExpr,
  template: ControllerTemplate,
  signalClass: SignalClassDoc | null = null,
  resolution: number | null = null,
): DesignSessionDoc {
  return {
    schema_version: SESSION_SCHEMA_VERSION,
    title,
    plant,
    controller_template: template,
    signal_class: signalClass,
    resolution,
    history: [],
  };
}

/** Append a snapshot; history is never edited in place. */
export function appendSnapshot(
  doc: DesignSessionDoc,
  parameters: Parameters,
  request: MarginRequest,
  report: MarginReport,
): DesignSessionDoc {
  return {
    ...doc,
    controller_template: {
      ...doc.controller_template,
      parameters: { ...doc.controller_template.parameters, ...parameters },
    },
    history: [...doc.history, { parameters, request, report }],
  };
}

export function exportSession(doc: DesignSessionDoc): string {
  return canonicalStringify(doc);
}

function isObject(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

export function importSession(text: string): DesignSessionDoc {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SessionFormatError(`session file is not JSON: ${String(err)}`);
  }
  if (!isObject(raw)) {
    throw new SessionFormatError("session file must be a JSON object");
  }
  if (raw["schema_version"] !== SESSION_SCHEMA_VERSION) {
    throw new SessionFormatError(
      `unsupported session schema_version ${JSON.stringify(raw["schema_version"])}`,
    );
  }
  for (const field of ["title", "plant", "controller_template", "history"]) {
    if (!(field in raw)) {
      throw new SessionFormatError(`session file is missing '${field}'`);
    }
  }
  if (!Array.isArray(raw["history"])) {
    throw new SessionFormatError("'history' must be an array");
  }
  const tpl = raw["controller_template"];
  if (!isObject(tpl) || !Array.isArray(tpl["num"]) || !Array.isArray(tpl["den"])) {
    throw new SessionFormatError("'controller_template' must carry num/den coefficient lists");
  }
  for (const [i, snap] of (raw["history"] as unknown[]).entries()) {
    if (!isObject(snap) || !isObject(snap["request"]) || !isObject(snap["report"])) {
      throw new SessionFormatError(`history[${i}] must carry 'request' and 'report'`);
    }
  }
  const doc = raw as unknown as DesignSessionDoc;
  return {
    ...doc,
    signal_class: doc.signal_class ?? null,
    resolution: doc.resolution ?? null,
  };
}
