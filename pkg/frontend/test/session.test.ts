import { readFileSync } from "node:fs";

import { describe, expect, test } from "vitest";

import { example1Session, example2Session } from "../src/presets.js";
import type { MarginReport } from "../src/schema.js";
import {
  appendSnapshot,
  controllerExpr,
  exportSession,
  importSession,
  marginRequest,
  newSession,
  SessionFormatError,
  validateParameters,
} from "../src/session.js";

const SHIPPED = new URL("../sessions/example1.json", import.meta.url);

function dummyReport(margin: number): MarginReport {
  return {
    schema_version: "1",
    kind: "robustness",
    separated: margin > 0,
    margin,
    error_bar: 1e-3,
    bound: margin > 0 ? 1 / margin : "inf",
    witness: margin > 0 ? [[1, 0], [0, 0]] : null,
    tau_certificate: "test stub",
    trace: [],
    r_m: margin,
  };
}

describe("controller templates", () => {
  test("list parameters splice whole coefficient rows", () => {
    const tpl = example1Session().controller_template;
    const expr = controllerExpr(tpl, { num: [0, 1], den: [1] });
    expect(expr).toEqual({
      type: "compose",
      outer: { type: "lti", num: [0, 1], den: [1] },
      inner: { type: "lti", num: [1], den: [0, 1, 1] },
    });
  });

  test("scalar parameters substitute in place", () => {
    const tpl = example2Session().controller_template;
    const expr = controllerExpr(tpl, { k: 2.5 });
    expect(expr).toEqual({ type: "lti", num: [1], den: [1, 2.5] });
  });

  test("unknown parameter names are rejected", () => {
    const tpl = example2Session().controller_template;
    expect(() => controllerExpr(tpl, {})).toThrow(SessionFormatError);
    expect(() => controllerExpr(tpl, {})).toThrow(/unknown parameter 'k'/);
  });

  test("empty resolved rows are rejected", () => {
    const tpl = { ...example1Session().controller_template };
    expect(() => controllerExpr(tpl, { num: [], den: [1] })).toThrow(/empty coefficient/);
  });

  test("slider range declarations are enforced for scalars", () => {
    const tpl = example2Session().controller_template;
    expect(() => validateParameters(tpl, { k: 99 })).toThrow(/outside declared range/);
    expect(() => validateParameters(tpl, { k: NaN })).toThrow(/finite/);
    expect(() => validateParameters(tpl, { q: 1 })).toThrow(/unknown parameter/);
    expect(() => validateParameters(tpl, { k: 1.5 })).not.toThrow();
  });
});

describe("margin requests", () => {
  test("omit the class when the session has none", () => {
    const req = marginRequest(example1Session(), { num: [0, 1], den: [1] });
    expect("class" in req).toBe(false);
    expect("resolution" in req).toBe(false);
    expect(req.plant).toEqual(example1Session().plant);
  });

  test("carry the class and resolution when set", () => {
    const doc = { ...example2Session(), resolution: 0.01 };
    const req = marginRequest(doc, { k: 1 });
    expect(req.class).toEqual({ band: [0, 1], amplitude: 1, horizon: 20, dt: 1e-3 });
    expect(req.resolution).toBe(0.01);
  });
});

describe("session history", () => {
  test("appendSnapshot never mutates the prior session", () => {
    const before = example1Session();
    Object.freeze(before);
    Object.freeze(before.history);
    const params = { num: [0, 1], den: [1] };
    const after = appendSnapshot(before, params, marginRequest(before, params), dummyReport(0.5));
    expect(before.history.length).toBe(0);
    expect(after.history.length).toBe(1);
    expect(after.controller_template.parameters).toEqual(params);
    expect(after.history[0]!.report.margin).toBe(0.5);
  });

  test("snapshots stack in order", () => {
    let doc = example1Session();
    for (const m of [0.1, 0.2, 0.3]) {
      const params = { num: [m], den: [1] };
      doc = appendSnapshot(doc, params, marginRequest(doc, params), dummyReport(m));
    }
    expect(doc.history.map((s) => s.report.margin)).toEqual([0.1, 0.2, 0.3]);
  });
});

describe("session files", () => {
  test("export then import preserves the document", () => {
    const doc = appendSnapshot(
      example2Session(),
      { k: 1 },
      marginRequest(example2Session(), { k: 1 }),
      dummyReport(0.25),
    );
    const text = exportSession(doc);
    expect(importSession(text)).toEqual(doc);
  });

  test("the shipped example session round-trips byte-identically", () => {
    const raw = readFileSync(SHIPPED, "utf-8");
    expect(exportSession(importSession(raw))).toBe(raw);
  });

  test("the shipped file records the three-controller walk", () => {
    const doc = importSession(readFileSync(SHIPPED, "utf-8"));
    expect(doc.history.length).toBe(3);
    expect(doc.history.map((s) => s.report.separated)).toEqual([false, true, true]);
    // every snapshot keeps the exact body it was computed from
    for (const snap of doc.history) {
      expect(snap.request).toEqual(marginRequest(doc, snap.parameters));
    }
  });

  test("empty sessions export with an empty history", () => {
    const doc = newSession("blank", { type: "static", kind: "relu" }, {
      num: [1],
      den: [1],
      fixed_plant: null,
      parameters: {},
      ranges: {},
    });
    const text = exportSession(doc);
    expect(text).toContain('"history": []');
    expect(importSession(text).history).toEqual([]);
  });

  test("malformed files are rejected with a reason", () => {
    expect(() => importSession("not json")).toThrow(SessionFormatError);
    expect(() => importSession('{"schema_version":"9"}')).toThrow(/schema_version/);
    expect(() => importSession('{"schema_version":"1"}')).toThrow(/missing 'title'/);
    expect(() =>
      importSession(
        '{"schema_version":"1","title":"x","plant":{},"controller_template":{"num":[],"den":[]},"history":{}}',
      ),
    ).toThrow(/'history' must be an array/);
    expect(() =>
      importSession(
        '{"schema_version":"1","title":"x","plant":{},"controller_template":{},"history":[]}',
      ),
    ).toThrow(/coefficient lists/);
    expect(() =>
      importSession(
        '{"schema_version":"1","title":"x","plant":{},"controller_template":{"num":[1],"den":[1]},"history":[{"parameters":{}}]}',
      ),
    ).toThrow(/history\[0\]/);
  });
});
