import { readFileSync } from "node:fs";

import { afterEach, beforeEach, describe, expect, test, vi } from "vitest";

import { SrgApiClient, type FetchLike } from "../src/api.js";
import { describeReport, LoopConsole, type ConsoleEvents } from "../src/console.js";
import { example1Session, example2Session } from "../src/presets.js";
import type { MarginReport, SensitivityDoc, SrgBoundDoc } from "../src/schema.js";
import { importSession, type DesignSessionDoc } from "../src/session.js";

const fixture = <T>(name: string): T =>
  JSON.parse(readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8")) as T;

const MARGIN_C2 = fixture<MarginReport>("margin-c2.json");
const SECTOR = fixture<SrgBoundDoc>("region-sector.json");
const INV_LOOP = fixture<SrgBoundDoc>("region-invloop-c2.json");

const SENSITIVITY: SensitivityDoc = {
  schema_version: "1",
  report: { ...MARGIN_C2, kind: "sensitivity", s_m: 0.5 },
  srg: SECTOR,
};

interface CallLog {
  url: string;
  body: Record<string, unknown>;
}

/** Offline backend: routes by endpoint, optionally deferring margin replies. */
function mockBackend(marginGates?: Array<(doc: MarginReport) => void>) {
  const calls: CallLog[] = [];
  const asResponse = (doc: unknown): Response =>
    ({ ok: true, status: 200, json: async () => doc }) as unknown as Response;
  const fetchFn: FetchLike = (url, init) => {
    const body = JSON.parse(String(init?.body ?? "{}")) as Record<string, unknown>;
    calls.push({ url, body });
    if (url.endsWith("/api/margin")) {
      if (marginGates) {
        return new Promise<Response>((resolve) => {
          marginGates.push((doc) => resolve(asResponse(doc)));
        });
      }
      return Promise.resolve(asResponse(MARGIN_C2));
    }
    if (url.endsWith("/api/srg")) {
      const system = body["system"] as { type: string };
      return Promise.resolve(asResponse(system.type === "scale" ? SECTOR : INV_LOOP));
    }
    if (url.endsWith("/api/sensitivity")) {
      return Promise.resolve(asResponse(SENSITIVITY));
    }
    throw new Error(`unrouted url ${url}`);
  };
  const count = (endpoint: string) => calls.filter((c) => c.url.endsWith(endpoint)).length;
  return { fetchFn, calls, count };
}

interface Recorded {
  events: ConsoleEvents;
  margins: MarginReport[];
  sessions: DesignSessionDoc[];
  svgs: string[];
  failures: string[];
  sensitivities: SensitivityDoc[];
}

function recorder(): Recorded {
  const rec: Recorded = {
    margins: [],
    sessions: [],
    svgs: [],
    failures: [],
    sensitivities: [],
    events: {
      marginUpdated: (report, session) => {
        rec.margins.push(report);
        rec.sessions.push(session);
      },
      regionsUpdated: (svg) => rec.svgs.push(svg),
      sensitivityUpdated: (doc) => rec.sensitivities.push(doc),
      requestFailed: (message) => rec.failures.push(message),
    },
  };
  return rec;
}

const settle = async (rounds = 20) => {
  for (let i = 0; i < rounds; i += 1) {
    await Promise.resolve();
  }
};

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("LoopConsole", () => {
  test("a slider drag burst triggers exactly one /api/margin call per debounce window", async () => {
    const backend = mockBackend();
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", backend.fetchFn), example1Session(), rec.events);

    for (let i = 0; i < 12; i += 1) {
      cons.editParameters({ num: [0, 1 + i / 100] });
      await vi.advanceTimersByTimeAsync(7); // edits 7 ms apart, inside one window
    }
    expect(backend.count("/api/margin")).toBe(0); // still dragging

    await vi.advanceTimersByTimeAsync(100);
    await settle();
    expect(backend.count("/api/margin")).toBe(1);

    // a second drag, a second window, a second call
    cons.editParameters({ num: [0, 2] });
    cons.editParameters({ num: [0, 3] });
    await vi.advanceTimersByTimeAsync(100);
    await settle();
    expect(backend.count("/api/margin")).toBe(2);
  });

  test("the evaluated request reflects the last edit of the burst", async () => {
    const backend = mockBackend();
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", backend.fetchFn), example1Session(), rec.events);

    cons.editParameters({ num: [1], den: [1] });
    cons.editParameters({ num: [0, 1, 1], den: [1, 1, 1] });
    cons.editParameters({ num: [0, 1], den: [1] }); // final state: C2 = s
    await vi.advanceTimersByTimeAsync(100);
    await settle();

    const marginCall = backend.calls.find((c) => c.url.endsWith("/api/margin"))!;
    expect(marginCall.body["controller"]).toEqual({
      type: "compose",
      outer: { type: "lti", num: [0, 1], den: [1] },
      inner: { type: "lti", num: [1], den: [0, 1, 1] },
    });
  });

  test("each margin response appends one history snapshot carrying its request", async () => {
    const backend = mockBackend();
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", backend.fetchFn), example1Session(), rec.events);

    cons.editParameters({ num: [0, 1] });
    await vi.advanceTimersByTimeAsync(100);
    await settle();

    expect(rec.margins).toEqual([MARGIN_C2]);
    const session = cons.currentSession;
    expect(session.history.length).toBe(1);
    expect(session.history[0]!.request.controller).toEqual({
      type: "compose",
      outer: { type: "lti", num: [0, 1], den: [1] },
      inner: { type: "lti", num: [1], den: [0, 1, 1] },
    });
    expect(session.history[0]!.report).toEqual(MARGIN_C2);
    expect(session.controller_template.parameters["num"]).toEqual([0, 1]);
  });

  test("the plant region is fetched once; the loop region follows every edit", async () => {
    const backend = mockBackend();
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", backend.fetchFn), example1Session(), rec.events);

    cons.editParameters({ num: [0, 1] });
    await vi.advanceTimersByTimeAsync(100);
    await settle();
    cons.editParameters({ num: [0, 2] });
    await vi.advanceTimersByTimeAsync(100);
    await settle();

    const srgBodies = backend.calls
      .filter((c) => c.url.endsWith("/api/srg"))
      .map((c) => (c.body["system"] as { type: string }).type);
    expect(srgBodies.filter((t) => t === "scale")).toEqual(["scale"]);
    expect(srgBodies.filter((t) => t === "inverse")).toEqual(["inverse", "inverse"]);
  });

  test("the rendered picture shows both regions and the witness", async () => {
    const backend = mockBackend();
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", backend.fetchFn), example1Session(), rec.events);

    cons.editParameters({ num: [0, 1] });
    await vi.advanceTimersByTimeAsync(100);
    await settle();

    const svg = rec.svgs[rec.svgs.length - 1]!;
    expect(svg).toContain("SRG(L^-1)");
    expect(svg).toContain("-SRG(plant)");
    expect(svg).toContain("stroke-dasharray"); // the witness segment
    expect(svg).toContain("region extends to infinity"); // inverse loop is unbounded
    expect(rec.sensitivities.length).toBe(1);
  });

  test("a superseded in-flight margin is discarded: one snapshot, from the newest edit", async () => {
    const gates: Array<(doc: MarginReport) => void> = [];
    const backend = mockBackend(gates);
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", backend.fetchFn), example1Session(), rec.events);

    cons.editParameters({ num: [0, 1] });
    await vi.advanceTimersByTimeAsync(100);
    await settle();
    expect(gates.length).toBe(1); // first margin request in flight

    cons.editParameters({ num: [0, 2] }); // supersedes while waiting
    await vi.advanceTimersByTimeAsync(100);
    await settle();

    gates[0]!({ ...MARGIN_C2, margin: -1 }); // stale answer arrives late
    await settle();
    expect(rec.margins).toEqual([]); // dropped, never applied

    gates[1]!(MARGIN_C2);
    await settle();
    expect(rec.margins).toEqual([MARGIN_C2]);
    expect(cons.currentSession.history.length).toBe(1);
    expect(cons.currentSession.history[0]!.parameters["num"]).toEqual([0, 2]);
  });

  test("API failures surface inline and leave the session untouched", async () => {
    let failOnce = true;
    const backend = mockBackend();
    const failingFetch: FetchLike = (url, init) => {
      if (url.endsWith("/api/margin") && failOnce) {
        failOnce = false;
        return Promise.resolve({
          ok: false,
          status: 422,
          json: async () => ({
            schema_version: "1",
            error: { code: "geometry", message: "pole on the imaginary axis", type: "UnboundedNyquistError" },
          }),
        } as unknown as Response);
      }
      return backend.fetchFn(url, init);
    };
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", failingFetch), example1Session(), rec.events);

    cons.editParameters({ num: [0, 1] });
    await vi.advanceTimersByTimeAsync(100);
    await settle();
    expect(rec.failures.some((m) => m.includes("geometry"))).toBe(true);
    expect(cons.currentSession.history.length).toBe(0);

    // the console still works after the failure
    cons.editParameters({ num: [0, 1] });
    await vi.advanceTimersByTimeAsync(100);
    await settle();
    expect(cons.currentSession.history.length).toBe(1);
  });

  test("out-of-range slider values never reach the API", async () => {
    const backend = mockBackend();
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", backend.fetchFn), example2Session(), rec.events);

    cons.editParameters({ k: 99 });
    await vi.advanceTimersByTimeAsync(500);
    await settle();
    expect(backend.calls.length).toBe(0);
    expect(rec.failures[0]).toContain("outside declared range");
  });

  test("loading a session re-renders from stored responses without any request", async () => {
    const backend = mockBackend();
    const rec = recorder();
    const cons = new LoopConsole(new SrgApiClient("", backend.fetchFn), example1Session(), rec.events);

    const shipped = importSession(
      readFileSync(new URL("../sessions/example1.json", import.meta.url), "utf-8"),
    );
    cons.loadSession(shipped);
    await settle();

    expect(backend.calls.length).toBe(0);
    expect(rec.margins.length).toBe(1);
    expect(rec.margins[0]!.margin).toBe(0.8731387997131318);
    expect(cons.currentSession).toBe(shipped);
  });
});

describe("describeReport", () => {
  test("separation failure reads as a red-flag verdict", () => {
    const summary = describeReport({ ...MARGIN_C2, separated: false });
    expect(summary.verdict).toBe("not separated");
    expect(summary.lines[0]).toContain("may be unstable");
  });

  test("a certified margin reports r_m, the gain bound and s_m", () => {
    const summary = describeReport(MARGIN_C2, 0.5);
    expect(summary.verdict).toBe("separated");
    expect(summary.lines[0]).toContain("r_m = 0.873139");
    expect(summary.lines[1]).toContain("1.14529");
    expect(summary.lines[2]).toContain("s_m = 0.5");
  });

  test("an infinite bound prints as unbounded", () => {
    const summary = describeReport({ ...MARGIN_C2, bound: "inf" });
    expect(summary.lines[1]).toContain("unbounded");
  });
});
