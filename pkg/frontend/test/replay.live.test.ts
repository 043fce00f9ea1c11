/**
 * End-to-end acceptance: spawn the real backend, replay the shipped
 * example session file, and require the recorded walk to reproduce
 * against live /api/margin responses and the committed CLI outputs.
 */
import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";

import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { SrgApiClient } from "../src/api.js";
import { LoopConsole } from "../src/console.js";
import { example1Session } from "../src/presets.js";
import { replaySession } from "../src/replay.js";
import { boundAsNumber, type MarginReport, type SrgBoundDoc } from "../src/schema.js";
import { importSession } from "../src/session.js";

const PORT = 8934;
const BASE = `http://127.0.0.1:${PORT}`;
const TOL = 1e-6;

const fixture = <T>(name: string): T =>
  JSON.parse(readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8")) as T;

let server: ChildProcess;
const client = new SrgApiClient(BASE);

beforeAll(async () => {
  server = spawn("srgtools", ["serve", "--port", String(PORT)], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  let stderr = "";
  server.stderr?.on("data", (chunk: Buffer) => {
    stderr += chunk.toString();
  });
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const health = await client.health();
      if (health.status === "ok") {
        return;
      }
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      throw new Error(`backend did not come up on ${BASE}: ${stderr}`);
    }
    await new Promise((r) => setTimeout(r, 250));
  }
}, 40_000);

afterAll(() => {
  server?.kill();
});

describe("shipped example session against the live backend", () => {
  test("replay reproduces the three verdicts with margins equal to CLI output", async () => {
    const doc = importSession(
      readFileSync(new URL("../sessions/example1.json", import.meta.url), "utf-8"),
    );
    const outcome = await replaySession(client, doc, TOL);
    expect(outcome.reproduced).toBe(true);
    expect(outcome.snapshots.length).toBe(3);

    // verdict walk: unstable -> stable -> stable with the tight gain bound
    const fresh = outcome.snapshots.map((s) => s.fresh);
    expect(fresh.map((r) => r.separated)).toEqual([false, true, true]);
    expect(fresh[0]!.bound).toBe("inf");
    expect(fresh[0]!.margin).toBe(0);
    // an unseparated loop witnesses the contact: both endpoints coincide
    const touch = fresh[0]!.witness;
    if (touch !== null) {
      expect(Math.hypot(touch[0][0] - touch[1][0], touch[0][1] - touch[1][1])).toBe(0);
    }

    const cli = [
      fixture<MarginReport>("margin-c0.json"),
      fixture<MarginReport>("margin-c1.json"),
      fixture<MarginReport>("margin-c2.json"),
    ];
    for (const [i, snap] of outcome.snapshots.entries()) {
      const want = cli[i]!;
      expect(Math.abs(snap.fresh.margin - want.margin)).toBeLessThanOrEqual(TOL);
      expect(Math.abs(snap.stored.margin - want.margin)).toBeLessThanOrEqual(TOL);
      const freshBound = boundAsNumber(snap.fresh.bound);
      const wantBound = boundAsNumber(want.bound);
      if (Number.isFinite(wantBound)) {
        expect(Math.abs(freshBound - wantBound)).toBeLessThanOrEqual(TOL);
      } else {
        expect(freshBound).toBe(Infinity);
      }
      expect(snap.fresh.separated).toBe(want.separated);
    }

    // the final design certifies the tight incremental gain bound 8/7
    const last = fresh[2]!;
    expect(Math.abs(boundAsNumber(last.bound) - 8 / 7)).toBeLessThanOrEqual(0.02 * (8 / 7));
  }, 60_000);

  test("a fresh console walk over live responses re-records the same history", async () => {
    let session = example1Session();
    let landed: ((r: MarginReport) => void) | null = null;
    const svgs: string[] = [];
    const cons = new LoopConsole(
      client,
      session,
      {
        regionsUpdated: (svg) => svgs.push(svg),
        sensitivityUpdated: () => {},
        marginUpdated: (report, updated) => {
          session = updated;
          landed?.(report);
          landed = null;
        },
        requestFailed: (message) => {
          throw new Error(`request failed: ${message}`);
        },
      },
      1,
    );

    const walk: Array<Record<string, number[]>> = [
      { num: [1], den: [1] },
      { num: [0, 1, 1], den: [1, 1, 1] },
      { num: [0, 1], den: [1] },
    ];
    const reports: MarginReport[] = [];
    for (const params of walk) {
      const wait = new Promise<MarginReport>((resolve) => {
        landed = resolve;
      });
      cons.editParameters(params);
      cons.evaluateNow();
      reports.push(await wait);
    }

    const shipped = importSession(
      readFileSync(new URL("../sessions/example1.json", import.meta.url), "utf-8"),
    );
    expect(session.history.length).toBe(3);
    for (const [i, snap] of session.history.entries()) {
      const want = shipped.history[i]!;
      expect(snap.request).toEqual(want.request);
      expect(Math.abs(snap.report.margin - want.report.margin)).toBeLessThanOrEqual(TOL);
      expect(snap.report.separated).toBe(want.report.separated);
    }
    expect(reports[2]!.witness).not.toBeNull();
  }, 120_000);

  test("live inverse-loop region equals the committed CLI bound document", async () => {
    const live = await client.srg({
      system: {
        type: "inverse",
        child: {
          type: "compose",
          outer: { type: "lti", num: [0, 1], den: [1] },
          inner: { type: "lti", num: [1], den: [0, 1, 1] },
        },
      },
    });
    expect(live).toEqual(fixture<SrgBoundDoc>("region-invloop-c2.json"));
    expect(live.contains_infinity).toBe(true);
    expect(live.primitives.map((p) => p.kind)).toEqual(["segment", "segment"]);
  }, 60_000);
});
