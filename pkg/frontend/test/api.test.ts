import { describe, expect, test } from "vitest";

import { ApiError, PanelChannel, SrgApiClient } from "../src/api.js";

interface Deferred<T> {
  promise: Promise<T>;
  resolve: (v: T) => void;
  reject: (e: unknown) => void;
}

function deferred<T>(): Deferred<T> {
  let resolve!: (v: T) => void;
  let reject!: (e: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

const tick = () => new Promise<void>((r) => setTimeout(r, 0));

describe("PanelChannel", () => {
  test("keeps at most one request in flight", async () => {
    let active = 0;
    let peak = 0;
    const gates: Deferred<number>[] = [];
    const applied: number[] = [];
    const chan = new PanelChannel<number, number>(
      (req) => {
        active += 1;
        peak = Math.max(peak, active);
        const gate = deferred<number>();
        gates.push(gate);
        return gate.promise.finally(() => {
          active -= 1;
        });
      },
      (res) => applied.push(res),
    );
    chan.submit(1);
    chan.submit(2);
    chan.submit(3);
    await tick();
    expect(peak).toBe(1);
    expect(gates.length).toBe(1);
    gates[0]!.resolve(10);
    await tick();
    // the queue kept only the newest pending request
    expect(gates.length).toBe(2);
    gates[1]!.resolve(30);
    await tick();
    expect(peak).toBe(1);
    expect(applied).toEqual([30]);
  });

  test("discards a response that was superseded while in flight", async () => {
    const gates: Deferred<string>[] = [];
    const applied: string[] = [];
    const chan = new PanelChannel<string, string>(
      () => {
        const gate = deferred<string>();
        gates.push(gate);
        return gate.promise;
      },
      (res) => applied.push(res),
    );
    chan.submit("old");
    await tick();
    chan.submit("new"); // supersedes while "old" is in flight
    gates[0]!.resolve("old-answer");
    await tick();
    expect(applied).toEqual([]); // stale payload dropped
    gates[1]!.resolve("new-answer");
    await tick();
    expect(applied).toEqual(["new-answer"]);
  });

  test("applies every response when submits do not overlap", async () => {
    const applied: number[] = [];
    const chan = new PanelChannel<number, number>(
      (req) => Promise.resolve(req * 2),
      (res) => applied.push(res),
    );
    chan.submit(1);
    await tick();
    chan.submit(2);
    await tick();
    expect(applied).toEqual([2, 4]);
  });

  test("failures reach the fail handler unless superseded", async () => {
    const failures: string[] = [];
    const gates: Deferred<number>[] = [];
    const chan = new PanelChannel<string, number>(
      () => {
        const gate = deferred<number>();
        gates.push(gate);
        return gate.promise;
      },
      () => {},
      (err) => failures.push(String(err)),
    );
    chan.submit("a");
    await tick();
    gates[0]!.reject(new Error("boom"));
    await tick();
    expect(failures).toEqual(["Error: boom"]);
    chan.submit("b");
    await tick();
    chan.submit("c");
    gates[1]!.reject(new Error("stale failure"));
    await tick();
    expect(failures).toEqual(["Error: boom"]); // superseded failure stays silent
    gates[2]!.resolve(1);
  });
});

describe("SrgApiClient", () => {
  const jsonResponse = (status: number, body: unknown) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });

  test("posts JSON and returns the parsed document", async () => {
    const seen: { url: string; body: unknown }[] = [];
    const client = new SrgApiClient("http://x", async (url, init) => {
      seen.push({ url, body: JSON.parse(String(init?.body)) });
      return jsonResponse(200, { schema_version: "1", margin: 0.5 });
    });
    const doc = await client.margin({
      controller: { type: "lti", num: [1], den: [1] },
      plant: { type: "static", kind: "saturation", limit: 1 },
    });
    expect(doc.margin).toBe(0.5);
    expect(seen[0]!.url).toBe("http://x/api/margin");
    expect((seen[0]!.body as { controller: { type: string } }).controller.type).toBe("lti");
  });

  test("maps validation failures to ApiError with the server's code", async () => {
    const client = new SrgApiClient("", async () =>
      jsonResponse(400, {
        schema_version: "1",
        error: { code: "validation", message: "missing required field: plant", type: "ValueError" },
      }),
    );
    const err = await client
      .srg({ system: { type: "lti", num: [1], den: [1] } })
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(400);
    expect((err as ApiError).message).toContain("validation");
    expect((err as ApiError).message).toContain("plant");
  });

  test("survives an error body that is not JSON", async () => {
    const client = new SrgApiClient("", async () => new Response("gateway woe", { status: 502 }));
    const err = await client
      .sample({ system: { type: "lti", num: [1], den: [1] } })
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).doc).toBeNull();
    expect((err as ApiError).message).toBe("HTTP 502");
  });
});
