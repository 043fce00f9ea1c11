/**
 * Session replay: re-issue every stored /api/margin request body verbatim
 * and compare the fresh reports with the recorded ones. A session file is
 * healthy when each snapshot reproduces its margin to the stated tolerance.
 */

import type { SrgApiClient } from "./api.js";
import { boundAsNumber, type MarginReport } from "./schema.js";
import type { DesignSessionDoc, Parameters } from "./session.js";

export interface SnapshotReplay {
  index: number;
  parameters: Parameters;
  stored: MarginReport;
  fresh: MarginReport;
  marginDrift: number;
  boundDrift: number;
  verdictAgrees: boolean;
}

export interface ReplayOutcome {
  snapshots: SnapshotReplay[];
  reproduced: boolean;
  tolerance: number;
}

function boundDrift(a: MarginReport, b: MarginReport): number {
  const ba = boundAsNumber(a.bound);
  const bb = boundAsNumber(b.bound);
  if (!Number.isFinite(ba) || !Number.isFinite(bb)) {
    return ba === bb ? 0 : Infinity;
  }
  return Math.abs(ba - bb);
}

export async function replaySession(
  client: SrgApiClient,
  doc: DesignSessionDoc,
  tolerance = 1e-6,
): Promise<ReplayOutcome> {
  const snapshots: SnapshotReplay[] = [];
  for (const [index, snap] of doc.history.entries()) {
    const fresh = await client.margin(snap.request);
    snapshots.push({
      index,
      parameters: snap.parameters,
      stored: snap.report,
      fresh,
      marginDrift: Math.abs(fresh.margin - snap.report.margin),
      boundDrift: boundDrift(fresh, snap.report),
      verdictAgrees: fresh.separated === snap.report.separated,
    });
  }
  const reproduced = snapshots.every(
    (s) => s.verdictAgrees && s.marginDrift <= tolerance && s.boundDrift <= tolerance,
  );
  return { snapshots, reproduced, tolerance };
}
