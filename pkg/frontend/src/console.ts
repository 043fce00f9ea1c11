/**
 * Console controller. Holds the design session, debounces slider edits,
 * and keeps one request channel per panel so a drag burst costs exactly
 * one margin evaluation and stale answers never reach the screen.
 *
 * All numbers shown come from API responses. The controller re-renders
 * the inverse-loop SRG against the negated plant SRG (the negation is
 * requested from the server as scale(-1, plant); nothing is mirrored
 * client-side), the witness segment, r_m, the gain bound, and s_m.
 */

import { PanelChannel, SrgApiClient } from "./api.js";
import { debounce, SLIDER_DEBOUNCE_MS, type Debounced } from "./debounce.js";
import { renderRegions } from "./render.js";
import type {
  MarginReport,
  MarginRequest,
  SensitivityDoc,
  SensitivityRequest,
  SrgBoundDoc,
  SrgRequest,
  SystemExpr,
} from "./schema.js";
import {
  appendSnapshot,
  marginRequest,
  validateParameters,
  type DesignSessionDoc,
  type Parameters,
} from "./session.js";

export interface ConsoleEvents {
  /** New combined region picture (inverse loop, negated plant, witness). */
  regionsUpdated(svg: string): void;
  /** Margin report applied and a history snapshot appended. */
  marginUpdated(report: MarginReport, session: DesignSessionDoc): void;
  sensitivityUpdated(doc: SensitivityDoc): void;
  /** Request or validation failure; session state is unchanged. */
  requestFailed(message: string): void;
}

export interface ReportSummary {
  verdict: "separated" | "not separated";
  lines: string[];
}

export function describeReport(report: MarginReport, sm?: number): ReportSummary {
  if (!report.separated) {
    return {
      verdict: "not separated",
      lines: ["no certificate: the regions touch; the closed loop may be unstable"],
    };
  }
  const bound = report.bound === "inf" ? "unbounded" : formatNumber(report.bound);
  const lines = [
    `r_m = ${formatNumber(report.margin)} (error bar ${formatNumber(report.error_bar)})`,
    `incremental gain bound r -> u: ${bound}`,
  ];
  if (sm !== undefined) {
    lines.push(`s_m = ${formatNumber(sm)}`);
  }
  return { verdict: "separated", lines };
}

function formatNumber(x: number): string {
  return Number(x.toPrecision(6)).toString();
}

export class LoopConsole {
  private session: DesignSessionDoc;
  /** Live slider state; folded into the session when a margin lands. */
  private draft: Parameters;
  private lastReport: MarginReport | null = null;
  private invLoopRegion: SrgBoundDoc | null = null;
  private negPlantRegion: SrgBoundDoc | null = null;
  private readonly marginPanel: PanelChannel<MarginRequest, MarginReport>;
  private readonly regionPanel: PanelChannel<SrgRequest, SrgBoundDoc>;
  private readonly plantPanel: PanelChannel<SrgRequest, SrgBoundDoc>;
  private readonly sensitivityPanel: PanelChannel<SensitivityRequest, SensitivityDoc>;
  private readonly editSettled: Debounced<[]>;

  constructor(
    private readonly client: SrgApiClient,
    session: DesignSessionDoc,
    private readonly events: ConsoleEvents,
    debounceMs: number = SLIDER_DEBOUNCE_MS,
  ) {
    this.session = session;
    this.draft = { ...session.controller_template.parameters };
    const fail = (err: unknown) => this.events.requestFailed(messageOf(err));
    this.marginPanel = new PanelChannel(
      (req) => this.client.margin(req),
      (res, req) => this.applyMargin(res, req),
      fail,
    );
    this.regionPanel = new PanelChannel(
      (req) => this.client.srg(req),
      (res) => {
        this.invLoopRegion = res;
        this.redraw();
      },
      fail,
    );
    this.plantPanel = new PanelChannel(
      (req) => this.client.srg(req),
      (res) => {
        this.negPlantRegion = res;
        this.redraw();
      },
      fail,
    );
    this.sensitivityPanel = new PanelChannel(
      (req) => this.client.sensitivity(req),
      (res) => this.events.sensitivityUpdated(res),
      fail,
    );
    this.editSettled = debounce(() => this.evaluate(), debounceMs);
  }

  get currentSession(): DesignSessionDoc {
    return this.session;
  }

  get currentParameters(): Parameters {
    return { ...this.draft };
  }

  /**
   * Record a slider edit. Values are validated against the declared
   * ranges immediately; the API round trip waits out the debounce window.
   */
  editParameters(updates: Parameters): void {
    try {
      validateParameters(this.session.controller_template, updates);
    } catch (err) {
      this.events.requestFailed(messageOf(err));
      return;
    }
    this.draft = { ...this.draft, ...updates };
    this.editSettled();
  }

  /** Evaluate the current draft now, skipping the debounce window. */
  evaluateNow(): void {
    this.editSettled.cancel();
    this.evaluate();
  }

  /** Replace the session (import) and re-render from its stored responses. */
  loadSession(session: DesignSessionDoc): void {
    this.editSettled.cancel();
    this.session = session;
    this.draft = { ...session.controller_template.parameters };
    this.invLoopRegion = null;
    this.negPlantRegion = null;
    const last = session.history[session.history.length - 1];
    if (last) {
      this.lastReport = last.report;
      this.events.marginUpdated(last.report, this.session);
      this.redraw();
    }
  }

  private evaluate(): void {
    const params = { ...this.draft };
    const body = marginRequest(this.session, params);
    this.marginPanel.submit(body);
    const inv: SystemExpr = { type: "inverse", child: body.controller };
    this.regionPanel.submit(this.srgRequest(inv));
    if (this.negPlantRegion === null) {
      // the plant never moves with the sliders; one request fills the layer
      const neg: SystemExpr = { type: "scale", alpha: [-1, 0], child: this.session.plant };
      this.plantPanel.submit(this.srgRequest(neg));
    }
    this.sensitivityPanel.submit({ ...body });
  }

  private srgRequest(system: SystemExpr): SrgRequest {
    const req: SrgRequest = { system };
    if (this.session.signal_class !== null) {
      req.class = this.session.signal_class;
    }
    if (this.session.resolution !== null) {
      req.resolution = this.session.resolution;
    }
    return req;
  }

  private applyMargin(report: MarginReport, req: MarginRequest): void {
    this.lastReport = report;
    this.session = appendSnapshot(this.session, { ...this.draft }, req, report);
    this.events.marginUpdated(report, this.session);
    this.redraw();
  }

  private redraw(): void {
    const layers = [];
    if (this.invLoopRegion) {
      layers.push({
        region: this.invLoopRegion,
        label: "SRG(L^-1)",
        color: "#2b6fb3",
      });
    }
    if (this.negPlantRegion) {
      layers.push({
        region: this.negPlantRegion,
        label: "-SRG(plant)",
        color: "#c0392b",
      });
    }
    if (layers.length === 0) {
      return;
    }
    const witness = this.lastReport?.witness ?? null;
    this.events.regionsUpdated(
      renderRegions({
        layers,
        witness,
        witnessDistance: witness ? this.lastReport?.margin : undefined,
        title: this.session.title,
      }),
    );
  }
}

function messageOf(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
