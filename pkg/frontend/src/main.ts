/**
 * Browser entry point. Builds the console UI, wires sliders and preset
 * buttons to the controller, and handles session files. Start the backend
 * with `srgtools serve --port 8000` and open index.html from any static
 * file server on the same origin (or set ?api=http://127.0.0.1:8000).
 */

import { SrgApiClient } from "./api.js";
import { describeReport, LoopConsole } from "./console.js";
import { CONTROLLER_PRESETS, example1Session, example2Session } from "./presets.js";
import type { MarginReport, SensitivityDoc } from "./schema.js";
import { exportSession, importSession, type DesignSessionDoc } from "./session.js";

class ConsoleApp {
  private readonly root: HTMLElement;
  private console_: LoopConsole;
  private session: DesignSessionDoc;

  constructor(root: HTMLElement, private readonly client: SrgApiClient) {
    this.root = root;
    this.session = example1Session();
    this.root.innerHTML = this.template();
    this.console_ = this.makeConsole(this.session);
    this.wire();
  }

  private template(): string {
    return `
      <header class="bar">
        <h1>SRG loop-shaping console</h1>
        <span id="status" class="status"></span>
        <span class="spacer"></span>
        <select id="preset-session">
          <option value="example1">lag + saturation walk</option>
          <option value="example2">bandlimited k-slider</option>
        </select>
        <button id="import">import session</button>
        <button id="export">export session</button>
        <input id="import-file" type="file" accept="application/json" hidden>
      </header>
      <main class="columns">
        <section class="panel">
          <div id="regions" class="plot">
            <p class="hint">edit a parameter to evaluate the loop</p>
          </div>
          <div id="verdict" class="verdict"></div>
          <div id="sensitivity" class="readout"></div>
        </section>
        <section class="panel">
          <h2>controller parameters</h2>
          <div id="params"></div>
          <div id="presets" class="presets"></div>
          <h2>history</h2>
          <ol id="history" class="history"></ol>
        </section>
      </main>`;
  }

  private makeConsole(session: DesignSessionDoc): LoopConsole {
    return new LoopConsole(this.client, session, {
      regionsUpdated: (svg) => {
        this.byId("regions").innerHTML = svg;
      },
      marginUpdated: (report, updated) => {
        this.session = updated;
        this.showReport(report);
        this.showHistory();
      },
      sensitivityUpdated: (doc: SensitivityDoc) => {
        const sm = doc.report.s_m ?? doc.report.margin;
        this.byId("sensitivity").textContent = `s_m = ${sm.toPrecision(6)}`;
      },
      requestFailed: (message) => {
        this.setStatus(message, true);
      },
    });
  }

  private wire(): void {
    this.renderParamEditors();
    this.renderPresetButtons();
    this.byId("export").addEventListener("click", () => this.download());
    this.byId("import").addEventListener("click", () => this.byId("import-file").click());
    this.byId<HTMLInputElement>("import-file").addEventListener("change", (ev) => {
      const file = (ev.target as HTMLInputElement).files?.[0];
      if (file) {
        void this.importFile(file);
      }
    });
    this.byId<HTMLSelectElement>("preset-session").addEventListener("change", (ev) => {
      const choice = (ev.target as HTMLSelectElement).value;
      this.reset(choice === "example2" ? example2Session() : example1Session());
    });
  }

  private renderParamEditors(): void {
    const host = this.byId("params");
    host.innerHTML = "";
    const tpl = this.session.controller_template;
    for (const [name, value] of Object.entries(this.console_.currentParameters)) {
      const row = document.createElement("div");
      row.className = "param-row";
      if (typeof value === "number") {
        const [lo, hi] = tpl.ranges[name] ?? [value / 10 || 0, value * 10 || 1];
        row.innerHTML = `
          <label>${name}</label>
          <input type="range" min="${lo}" max="${hi}" step="${(hi - lo) / 200}" value="${value}">
          <output>${value}</output>`;
        const slider = row.querySelector("input") as HTMLInputElement;
        const out = row.querySelector("output") as HTMLOutputElement;
        slider.addEventListener("input", () => {
          out.textContent = slider.value;
          this.console_.editParameters({ [name]: Number(slider.value) });
        });
      } else {
        row.innerHTML = `
          <label>${name} (ascending powers of s)</label>
          <input type="text" value="${value.join(", ")}">`;
        const box = row.querySelector("input") as HTMLInputElement;
        box.addEventListener("change", () => {
          const coeffs = box.value.split(",").map((t) => Number(t.trim()));
          if (coeffs.some((c) => !Number.isFinite(c))) {
            this.setStatus(`${name}: coefficients must be numbers`, true);
            return;
          }
          this.console_.editParameters({ [name]: coeffs });
        });
      }
      host.appendChild(row);
    }
  }

  private renderPresetButtons(): void {
    const host = this.byId("presets");
    host.innerHTML = "";
    const tpl = this.session.controller_template;
    if (!Array.isArray(tpl.parameters["num"])) {
      return; // presets only make sense for the coefficient-walk template
    }
    for (const [label, params] of Object.entries(CONTROLLER_PRESETS)) {
      const btn = document.createElement("button");
      btn.textContent = label;
      btn.addEventListener("click", () => {
        this.console_.editParameters(params);
        this.console_.evaluateNow();
        this.renderParamEditors();
      });
      host.appendChild(btn);
    }
  }

  private showReport(report: MarginReport): void {
    const summary = describeReport(report);
    const el = this.byId("verdict");
    el.className = `verdict ${report.separated ? "ok" : "bad"}`;
    el.innerHTML = `<strong>${summary.verdict}</strong><br>${summary.lines.join("<br>")}`;
    this.setStatus("");
  }

  private showHistory(): void {
    const host = this.byId("history");
    host.innerHTML = "";
    for (const snap of this.session.history) {
      const li = document.createElement("li");
      const r = snap.report;
      const head = r.separated ? `r_m = ${r.margin.toPrecision(6)}` : "not separated";
      li.textContent = `${head} @ ${JSON.stringify(snap.parameters)}`;
      host.appendChild(li);
    }
  }

  private download(): void {
    const blob = new Blob([exportSession(this.session)], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "srg-session.json";
    a.click();
    URL.revokeObjectURL(a.href);
  }

  private async importFile(file: File): Promise<void> {
    try {
      const doc = importSession(await file.text());
      this.reset(doc);
      this.setStatus(`imported '${doc.title}' (${doc.history.length} snapshots)`);
    } catch (err) {
      this.setStatus(err instanceof Error ? err.message : String(err), true);
    }
  }

  private reset(session: DesignSessionDoc): void {
    this.session = session;
    this.console_ = this.makeConsole(session);
    this.console_.loadSession(session);
    this.renderParamEditors();
    this.renderPresetButtons();
    this.showHistory();
  }

  private setStatus(message: string, isError = false): void {
    const el = this.byId("status");
    el.textContent = message;
    el.className = `status${isError ? " error" : ""}`;
  }

  private byId<T extends HTMLElement = HTMLElement>(id: string): T {
    return this.root.querySelector(`#${id}`) as T;
  }
}

const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
const rootEl = document.getElementById("app");
if (rootEl) {
  new ConsoleApp(rootEl, new SrgApiClient(apiBase));
}
