/**
 * Region JSON to SVG. A pure function of the documents passed in: the
 * console never computes geometry, it only draws what the API certified.
 * World coordinates sit in one matrix() group (real axis right, imaginary
 * up), so every primitive is emitted in natural units.
 *
 * Two primitives arrive in non-cartesian charts and are mapped pointwise
 * for display only: log-polar envelopes through exp, hyperbolic polygons
 * through the Klein-to-half-plane chart (edges drawn straight, a visual
 * approximation; certified distances always come from the API).
 */

import type { Complex, Primitive, RegionDoc, SectorEnvelopePrim } from "./schema.js";

export const CANVAS_W = 640;
export const CANVAS_H = 480;
const MARGIN_PX = 40;
const POLY_CAP = 2048;
const CLOUD_CAP = 4096;

export interface RegionLayer {
  region: RegionDoc;
  label: string;
  color: string;
}

export interface RenderInput {
  layers: RegionLayer[];
  witness?: [Complex, Complex] | null;
  witnessDistance?: number;
  title?: string;
}

/** Trim trailing zeros from a 6-significant-digit rendering. */
function fmt(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error("non-finite coordinate reached the renderer");
  }
  if (x === 0) {
    return "0";
  }
  const s = x.toPrecision(6);
  return s.includes(".") && !s.includes("e")
    ? s.replace(/\.?0+$/, "")
    : String(Number(s));
}

// ---------------------------------------------------------------------------
// View fitting
// ---------------------------------------------------------------------------

interface View {
  s: number;
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

function pushExtent(prim: Primitive, pts: Complex[]): void {
  switch (prim.kind) {
    case "disc":
      pts.push(
        [prim.center[0] - prim.radius, prim.center[1] - prim.radius],
        [prim.center[0] + prim.radius, prim.center[1] + prim.radius],
      );
      break;
    case "segment":
      pts.push(prim.a, prim.b);
      break;
    case "convex_polygon":
      for (const v of prim.vertices) {
        pts.push(v);
      }
      break;
    case "half_plane_re":
      // Unbounded; anchor the boundary line and let other layers set scale.
      pts.push([prim.c, -1], [prim.c, 1]);
      break;
    case "point_set":
      for (const p of decimate(prim.points, CLOUD_CAP)) {
        pts.push(p);
      }
      break;
    case "log_polar_box": {
      const r = Math.exp(prim.rho_hi);
      pts.push([-r, -r], [r, r]);
      break;
    }
    case "sector_envelope": {
      for (const poly of sectorOutlines(prim)) {
        for (const p of poly) {
          pts.push(p);
        }
      }
      break;
    }
    case "h_polygon":
      for (const p of hPolygonChain(prim.klein_vertices)) {
        pts.push(p);
      }
      break;
  }
}

function viewFor(input: RenderInput): View {
  const pts: Complex[] = [[-1, -1], [1, 1]]; // unit markers always visible
  for (const layer of input.layers) {
    for (const prim of layer.region.primitives) {
      pushExtent(prim, pts);
    }
  }
  if (input.witness) {
    pts.push(input.witness[0], input.witness[1]);
  }
  let x0 = Infinity;
  let x1 = -Infinity;
  let y0 = Infinity;
  let y1 = -Infinity;
  for (const [re, im] of pts) {
    if (!Number.isFinite(re) || !Number.isFinite(im)) {
      continue;
    }
    x0 = Math.min(x0, re);
    x1 = Math.max(x1, re);
    y0 = Math.min(y0, im);
    y1 = Math.max(y1, im);
  }
  const padX = 0.05 * (x1 - x0) + 0.05;
  const padY = 0.05 * (y1 - y0) + 0.05;
  x0 -= padX;
  x1 += padX;
  y0 -= padY;
  y1 += padY;
  const s = Math.min(
    (CANVAS_W - 2 * MARGIN_PX) / (x1 - x0),
    (CANVAS_H - 2 * MARGIN_PX) / (y1 - y0),
  );
  return { s, x0, x1, y0, y1 };
}

// ---------------------------------------------------------------------------
// Chart transforms (display only)
// ---------------------------------------------------------------------------

function decimate(points: Complex[], cap: number = POLY_CAP): Complex[] {
  if (points.length <= cap) {
    return points;
  }
  const step = Math.ceil(points.length / cap);
  const out: Complex[] = [];
  for (let i = 0; i < points.length; i += step) {
    out.push(points[i] as Complex);
  }
  const tail = points[points.length - 1] as Complex;
  const last = out[out.length - 1] as Complex;
  if (last[0] !== tail[0] || last[1] !== tail[1]) {
    out.push(tail);
  }
  return out;
}

/** Contiguous finite bins of an envelope, merged across the -pi/pi seam. */
function sectorOutlines(p: SectorEnvelopePrim): Complex[][] {
  const h = (2 * Math.PI) / p.n;
  const finite: number[] = [];
  for (let i = 0; i < p.n; i += 1) {
    const lo = p.rho_lo[i];
    const hi = p.rho_hi[i];
    if (lo !== null && lo !== undefined && hi !== null && hi !== undefined && hi >= lo) {
      finite.push(i);
    }
  }
  if (finite.length === 0) {
    return [];
  }
  const runs: number[][] = [[finite[0] as number]];
  for (let j = 1; j < finite.length; j += 1) {
    const idx = finite[j] as number;
    if (idx === (finite[j - 1] as number) + 1) {
      (runs[runs.length - 1] as number[]).push(idx);
    } else {
      runs.push([idx]);
    }
  }
  if (runs.length > 1 && finite[0] === 0 && finite[finite.length - 1] === p.n - 1) {
    const wrap = runs.pop() as number[];
    runs[0] = [...wrap.map((i) => i - p.n), ...(runs[0] as number[])];
  }
  const polys: Complex[][] = [];
  for (const run of runs) {
    const outer: Complex[] = [];
    const inner: Complex[] = [];
    for (const raw of run) {
      const i = ((raw % p.n) + p.n) % p.n;
      const ang = -Math.PI + (i + 0.5) * h + (raw < 0 ? -2 * Math.PI : 0);
      const rLo = Math.exp(p.rho_lo[i] as number);
      const rHi = Math.exp(p.rho_hi[i] as number);
      outer.push([rHi * Math.cos(ang), rHi * Math.sin(ang)]);
      inner.push([rLo * Math.cos(ang), rLo * Math.sin(ang)]);
    }
    polys.push([...decimate(outer), ...decimate(inner).reverse()]);
  }
  return polys;
}

/** Klein vertex to its point in the plane; |k| = 1 maps toward the real axis. */
function kleinToPlane(k: [number, number]): Complex | null {
  const mag2 = Math.min(k[0] * k[0] + k[1] * k[1], 1);
  const d = 1 + Math.sqrt(Math.max(0, 1 - mag2));
  const wRe = k[0] / d;
  const wIm = k[1] / d;
  // z = i (1 + w) / (1 - w)
  const aRe = 1 + wRe;
  const aIm = wIm;
  const bRe = 1 - wRe;
  const bIm = -wIm;
  const den = bRe * bRe + bIm * bIm;
  if (den < 1e-24) {
    return null; // the vertex at infinity; footnote covers it
  }
  const qRe = (aRe * bRe + aIm * bIm) / den;
  const qIm = (aIm * bRe - aRe * bIm) / den;
  return [-qIm, qRe];
}

/** Upper-half vertices plus their conjugate mirror, as one closed chain. */
function hPolygonChain(kleinVertices: [number, number][]): Complex[] {
  const upper: Complex[] = [];
  for (const k of kleinVertices) {
    const z = kleinToPlane(k);
    if (z !== null) {
      upper.push(z);
    }
  }
  const lower = upper
    .map(([re, im]): Complex => [re, -im])
    .reverse();
  return [...upper, ...lower];
}

// ---------------------------------------------------------------------------
// Primitive emission
// ---------------------------------------------------------------------------

function polyAttr(pts: Complex[]): string {
  return pts.map(([re, im]) => `${fmt(re)},${fmt(im)}`).join(" ");
}

function primitiveSvg(prim: Primitive, view: View, out: string[]): void {
  const hair = 1.5 / view.s;
  switch (prim.kind) {
    case "disc":
      out.push(
        `<circle cx="${fmt(prim.center[0])}" cy="${fmt(prim.center[1])}" ` +
          `r="${fmt(prim.radius)}" stroke-width="${fmt(hair)}"/>`,
      );
      break;
    case "segment":
      out.push(
        `<line x1="${fmt(prim.a[0])}" y1="${fmt(prim.a[1])}" ` +
          `x2="${fmt(prim.b[0])}" y2="${fmt(prim.b[1])}" stroke-width="${fmt(hair)}"/>`,
      );
      break;
    case "convex_polygon":
      out.push(
        `<polygon points="${polyAttr(decimate(prim.vertices))}" stroke-width="${fmt(hair)}"/>`,
      );
      break;
    case "half_plane_re": {
      const xa = prim.side === ">=" ? prim.c : view.x0 - 1;
      const xb = prim.side === ">=" ? view.x1 + 1 : prim.c;
      out.push(
        `<rect x="${fmt(xa)}" y="${fmt(view.y0 - 1)}" width="${fmt(xb - xa)}" ` +
          `height="${fmt(view.y1 - view.y0 + 2)}" stroke-width="${fmt(hair)}"/>`,
      );
      break;
    }
    case "point_set": {
      const pts = decimate(prim.points, CLOUD_CAP);
      if (pts.length === 1) {
        const p = pts[0] as Complex;
        const r = Math.max(prim.dilation, 2 / view.s);
        out.push(
          `<circle cx="${fmt(p[0])}" cy="${fmt(p[1])}" r="${fmt(r)}" ` +
            `stroke-width="${fmt(hair)}"/>`,
        );
      } else {
        const d = "M " + pts.map(([re, im]) => `${fmt(re)} ${fmt(im)}`).join(" L ");
        const width = Math.max(2 * prim.dilation, hair);
        out.push(
          `<path d="${d}" fill="none" stroke-width="${fmt(width)}" ` +
            `stroke-linecap="round" stroke-linejoin="round"/>`,
        );
      }
      break;
    }
    case "log_polar_box": {
      const outer: Complex[] = [];
      const inner: Complex[] = [];
      for (let i = 0; i < 64; i += 1) {
        const th = prim.theta_lo + (i / 63) * (prim.theta_hi - prim.theta_lo);
        outer.push([Math.exp(prim.rho_hi) * Math.cos(th), Math.exp(prim.rho_hi) * Math.sin(th)]);
        inner.push([Math.exp(prim.rho_lo) * Math.cos(th), Math.exp(prim.rho_lo) * Math.sin(th)]);
      }
      out.push(
        `<polygon points="${polyAttr([...outer, ...inner.reverse()])}" ` +
          `stroke-width="${fmt(hair)}"/>`,
      );
      break;
    }
    case "sector_envelope":
      for (const poly of sectorOutlines(prim)) {
        out.push(`<polygon points="${polyAttr(poly)}" stroke-width="${fmt(hair)}"/>`);
      }
      break;
    case "h_polygon":
      out.push(
        `<polygon points="${polyAttr(decimate(hPolygonChain(prim.klein_vertices), CLOUD_CAP))}" ` +
          `stroke-width="${fmt(hair)}"/>`,
      );
      break;
  }
}

// ---------------------------------------------------------------------------
// Document assembly
// ---------------------------------------------------------------------------

export function renderRegions(input: RenderInput): string {
  const view = viewFor(input);
  const tx = MARGIN_PX - view.s * view.x0;
  const ty = CANVAS_H - MARGIN_PX + view.s * view.y0;
  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${CANVAS_W}" height="${CANVAS_H}" ` +
      `viewBox="0 0 ${CANVAS_W} ${CANVAS_H}">`,
  );
  out.push(`<rect width="${CANVAS_W}" height="${CANVAS_H}" fill="#ffffff"/>`);
  if (input.title) {
    out.push(`<text x="12" y="20" font-size="13" fill="#333">${escapeText(input.title)}</text>`);
  }
  out.push(`<g transform="matrix(${fmt(view.s)} 0 0 ${fmt(-view.s)} ${fmt(tx)} ${fmt(ty)})">`);
  const hair = 1.5 / view.s;
  // axes and the unit markers at +/-1
  out.push(
    `<line x1="${fmt(view.x0)}" y1="0" x2="${fmt(view.x1)}" y2="0" ` +
      `stroke="#bbb" stroke-width="${fmt(hair)}"/>`,
  );
  out.push(
    `<line x1="0" y1="${fmt(view.y0)}" x2="0" y2="${fmt(view.y1)}" ` +
      `stroke="#bbb" stroke-width="${fmt(hair)}"/>`,
  );
  for (const u of [-1, 1]) {
    const t = 4 / view.s;
    out.push(
      `<line x1="${fmt(u)}" y1="${fmt(-t)}" x2="${fmt(u)}" y2="${fmt(t)}" ` +
        `stroke="#888" stroke-width="${fmt(hair)}"/>`,
    );
    out.push(
      `<line x1="${fmt(-t)}" y1="${fmt(u)}" x2="${fmt(t)}" y2="${fmt(u)}" ` +
        `stroke="#888" stroke-width="${fmt(hair)}"/>`,
    );
  }
  for (const layer of input.layers) {
    out.push(
      `<g fill="${layer.color}" fill-opacity="0.4" stroke="${layer.color}" stroke-opacity="0.9">`,
    );
    for (const prim of layer.region.primitives) {
      primitiveSvg(prim, view, out);
    }
    out.push("</g>");
  }
  if (input.witness) {
    const [a, b] = input.witness;
    out.push(
      `<line x1="${fmt(a[0])}" y1="${fmt(a[1])}" x2="${fmt(b[0])}" y2="${fmt(b[1])}" ` +
        `stroke="#222" stroke-width="${fmt(2 * hair)}" stroke-dasharray="${fmt(6 * hair)} ${fmt(4 * hair)}"/>`,
    );
  }
  out.push("</g>");
  let legendY = CANVAS_H - 14;
  if (input.witness && input.witnessDistance !== undefined) {
    out.push(
      `<text x="12" y="${legendY}" font-size="12" fill="#222">d = ${fmt(input.witnessDistance)}</text>`,
    );
    legendY -= 16;
  }
  for (let i = input.layers.length - 1; i >= 0; i -= 1) {
    const layer = input.layers[i] as RegionLayer;
    const note = layer.region.contains_infinity ? " (region extends to infinity)" : "";
    out.push(
      `<text x="12" y="${legendY}" font-size="12" fill="${layer.color}">` +
        `${escapeText(layer.label + note)}</text>`,
    );
    legendY -= 16;
  }
  out.push("</svg>");
  return out.join("\n") + "\n";
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
