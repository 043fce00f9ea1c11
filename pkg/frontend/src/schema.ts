/**
 * Typed mirrors of the JSON documents the srgtools API exchanges.
 *
 * Every schema is versioned with a string `schema_version`; the console
 * treats these documents as opaque numeric truth and never recomputes
 * geometry from them.
 */

/** Complex number on the wire: [re, im]. */
export type Complex = [number, number];

// ---------------------------------------------------------------------------
// Operator expressions
// ---------------------------------------------------------------------------

export interface LtiExpr {
  type: "lti";
  /** Polynomial coefficients in ascending powers of s. */
  num: number[];
  den: number[];
}

export interface StaticExpr {
  type: "static";
  kind: "saturation" | "deadzone" | "relu" | "sector_custom" | string;
  limit?: number;
  width?: number;
  mu?: number;
  lam?: number;
}

export interface NormalMatrixExpr {
  type: "normal_matrix";
  eigenvalues: Complex[];
}

export interface SumExpr {
  type: "sum";
  children: SystemExpr[];
}

export interface ComposeExpr {
  type: "compose";
  outer: SystemExpr;
  inner: SystemExpr;
}

export interface InverseExpr {
  type: "inverse";
  child: SystemExpr;
}

export interface ScaleExpr {
  type: "scale";
  alpha: Complex;
  child: SystemExpr;
}

export interface FeedbackExpr {
  type: "feedback";
  plant: SystemExpr;
  controller: SystemExpr;
}

export type SystemExpr =
  | LtiExpr
  | StaticExpr
  | NormalMatrixExpr
  | SumExpr
  | ComposeExpr
  | InverseExpr
  | ScaleExpr
  | FeedbackExpr;

// ---------------------------------------------------------------------------
// Signal class
// ---------------------------------------------------------------------------

export interface SignalClassDoc {
  /** Frequency interval in rad/s, null when unrestricted. */
  band: [number, number] | null;
  /** Peak amplitude bound, null when unconstrained. */
  amplitude: number | null;
  horizon: number;
  dt: number;
}

// ---------------------------------------------------------------------------
// Region primitives
// ---------------------------------------------------------------------------

export interface DiscPrim {
  kind: "disc";
  center: Complex;
  radius: number;
}

export interface HalfPlaneRePrim {
  kind: "half_plane_re";
  c: number;
  side: ">=" | "<=";
}

export interface SegmentPrim {
  kind: "segment";
  a: Complex;
  b: Complex;
}

export interface ConvexPolygonPrim {
  kind: "convex_polygon";
  vertices: Complex[];
}

export interface PointSetPrim {
  kind: "point_set";
  points: Complex[];
  dilation: number;
}

export interface LogPolarBoxPrim {
  kind: "log_polar_box";
  rho_lo: number;
  rho_hi: number;
  theta_lo: number;
  theta_hi: number;
}

/** Per-bin log-radius envelope over n angular bins; null marks an empty bin. */
export interface SectorEnvelopePrim {
  kind: "sector_envelope";
  n: number;
  rho_lo: (number | null)[];
  rho_hi: (number | null)[];
}

/** Hyperbolically convex polygon, vertices in the Klein disc chart. */
export interface HPolygonPrim {
  kind: "h_polygon";
  klein_vertices: [number, number][];
  boundary_gap: number;
}

export type Primitive =
  | DiscPrim
  | HalfPlaneRePrim
  | SegmentPrim
  | ConvexPolygonPrim
  | PointSetPrim
  | LogPolarBoxPrim
  | SectorEnvelopePrim
  | HPolygonPrim;

export interface RegionDoc {
  schema_version: string;
  contains_infinity: boolean;
  resolution: number;
  primitives: Primitive[];
}

/** /api/srg response: a region plus provenance of the bound. */
export interface SrgBoundDoc extends RegionDoc {
  class: SignalClassDoc | null;
  exactness: "exact" | "outer" | string;
  rule_trace: string[];
}

// ---------------------------------------------------------------------------
// Margin reports
// ---------------------------------------------------------------------------

/**
 * Canonical JSON refuses non-finite numbers, so an infinite gain bound
 * travels as the string "inf".
 */
export type GainBound = number | "inf";

export interface MarginReport {
  schema_version: string;
  kind: "robustness" | "sensitivity";
  separated: boolean;
  margin: number;
  error_bar: number;
  bound: GainBound;
  witness: [Complex, Complex] | null;
  tau_certificate: string;
  trace: string[];
  /** Robustness reports alias margin as r_m, sensitivity ones as s_m. */
  r_m?: number;
  s_m?: number;
}

/** /api/sensitivity bundles the report with the sensitivity SRG. */
export interface SensitivityDoc {
  schema_version: string;
  report: MarginReport;
  srg: SrgBoundDoc;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

export interface SrgSampleDoc {
  schema_version: string;
  points: Complex[];
  pair_ids: number[];
  seed: number;
  signal_class: SignalClassDoc;
  system: SystemExpr;
}

// ---------------------------------------------------------------------------
// Requests
// ---------------------------------------------------------------------------

export interface SrgRequest {
  system: SystemExpr;
  class?: SignalClassDoc | null;
  resolution?: number;
}

export interface MarginRequest {
  controller: SystemExpr;
  plant: SystemExpr;
  class?: SignalClassDoc | null;
  resolution?: number;
}

export interface SensitivityRequest {
  plant: SystemExpr;
  controller: SystemExpr;
  class?: SignalClassDoc | null;
  resolution?: number;
}

export interface SampleRequest {
  system: SystemExpr;
  class?: SignalClassDoc | null;
  n_pairs?: number;
  seed?: number;
}

export interface HealthDoc {
  status: string;
  version: string;
}

/** Error body for 400 (validation) and 422 (geometry) responses. */
export interface ApiErrorDoc {
  schema_version: string;
  error: {
    code: "validation" | "geometry" | string;
    message: string;
    type: string;
  };
}

export function boundAsNumber(b: GainBound): number {
  return b === "inf" ? Infinity : b;
}
