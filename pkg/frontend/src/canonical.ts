/**
 * Canonical JSON for session files: keys sorted, two-space indent, one
 * trailing newline, non-finite numbers rejected. Exporting and re-importing
 * a session must reproduce the file byte for byte, so every writer goes
 * through this one serializer.
 */

function sortValue(v: unknown, path: string): unknown {
  if (v === null || typeof v === "boolean" || typeof v === "string") {
    return v;
  }
  if (typeof v === "number") {
    if (!Number.isFinite(v)) {
      throw new Error(`non-finite number at ${path} cannot be serialized`);
    }
    return v;
  }
  if (Array.isArray(v)) {
    return v.map((item, i) => sortValue(item, `${path}[${i}]`));
  }
  if (typeof v === "object") {
    const src = v as Record<string, unknown>;
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(src).sort()) {
      const item = src[key];
      if (item === undefined) {
        continue;
      }
      out[key] = sortValue(item, `${path}.${key}`);
    }
    return out;
  }
  throw new Error(`value of type ${typeof v} at ${path} is not JSON`);
}

export function canonicalStringify(value: unknown): string {
  return JSON.stringify(sortValue(value, "$"), null, 2) + "\n";
}
