/**
 * Seminal-paper list export: the analyst's annotated variants as CSV.
 *
 * Column order is fixed: label,raw,rpy,ncr,merged. Values come from the
 * service (every annotated variant's row is fetched from its year's
 * drill-down endpoint, so ncr and the merged flag are server-computed).
 */

import type { AnalysisClient, WorkspaceDoc, YearRef } from "./api.js";

export interface SeminalRow {
  label: string;
  raw: string;
  rpy: number | null;
  ncr: number;
  merged: boolean;
}

export const SEMINAL_COLUMNS = ["label", "raw", "rpy", "ncr", "merged"] as const;

function csvCell(value: string): string {
  if (/[",\n]/.test(value)) {
    return '"' + value.replace(/"/g, '""') + '"';
  }
  return value;
}

export function seminalCsv(rows: SeminalRow[]): string {
  const lines = [SEMINAL_COLUMNS.join(",")];
  for (const row of rows) {
    lines.push(
      [
        csvCell(row.label),
        csvCell(row.raw),
        row.rpy === null ? "" : String(row.rpy),
        String(row.ncr),
        row.merged ? "M" : "",
      ].join(","),
    );
  }
  return lines.join("\n") + "\n";
}

/**
 * Collect the annotated variants of a session. Returns rows ordered by
 * (rpy, raw); empty when nothing is annotated (the export action should be
 * disabled in that case).
 */
export async function buildSeminalRows(
  client: AnalysisClient,
  sessionId: string,
  doc?: WorkspaceDoc,
): Promise<SeminalRow[]> {
  const workspace = doc ?? (await client.exportWorkspace(sessionId));
  const annotations = workspace.annotations ?? {};
  const annotatedIds = new Set(Object.keys(annotations));
  if (annotatedIds.size === 0) return [];

  const yearsToFetch = new Set<number>();
  for (const variant of workspace.variants) {
    if (annotatedIds.has(variant.variant_id) && variant.rpy !== null) {
      yearsToFetch.add(variant.rpy);
    }
  }

  const rowsById = new Map<string, YearRef>();
  for (const year of [...yearsToFetch].sort((a, b) => a - b)) {
    const refs = await client.getYearRefs(sessionId, year);
    for (const ref of refs.refs) {
      if (annotatedIds.has(ref.variant_id)) {
        rowsById.set(ref.variant_id, ref);
      }
    }
  }

  const rows: SeminalRow[] = [];
  for (const [variantId, label] of Object.entries(annotations)) {
    const ref = rowsById.get(variantId);
    if (!ref) continue; // annotated variant without a year is not exportable
    rows.push({ label, raw: ref.raw, rpy: ref.rpy, ncr: ref.ncr, merged: ref.merged });
  }
  rows.sort((a, b) => (a.rpy ?? 0) - (b.rpy ?? 0) || a.raw.localeCompare(b.raw));
  return rows;
}
