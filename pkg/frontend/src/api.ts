/**
 * Typed client for the analysis service.
 *
 * Every mutation carries the caller's expected_version; a 409 surfaces as
 * StaleVersionError so the UI can prompt the analyst to refresh and retry —
 * the client itself never retries silently.
 */

export interface SessionInfo {
  records: number;
  cr_mentions: number;
  distinct_variants: number;
  rpy_span: [number, number] | null;
}

export interface SessionHandle {
  session_id: string;
  version: number;
  info: SessionInfo;
}

export interface SpectrumPoint {
  rpy: number;
  ncr: number;
  distinct: number;
  median_dev: number;
}

export interface YearRef {
  variant_id: string;
  raw: string;
  first_author: string | null;
  rpy: number | null;
  source: string | null;
  volume: string | null;
  start_page: string | null;
  doi: string | null;
  cluster_id: string | null;
  ncr: number;
  share: number;
  top: boolean;
  merged: boolean;
  annotation: string | null;
}

export interface YearRefs {
  rpy: number;
  total_ncr: number;
  version: number;
  refs: YearRef[];
}

export interface PeakInfo {
  rpy: number;
  ncr: number;
  median_dev: number;
  top_refs: { variant_id: string; ncr: number; share: number }[];
}

export interface HistoryEntry {
  op: string;
  args: Record<string, unknown>;
}

export interface WindowConfig {
  lo: number;
  hi: number;
  keep_missing: boolean;
}

export interface ImportConfig {
  rpy: WindowConfig;
  py: WindowConfig;
  max_cr: number;
}

export interface MarkerFields {
  rpy: number;
  author?: string;
  volume?: string;
  page?: string;
  doi?: string;
}

/** Workspace document as served by GET /sessions/{id}/export?type=workspace */
export interface WorkspaceDoc {
  format: string;
  version: number;
  variants: { variant_id: string; raw: string; rpy: number | null }[];
  history: HistoryEntry[];
  annotations: Record<string, string>;
  [key: string]: unknown;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export class StaleVersionError extends Error {
  constructor(readonly currentVersion: number) {
    super(`session changed (now at version ${currentVersion}); refresh and retry`);
    this.name = "StaleVersionError";
  }
}

async function parseBody(res: Response): Promise<unknown> {
  const text = await res.text();
  try {
    return text ? JSON.parse(text) : null;
  } catch {
    return { raw: text };
  }
}

function errorMessage(body: unknown, res: Response): string {
  if (body && typeof body === "object" && "detail" in body) {
    const detail = (body as { detail: unknown }).detail;
    if (typeof detail === "string") return detail;
    if (Array.isArray(detail)) {
      return detail
        .map((d) => (d && typeof d === "object" ? `${(d as any).field ?? ""}: ${(d as any).message ?? JSON.stringify(d)}` : String(d)))
        .join("; ");
    }
    return JSON.stringify(detail);
  }
  return `HTTP ${res.status} ${res.statusText}`;
}

export class AnalysisClient {
  constructor(readonly baseUrl: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    const body = await parseBody(res);
    if (res.status === 409) {
      const detail = (body as any)?.detail;
      throw new StaleVersionError(detail?.current_version ?? -1);
    }
    if (!res.ok) {
      throw new ApiError(res.status, errorMessage(body, res));
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createSessionFromExport(exportText: string, config?: ImportConfig): Promise<SessionHandle> {
    return this.post("/sessions", { export_text: exportText, config });
  }

  createSessionFromWorkspace(doc: WorkspaceDoc): Promise<SessionHandle> {
    return this.post("/sessions", { workspace: doc });
  }

  getSession(id: string): Promise<SessionHandle> {
    return this.json(`/sessions/${id}`);
  }

  getSpectrum(id: string, lo?: number, hi?: number): Promise<SpectrumPoint[]> {
    const params = new URLSearchParams();
    if (lo !== undefined) params.set("lo", String(lo));
    if (hi !== undefined) params.set("hi", String(hi));
    const query = params.toString();
    return this.json(`/sessions/${id}/spectrum${query ? "?" + query : ""}`);
  }

  getYearRefs(id: string, rpy: number, shareThreshold = 0.1): Promise<YearRefs> {
    return this.json(`/sessions/${id}/years/${rpy}/refs?share_threshold=${shareThreshold}`);
  }

  getPeaks(id: string, minDev = 1): Promise<PeakInfo[]> {
    return this.json(`/sessions/${id}/peaks?min_dev=${minDev}`);
  }

  getHistory(id: string): Promise<{ version: number; history: HistoryEntry[] }> {
    return this.json(`/sessions/${id}/history`);
  }

  async exportCsv(id: string, type: "CSV_CR" | "CSV_GRAPH"): Promise<string> {
    const res = await fetch(`${this.baseUrl}/sessions/${id}/export?type=${type}`);
    if (!res.ok) throw new ApiError(res.status, errorMessage(await parseBody(res), res));
    return res.text();
  }

  exportWorkspace(id: string): Promise<WorkspaceDoc> {
    return this.json(`/sessions/${id}/export?type=workspace`);
  }

  mergeVariants(id: string, variantIds: string[], expectedVersion: number): Promise<SessionHandle> {
    return this.post(`/sessions/${id}/merge`, {
      variant_ids: variantIds,
      expected_version: expectedVersion,
    });
  }

  splitVariant(id: string, variantId: string, expectedVersion: number): Promise<SessionHandle> {
    return this.post(`/sessions/${id}/split`, {
      variant_id: variantId,
      expected_version: expectedVersion,
    });
  }

  clusterMerge(
    id: string,
    params: { threshold: number; use_volume: boolean; use_page: boolean; use_doi: boolean },
    expectedVersion: number,
  ): Promise<SessionHandle> {
    return this.post(`/sessions/${id}/cluster`, { ...params, expected_version: expectedVersion });
  }

  filterByMarkers(
    id: string,
    markers: MarkerFields[],
    mode: "any" | "all",
    expectedVersion: number,
  ): Promise<SessionHandle> {
    return this.post(`/sessions/${id}/filter`, {
      markers,
      mode,
      expected_version: expectedVersion,
    });
  }

  removeNcr(id: string, lo: number, hi: number, expectedVersion: number): Promise<SessionHandle> {
    return this.post(`/sessions/${id}/remove-ncr`, { lo, hi, expected_version: expectedVersion });
  }

  annotate(id: string, variantId: string, text: string, expectedVersion: number): Promise<SessionHandle> {
    return this.post(`/sessions/${id}/annotate`, {
      variant_id: variantId,
      text,
      expected_version: expectedVersion,
    });
  }
}
