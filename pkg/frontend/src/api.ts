import type {
  AuditRecord,
  ItemStatus,
  Page,
  Proposal,
  ReviewItem,
  Topic,
  TopicPaths,
} from "./types";

/** Error body the service returns for every failure: {status, code, detail}. */
export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    public detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

// Same-origin by default (the dev server proxies /api); tests and the
// end-to-end harness point this at a concrete service URL.
let baseUrl = "";

export function setBaseUrl(url: string): void {
  baseUrl = url.replace(/\/$/, "");
}

async function request<T>(
  method: string,
  path: string,
  opts: { body?: unknown; actor?: string } = {},
): Promise<T> {
  const headers: Record<string, string> = {};
  if (opts.body !== undefined) headers["Content-Type"] = "application/json";
  if (opts.actor) headers["X-Actor"] = opts.actor;
  const resp = await fetch(`${baseUrl}/api/v1${path}`, {
    method,
    headers,
    body: opts.body === undefined ? undefined : JSON.stringify(opts.body),
  });
  if (!resp.ok) {
    let code = "http-error";
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && typeof body.code === "string") {
        code = body.code;
        detail = body.detail ?? detail;
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, code, detail);
  }
  return resp.json() as Promise<T>;
}

export const api = {
  getTopic: (id: number, lang?: string) =>
    request<Topic>("GET", `/topics/${id}${lang ? `?lang=${lang}` : ""}`),

  getPaths: (id: number) => request<TopicPaths>("GET", `/topics/${id}/paths`),

  getAudit: (id: number) =>
    request<{ records: AuditRecord[] }>("GET", `/topics/${id}/audit`),

  search: (q: string, lang?: string) =>
    request<Page<Topic>>(
      "GET",
      `/search?q=${encodeURIComponent(q)}${lang ? `&lang=${lang}` : ""}`,
    ),

  summary: () =>
    request<{ nodes: number; edges: number; roots: number }>(
      "GET",
      "/stats/summary",
    ),

  listQueue: (status?: ItemStatus) =>
    request<Page<ReviewItem>>(
      "GET",
      `/review-queue${status ? `?status=${status}` : ""}`,
    ),

  propose: (proposal: Proposal, provenance = "review-ui") =>
    request<ReviewItem>("POST", "/review-queue", {
      body: { proposal, provenance },
    }),

  accept: (itemId: number, actor: string) =>
    request<ReviewItem>("POST", `/review-queue/${itemId}/accept`, { actor }),

  reject: (itemId: number, actor: string) =>
    request<ReviewItem>("POST", `/review-queue/${itemId}/reject`, { actor }),
};

export type Api = typeof api;
