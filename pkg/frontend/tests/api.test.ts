import { afterEach, describe, expect, it, vi } from "vitest";
import { api, ApiError, setBaseUrl } from "../src/api";

function stubFetch(status: number, body: unknown) {
  const fn = vi.fn(async () => ({
    ok: status < 400,
    status,
    statusText: "stub",
    json: async () => body,
  }));
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => {
  vi.unstubAllGlobals();
  setBaseUrl("");
});

describe("api client", () => {
  it("prefixes the base url and /api/v1", async () => {
    const fn = stubFetch(200, { topic_id: 5, slug: "jazz" });
    setBaseUrl("http://example.test:8400/");
    await api.getTopic(5);
    expect(fn).toHaveBeenCalledWith(
      "http://example.test:8400/api/v1/topics/5",
      expect.objectContaining({ method: "GET" }),
    );
  });

  it("sends the actor as X-Actor on decisions", async () => {
    const fn = stubFetch(200, { item_id: 1, status: "accepted" });
    await api.accept(1, "alice");
    const [, init] = fn.mock.calls[0] as unknown as [string, RequestInit];
    expect((init.headers as Record<string, string>)["X-Actor"]).toBe("alice");
  });

  it("surfaces service error bodies as ApiError with code and detail", async () => {
    stubFetch(409, { status: 409, code: "cycle-rejected", detail: "edge 9->2 closes a cycle" });
    const err = await api.accept(3, "alice").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.code).toBe("cycle-rejected");
    expect(err.detail).toContain("closes a cycle");
  });

  it("keeps the status text when the error body is not json", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => ({
        ok: false,
        status: 502,
        statusText: "Bad Gateway",
        json: async () => {
          throw new SyntaxError("not json");
        },
      })),
    );
    const err = await api.summary().catch((e) => e);
    expect(err.code).toBe("http-error");
    expect(err.detail).toBe("Bad Gateway");
  });

  it("url-encodes search queries", async () => {
    const fn = stubFetch(200, { total: 0, offset: 0, limit: 100, items: [] });
    await api.search("a&b c");
    const [url] = fn.mock.calls[0] as unknown as [string];
    expect(url).toContain("/search?q=a%26b%20c");
  });
});
