import type { ReviewItem, Topic, TopicPaths } from "../src/types";

export function topic(overrides: Partial<Topic> = {}): Topic {
  return {
    topic_id: 1,
    slug: "baseball",
    wikidata_id: "Q5369",
    freebase_mid: null,
    retired: false,
    is_root: false,
    display_names: { en: { display_name: "Baseball", display_type: "visible" } },
    resolved_name: "Baseball",
    resolved_type: "visible",
    parents: [],
    children: [],
    ...overrides,
  };
}

export function item(overrides: Partial<ReviewItem> = {}): ReviewItem {
  return {
    item_id: 1,
    proposal: { kind: "add_edge", parent: 1, child: 2 },
    status: "pending",
    provenance: "edge-check",
    created_at: "2026-08-26T00:00:00Z",
    decided_at: null,
    decider: null,
    detail: null,
    ...overrides,
  };
}

export const emptyPaths: TopicPaths = { paths: [] };
