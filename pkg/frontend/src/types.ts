export const LANGUAGES = ["ar", "en", "fr", "de", "es"] as const;
export type LanguageCode = (typeof LANGUAGES)[number];

export interface DisplayName {
  display_name: string;
  display_type: "visible" | "hidden";
}

export interface Topic {
  topic_id: number;
  slug: string;
  wikidata_id: string | null;
  freebase_mid: string | null;
  retired: boolean;
  is_root: boolean;
  display_names: Partial<Record<LanguageCode, DisplayName>>;
  resolved_name: string | null;
  resolved_type: string | null;
  parents: number[];
  children: number[];
}

export interface TopicPaths {
  paths: { topic_ids: number[]; slugs: string[] }[];
}

export interface AuditRecord {
  seq: number;
  timestamp: string;
  actor: string;
  op_kind: string;
  payload: Record<string, unknown>;
}

export type Proposal =
  | { kind: "add_edge"; parent: number; child: number }
  | { kind: "retire_topic"; topic_id: number }
  | { kind: "merge_topics"; loser: number; winner: number }
  | {
      kind: "add_topic";
      slug: string;
      english_name: string;
      parent_ids: number[];
      wikidata_id?: string;
      freebase_mid?: string;
    };

export type ItemStatus = "pending" | "accepted" | "rejected";

export interface ReviewItem {
  item_id: number;
  proposal: Proposal;
  status: ItemStatus;
  provenance: string;
  created_at: string;
  decided_at: string | null;
  decider: string | null;
  detail: string | null;
}

export interface Page<T> {
  total: number;
  offset: number;
  limit: number;
  items: T[];
}
