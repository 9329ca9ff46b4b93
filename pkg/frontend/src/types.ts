/** Wire types for the analysis service. Field names mirror the canonical
 * report schema exactly; the client never recomputes any figure. */

export interface ColumnDoc {
  name: string;
  class: "direct" | "quasi" | "sensitive" | "non_identifying";
  consented: boolean;
}

export interface SubsetDoc {
  columns: string[];
  /** null when the subset was skipped because a proper subset is risky */
  min_epsilon: number | null;
  mean_epsilon: number | null;
  at_risk_fraction: number | null;
  unique_records: number[] | null;
  risky: boolean;
  by_implication: boolean;
}

export interface Bundle {
  version: string;
  dataset: {
    digest: string;
    n_records: number;
    columns: ColumnDoc[];
  };
  config: {
    epsilon0: number;
    k_max: number;
    aux_columns: string[];
    log_base: number;
    risk_trigger: string | { fraction_at_least: number };
  };
  subsets: SubsetDoc[];
  minimal_risky: string[][];
  per_record: Record<string, string[][]>;
  already_identified: number[];
  plans: Record<string, unknown>;
}

export interface SubsetSummary {
  min_epsilon: number;
  at_risk_fraction: number;
}

export interface WhatifSummary {
  min_epsilon: number;
  at_risk_fraction: number;
  minimal_risky: string[][];
  subsets: Record<string, SubsetSummary>;
}

export interface WhatifResponse {
  before: WhatifSummary;
  after: WhatifSummary;
  committed: boolean;
  /** transform-specific extras, e.g. a separation plan or stripped columns */
  [extra: string]: unknown;
}

export type TransformName =
  | "generalize"
  | "minimize"
  | "hide"
  | "separate"
  | "link";

export type TransformBody = Partial<Record<TransformName, unknown>>;

export interface SessionInfo {
  session_id: string;
  n_records: number;
  columns: string[];
}

export interface ConfigBody {
  epsilon0?: number;
  k_max?: number;
  aux_columns?: string[];
  log_base?: number;
  risk_trigger?: string | { fraction_at_least: number };
}
