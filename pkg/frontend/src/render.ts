/** Pure view functions: state in, HTML string out. Every figure shown comes
 * verbatim from a service payload — nothing is recomputed client-side. */

import type { Bundle, SubsetDoc, WhatifResponse } from "./types.js";

/** The subset list is unreadable beyond this many entries; drill-down still
 * reaches everything via the per-record panel. */
export const MAX_LISTED_SUBSETS = 50;

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function formatEpsilon(value: number | null): string {
  if (value === null) return "—";
  return value.toFixed(4);
}

export function formatFraction(value: number | null): string {
  if (value === null) return "—";
  return `${(value * 100).toFixed(1)}%`;
}

export function subsetKey(columns: string[]): string {
  return [...columns].sort().join(",");
}

export function subsetLabel(columns: string[]): string {
  return `{${[...columns].sort().join(", ")}}`;
}

function findSubset(bundle: Bundle, columns: string[]): SubsetDoc | undefined {
  const key = subsetKey(columns);
  return bundle.subsets.find((s) => subsetKey(s.columns) === key);
}

/** Minimal risky combinations ranked worst-first by at-risk share. */
export function renderRiskList(bundle: Bundle): string {
  const ranked = bundle.minimal_risky
    .map((columns) => ({ columns, doc: findSubset(bundle, columns) }))
    .sort(
      (a, b) =>
        (b.doc?.at_risk_fraction ?? 0) - (a.doc?.at_risk_fraction ?? 0),
    )
    .slice(0, MAX_LISTED_SUBSETS);
  if (ranked.length === 0) {
    return `<p class="all-clear">No risky combinations at ` +
      `ε₀ = ${formatEpsilon(bundle.config.epsilon0)}.</p>`;
  }
  const items = ranked
    .map(({ columns, doc }) => {
      const key = escapeHtml(subsetKey(columns));
      return (
        `<li class="risky-subset" data-subset="${key}">` +
        `<span class="subset-name">${escapeHtml(subsetLabel(columns))}</span>` +
        `<span class="min-eps">min ε = ${formatEpsilon(doc?.min_epsilon ?? null)}</span>` +
        `<span class="at-risk">${formatFraction(doc?.at_risk_fraction ?? null)} at risk</span>` +
        `</li>`
      );
    })
    .join("");
  return `<ol class="risk-list">${items}</ol>`;
}

/** Per-subset detail: uniquely pinned records first, then every record the
 * subset puts at or below the threshold. */
export function renderDrilldown(bundle: Bundle, columns: string[]): string {
  const doc = findSubset(bundle, columns);
  if (!doc) {
    return `<p class="empty">No data for ${escapeHtml(subsetLabel(columns))}.</p>`;
  }
  const key = subsetKey(columns);
  const atRisk = Object.entries(bundle.per_record)
    .filter(([, subsets]) => subsets.some((s) => subsetKey(s) === key))
    .map(([record]) => Number(record))
    .sort((a, b) => a - b);
  const unique = doc.unique_records ?? [];
  const uniqueItems = unique
    .map((r) => `<li class="unique-record">r${r} — ε = 0</li>`)
    .join("");
  const uniqueBlock = unique.length
    ? `<h4>Uniquely identified</h4><ul class="unique-records">${uniqueItems}</ul>`
    : "";
  const atRiskItems = atRisk.map((r) => `<li>r${r}</li>`).join("");
  return (
    `<section class="drilldown" data-subset="${escapeHtml(key)}">` +
    `<h3>${escapeHtml(subsetLabel(columns))}</h3>` +
    `<p>min ε = ${formatEpsilon(doc.min_epsilon)}, ` +
    `mean ε = ${formatEpsilon(doc.mean_epsilon)}, ` +
    `${formatFraction(doc.at_risk_fraction)} of records at risk</p>` +
    uniqueBlock +
    `<h4>At-risk records</h4><ul class="at-risk-records">${atRiskItems}</ul>` +
    `</section>`
  );
}

export function renderAlreadyIdentified(bundle: Bundle): string {
  if (bundle.already_identified.length === 0) {
    return `<p class="empty">No record is identified by the assumed adversary knowledge alone.</p>`;
  }
  const items = bundle.already_identified
    .map((r) => `<li>r${r}</li>`)
    .join("");
  return `<ul class="already-identified">${items}</ul>`;
}

/** Before/after card for a transform preview. When the preview generalizes a
 * single column, that column's own subset figures are shown alongside the
 * dataset-wide ones (the global minimum can be pinned by other subsets). */
export function renderDeltaCard(
  whatif: WhatifResponse,
  focusColumn: string | null = null,
): string {
  const rows: string[] = [
    deltaRow(
      "dataset min ε",
      formatEpsilon(whatif.before.min_epsilon),
      formatEpsilon(whatif.after.min_epsilon),
    ),
    deltaRow(
      "dataset at-risk share",
      formatFraction(whatif.before.at_risk_fraction),
      formatFraction(whatif.after.at_risk_fraction),
    ),
  ];
  if (focusColumn !== null) {
    const before = whatif.before.subsets[focusColumn];
    const after = whatif.after.subsets[focusColumn];
    if (before && after) {
      rows.push(
        deltaRow(
          `{${escapeHtml(focusColumn)}} min ε`,
          formatEpsilon(before.min_epsilon),
          formatEpsilon(after.min_epsilon),
        ),
        deltaRow(
          `{${escapeHtml(focusColumn)}} at-risk share`,
          formatFraction(before.at_risk_fraction),
          formatFraction(after.at_risk_fraction),
        ),
      );
    }
  }
  const families = (label: string, sets: string[][]): string =>
    `<p class="families">${label}: ` +
    (sets.length
      ? sets.map((s) => escapeHtml(subsetLabel(s))).join(", ")
      : "none") +
    `</p>`;
  const status = whatif.committed
    ? `<p class="committed">Applied to the session.</p>`
    : `<p class="preview">Preview only — the session is unchanged.</p>`;
  return (
    `<section class="delta-card">` +
    `<table class="delta"><thead><tr><th></th><th>before</th><th>after</th></tr></thead>` +
    `<tbody>${rows.join("")}</tbody></table>` +
    families("minimal risky before", whatif.before.minimal_risky) +
    families("minimal risky after", whatif.after.minimal_risky) +
    status +
    `</section>`
  );
}

function deltaRow(label: string, before: string, after: string): string {
  return (
    `<tr><td>${label}</td>` +
    `<td class="before">${before}</td>` +
    `<td class="after">${after}</td></tr>`
  );
}

export function renderHistory(depth: number): string {
  return (
    `<p class="history">Committed transforms: ${depth}` +
    (depth > 0 ? ` <button data-action="undo">Undo last</button>` : "") +
    `</p>`
  );
}

export interface WorkbenchView {
  bundle: Bundle | null;
  selectedSubset: string[] | null;
  whatif: WhatifResponse | null;
  whatifColumn: string | null;
  historyDepth: number;
  error: string | null;
}

/** Whole analysis screen as one HTML string (upload screen is static). */
export function renderWorkbench(view: WorkbenchView): string {
  if (view.bundle === null) {
    return `<p class="empty">Upload a CSV and schema to begin.</p>`;
  }
  const parts = [
    view.error ? `<p class="error">${escapeHtml(view.error)}</p>` : "",
    `<h2>Risky combinations (ε₀ = ` +
      `${formatEpsilon(view.bundle.config.epsilon0)})</h2>`,
    renderRiskList(view.bundle),
    view.selectedSubset
      ? renderDrilldown(view.bundle, view.selectedSubset)
      : "",
    `<h2>Already identified</h2>`,
    renderAlreadyIdentified(view.bundle),
    view.whatif ? renderDeltaCard(view.whatif, view.whatifColumn) : "",
    renderHistory(view.historyDepth),
  ];
  return parts.filter((p) => p !== "").join("\n");
}
