/**
 * Pure HTML renderers. No fetching, no DOM lookups, no derived facts
 * beyond counts and formatting: digests and ids pass through exactly as
 * the server returned them (full hex preserved in data attributes for
 * copy-to-clipboard).
 */

import { CaseDoc, EventDoc, VerifyDoc } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function formatTimestamp(ms: number): string {
  return new Date(ms).toISOString().replace("T", " ").replace(".000Z", "Z");
}

/** Copyable hash cell: abbreviated display, exact hex in data-hex. */
export function hashLink(hex: string): string {
  const safe = escapeHtml(hex);
  return `<code class="hash" data-hex="${safe}" title="click to copy">` +
    `${safe.slice(0, 10)}…${safe.slice(-6)}</code>`;
}

export function shortKey(hex: string): string {
  const safe = escapeHtml(hex);
  return `<code class="key" data-hex="${safe}" title="click to copy">` +
    `${safe.slice(0, 8)}…</code>`;
}

export interface CaseView extends CaseDoc {
  eventCount: number;
  lastActivityMs: number;
}

export function deriveCaseView(caseDoc: CaseDoc, events: EventDoc[]): CaseView {
  const lastActivityMs = events.reduce(
    (last, e) => Math.max(last, e.createdAtMs,
      ...e.custody.map((h) => h.timestampMs)),
    caseDoc.createdAtMs);
  return { ...caseDoc, eventCount: events.length, lastActivityMs };
}

export function renderCaseTable(views: CaseView[]): string {
  const summary = `<p class="summary">${views.length} case${views.length === 1 ? "" : "s"}</p>`;
  if (views.length === 0) {
    return summary + `<p class="empty">No cases registered.</p>`;
  }
  const rows = views.map((v) => `
    <tr class="case-row" data-case-id="${v.caseId}">
      <td>${v.caseId}</td>
      <td>${escapeHtml(v.name)}</td>
      <td><span class="status status-${escapeHtml(v.status)}">${escapeHtml(v.status)}</span></td>
      <td>${shortKey(v.responsible)}</td>
      <td>${v.eventCount}</td>
      <td>${formatTimestamp(v.lastActivityMs)}</td>
      <td>${hashLink(v.caseHash)}</td>
    </tr>`).join("");
  return summary + `
  <table class="cases">
    <thead><tr>
      <th>id</th><th>name</th><th>status</th><th>responsible</th>
      <th>events</th><th>last activity</th><th>directory hash</th>
    </tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function renderCustody(event: EventDoc): string {
  const hops = event.custody.map((h) =>
    `<li>${shortKey(h.owner)} <time>${formatTimestamp(h.timestampMs)}</time></li>`);
  return `<ol class="custody">${hops.join("")}</ol>`;
}

export function renderEventsPanel(caseDoc: CaseDoc, events: EventDoc[]): string {
  const rows = events.map((e) => `
    <tr class="event-row${e.status === "deleted" ? " deleted" : ""}">
      <td>${e.eventId}</td>
      <td>${escapeHtml(e.type)}</td>
      <td>${escapeHtml(e.description)}</td>
      <td><span class="status status-${escapeHtml(e.status)}">${escapeHtml(e.status)}</span></td>
      <td>${hashLink(e.evidenceHash)}</td>
      <td>${renderCustody(e)}</td>
    </tr>`).join("");
  return `
  <h3>case ${caseDoc.caseId}: ${escapeHtml(caseDoc.name)} (${events.length} events)</h3>
  <table class="events">
    <thead><tr>
      <th>id</th><th>type</th><th>description</th><th>status</th>
      <th>evidence digest</th><th>custody</th>
    </tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export interface AlertDoc {
  seq: number;
  txId: string;
  functionCode: string;
  caseId?: number;
}

export function renderAlertEntry(alert: AlertDoc): string {
  const caseRef = alert.caseId === undefined ? "" : ` case ${alert.caseId}`;
  return `<li class="alert" data-seq="${alert.seq}">` +
    `<span class="seq">#${alert.seq}</span> ` +
    `<span class="fn">${escapeHtml(alert.functionCode)}</span>${caseRef} ` +
    `${hashLink(alert.txId)}</li>`;
}

export type BadgeState = "ok" | "failed" | "disconnected" | "checking";

export function renderBadge(state: BadgeState, verify?: VerifyDoc): string {
  switch (state) {
    case "ok":
      return `<span class="badge badge-ok">chain OK · ${verify?.blocks ?? "?"} blocks</span>`;
    case "failed":
      return `<span class="badge badge-failed">chain FAILED at ` +
        `${verify?.firstBadHeight ?? "?"} (${escapeHtml(verify?.failureKind ?? "unknown")})</span>`;
    case "disconnected":
      return `<span class="badge badge-warn">stream disconnected · data may be stale</span>`;
    case "checking":
      return `<span class="badge badge-warn">verifying…</span>`;
  }
}

export function renderTypeOptions(values: string[]): string {
  return values.map((v) =>
    `<option value="${escapeHtml(v)}">${escapeHtml(v)}</option>`).join("");
}

export function renderCaseOptions(cases: CaseDoc[]): string {
  return cases
    .filter((c) => c.status === "open")
    .map((c) => `<option value="${c.caseId}">case ${c.caseId}: ${escapeHtml(c.name)}</option>`)
    .join("");
}

/** Field-level targets for the error codes the form can trigger. */
export const ERROR_FIELDS: Record<string, string> = {
  PermissionDenied: "signing-key",
  SignatureInvalid: "signing-key",
  CaseClosed: "case-select",
  UnknownCase: "case-select",
  UnknownEventType: "type-select",
  UnknownStatus: "status-select",
};

export function renderFormError(code: string, message: string): string {
  return `<p class="form-error" data-code="${escapeHtml(code)}">` +
    `${escapeHtml(code)}: ${escapeHtml(message)}</p>`;
}

export interface SubmitConfirmation {
  eventId?: number;
  txId: string;
  height: number;
}

export function renderSubmitConfirmation(doc: SubmitConfirmation): string {
  return `<p class="form-ok">event <strong>${doc.eventId}</strong> recorded ` +
    `in block ${doc.height} · tx ${hashLink(doc.txId)}</p>`;
}

export function renderDigestConfirmation(digest: string, length: number,
                                         localMatch: boolean | null): string {
  const note = localMatch === null ? ""
    : localMatch ? ` <span class="digest-match">matches local hash</span>`
    : ` <span class="digest-mismatch">DOES NOT match local hash</span>`;
  return `<p class="digest-confirm">stored ${length} bytes as ` +
    `${hashLink(digest)}${note}</p>`;
}
