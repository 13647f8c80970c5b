/**
 * Dashboard wiring: the case/evidence browser and the new-event form the
 * service demonstrates, plus the live alert feed with a chain badge.
 *
 * All state shown comes from GET routes; the alert stream only tells us
 * when to refresh. Sequence gaps or stream overflow trigger a full
 * re-query.
 */

import { ApiClient, ApiError, CaseDoc, MetaDoc } from "./api.js";
import { bytesToHex } from "./hex.js";
import {
  AlertDoc,
  deriveCaseView,
  ERROR_FIELDS,
  renderAlertEntry,
  renderBadge,
  renderCaseOptions,
  renderCaseTable,
  renderDigestConfirmation,
  renderEventsPanel,
  renderFormError,
  renderSubmitConfirmation,
  renderTypeOptions,
} from "./render.js";
import { SeqTracker } from "./seq.js";
import { keyFromSeedHex, sha256 } from "./signing.js";

const api = new ApiClient("");
const seqTracker = new SeqTracker();

let selectedCase: number | null = null;
let uploadedDigest: string | null = null;
let reconnectDelayMs = 1_000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setBanner(message: string | null): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message ?? "";
  banner.hidden = message === null;
}

async function refreshBadge(): Promise<void> {
  const badge = el<HTMLSpanElement>("badge");
  try {
    const verify = await api.verify();
    badge.innerHTML = renderBadge(verify.ok ? "ok" : "failed", verify);
  } catch {
    badge.innerHTML = renderBadge("disconnected");
  }
}

async function refreshCases(): Promise<void> {
  try {
    const { cases } = await api.listCases();
    const views = await Promise.all(cases.map(async (c) => {
      const { events } = await api.listCaseEvents(c.caseId);
      return deriveCaseView(c, events);
    }));
    el<HTMLDivElement>("cases").innerHTML = renderCaseTable(views);
    el<HTMLSelectElement>("case-select").innerHTML = renderCaseOptions(cases);
    setBanner(null);
    if (selectedCase !== null && cases.some((c) => c.caseId === selectedCase)) {
      await showEvents(selectedCase);
    }
  } catch (error) {
    setBanner(`cannot reach the service: ${String(error)}`);
  }
}

async function showEvents(caseId: number): Promise<void> {
  selectedCase = caseId;
  const caseDoc: CaseDoc = await api.getCase(caseId);
  const { events } = await api.listCaseEvents(caseId);
  el<HTMLDivElement>("events").innerHTML = renderEventsPanel(caseDoc, events);
}

async function loadMeta(): Promise<MetaDoc> {
  const meta = await api.meta();
  el<HTMLSelectElement>("type-select").innerHTML = renderTypeOptions(meta.eventTypes);
  el<HTMLSelectElement>("status-select").innerHTML = renderTypeOptions(meta.eventStatuses);
  return meta;
}

// --- evidence upload -------------------------------------------------------

async function handleUpload(): Promise<void> {
  const input = el<HTMLInputElement>("evidence-file");
  const confirmBox = el<HTMLDivElement>("digest-confirm");
  const file = input.files?.[0];
  if (!file) return;
  const content = new Uint8Array(await file.arrayBuffer());
  // the local hash exists purely so the operator can confirm the echo
  const localDigest = bytesToHex(await sha256(content));
  try {
    const stored = await api.putEvidence(content);
    uploadedDigest = stored.digest;
    el<HTMLInputElement>("digest-input").value = stored.digest;
    confirmBox.innerHTML = renderDigestConfirmation(
      stored.digest, stored.length, stored.digest === localDigest);
  } catch (error) {
    confirmBox.innerHTML = renderFormError(
      error instanceof ApiError ? error.code : "ConnectionFailed", String(error));
  }
}

// --- event submission --------------------------------------------------------

function clearFieldErrors(): void {
  for (const node of document.querySelectorAll(".field-error")) {
    node.innerHTML = "";
  }
}

async function handleSubmit(event: Event): Promise<void> {
  event.preventDefault();
  clearFieldErrors();
  const result = el<HTMLDivElement>("submit-result");
  const digest = el<HTMLInputElement>("digest-input").value.trim();
  if (!/^[0-9a-f]{64}$/.test(digest)) {
    el<HTMLDivElement>("err-digest-input").innerHTML = renderFormError(
      "BadRequest", "upload a file or paste a 64-hex digest first");
    return;
  }
  try {
    const key = await keyFromSeedHex(el<HTMLInputElement>("signing-key").value);
    const receipt = await api.submitEvent(key, {
      caseId: Number(el<HTMLSelectElement>("case-select").value),
      type: el<HTMLSelectElement>("type-select").value,
      description: el<HTMLTextAreaElement>("description").value,
      status: el<HTMLSelectElement>("status-select").value,
      hash: digest,
    }, Date.now());
    result.innerHTML = renderSubmitConfirmation({
      eventId: receipt.eventId ?? receipt.result,
      txId: receipt.txId,
      height: receipt.height,
    });
    // the table updates through the alert stream, not from this response
  } catch (error) {
    if (error instanceof ApiError) {
      const field = ERROR_FIELDS[error.code];
      const target = field ? el<HTMLDivElement>(`err-${field}`) : result;
      target.innerHTML = renderFormError(error.code, error.message);
    } else {
      result.innerHTML = renderFormError("ConnectionFailed", String(error));
    }
  }
}

// --- live alerts ----------------------------------------------------------------

function connectAlerts(): void {
  const feed = el<HTMLUListElement>("feed");
  const source = new EventSource("/v1/alerts");

  source.addEventListener("alert", async (message) => {
    reconnectDelayMs = 1_000;
    const alert = JSON.parse((message as MessageEvent).data) as AlertDoc;
    feed.insertAdjacentHTML("afterbegin", renderAlertEntry(alert));
    if (seqTracker.accept(alert.seq) === "gap") {
      seqTracker.reset();
      await refreshCases();       // missed notifications: full re-query
    } else if (alert.caseId !== undefined) {
      await refreshCases();
    }
    await refreshBadge();
  });

  source.addEventListener("overflow", async () => {
    source.close();
    seqTracker.reset();
    await refreshCases();
    connectAlerts();
  });

  source.onerror = () => {
    source.close();
    el<HTMLSpanElement>("badge").innerHTML = renderBadge("disconnected");
    setTimeout(() => {
      seqTracker.reset();
      void refreshCases().then(connectAlerts);
    }, reconnectDelayMs);
    reconnectDelayMs = Math.min(reconnectDelayMs * 2, 30_000);
  };
}

// --- boot ------------------------------------------------------------------------

export async function boot(): Promise<void> {
  el<HTMLDivElement>("cases").addEventListener("click", (event) => {
    const row = (event.target as HTMLElement).closest<HTMLElement>(".case-row");
    if (row) void showEvents(Number(row.dataset.caseId));
    const hash = (event.target as HTMLElement).closest<HTMLElement>("[data-hex]");
    if (hash) void navigator.clipboard.writeText(hash.dataset.hex ?? "");
  });
  document.body.addEventListener("click", (event) => {
    const hash = (event.target as HTMLElement).closest<HTMLElement>("[data-hex]");
    if (hash) void navigator.clipboard.writeText(hash.dataset.hex ?? "");
  });
  el<HTMLInputElement>("evidence-file").addEventListener("change",
    () => void handleUpload());
  el<HTMLFormElement>("event-form").addEventListener("submit",
    (e) => void handleSubmit(e));

  await loadMeta();
  await refreshCases();
  await refreshBadge();
  connectAlerts();
}

if (typeof document !== "undefined" && document.getElementById("cases")) {
  void boot();
}
