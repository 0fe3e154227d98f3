/** Page wiring: topology panel, probe form with dry-run validation,
 * result cards, and a history list whose entries can be cloned back
 * into the form.  All data comes from the HTTP service. */

import { ApiClient, ApiError, ProbeFormState, buildRequestBody, cloneRequest } from "./api.js";
import { renderTopology, renderTreeCard } from "./render.js";
import { topologyModel } from "./topology.js";
import type { ProbeHistoryEntry, TopologyDoc } from "./types.js";

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function setStatus(text: string, isError = false): void {
  const bar = el<HTMLElement>("status-bar");
  bar.textContent = text;
  bar.classList.toggle("error", isError);
}

function readForm(): ProbeFormState {
  const selected = [...el<HTMLSelectElement>("sources").selectedOptions].map((o) => o.value);
  return {
    sources: selected,
    filter: el<HTMLInputElement>("filter").value,
    backend: el<HTMLSelectElement>("backend").value === "log" ? "log" : "simulate",
    log: el<HTMLTextAreaElement>("log-input").value,
  };
}

function writeForm(form: ProbeFormState): void {
  const sources = el<HTMLSelectElement>("sources");
  for (const opt of sources.options) {
    opt.selected = form.sources.includes(opt.value);
  }
  el<HTMLInputElement>("filter").value = form.filter;
  el<HTMLSelectElement>("backend").value = form.backend;
  el<HTMLTextAreaElement>("log-input").value = form.log;
  syncBackendUi();
}

function syncBackendUi(): void {
  const isLog = el<HTMLSelectElement>("backend").value === "log";
  el<HTMLElement>("log-field").hidden = !isLog;
}

async function loadTopology(): Promise<TopologyDoc | null> {
  try {
    const doc = await api.getTopology();
    const panel = el<HTMLElement>("topology-panel");
    panel.replaceChildren(renderTopology(topologyModel(doc)));
    const sources = el<HTMLSelectElement>("sources");
    sources.replaceChildren(
      ...doc.hosts.map((h) => {
        const opt = document.createElement("option");
        opt.value = h;
        opt.textContent = h;
        return opt;
      }),
    );
    if (sources.options.length > 0) (sources.options[0] as HTMLOptionElement).selected = true;
    return doc;
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      setStatus("no topology loaded on the service yet", true);
    } else {
      setStatus(`topology: ${(err as Error).message}`, true);
    }
    return null;
  }
}

let dryRunTimer: ReturnType<typeof setTimeout> | null = null;

function scheduleDryRun(): void {
  if (dryRunTimer !== null) clearTimeout(dryRunTimer);
  dryRunTimer = setTimeout(runDryRun, 250);
}

async function runDryRun(): Promise<void> {
  const filter = el<HTMLInputElement>("filter").value.trim();
  const hint = el<HTMLElement>("filter-hint");
  const submit = el<HTMLButtonElement>("submit");
  if (filter === "") {
    hint.textContent = "all headers free — add field constraints";
  }
  try {
    const res = await api.dryRun(filter);
    hint.textContent = `${res.free_bits} free bit(s)`;
    hint.classList.remove("error");
    submit.disabled = false;
  } catch (err) {
    hint.textContent = err instanceof ApiError ? err.message : String(err);
    hint.classList.add("error");
    submit.disabled = true;
  }
}

let inFlight = false;

async function submitProbe(ev: Event): Promise<void> {
  ev.preventDefault();
  if (inFlight) return;
  const form = readForm();
  if (form.sources.length === 0) {
    setStatus("pick at least one source host", true);
    return;
  }
  inFlight = true;
  el<HTMLButtonElement>("submit").disabled = true;
  setStatus("running discovery…");
  try {
    const result = await api.discover(buildRequestBody(form));
    const panel = el<HTMLElement>("results");
    panel.replaceChildren(...result.cases.map(renderTreeCard));
    const bad = result.cases.filter((c) => c.status !== "ok").length;
    setStatus(
      bad === 0
        ? `${result.cases.length} probe(s), all paths ok`
        : `${result.cases.length} probe(s), ${bad} with problems`,
      bad > 0,
    );
    await refreshHistory();
  } catch (err) {
    setStatus(err instanceof ApiError ? err.message : String(err), true);
  } finally {
    inFlight = false;
    el<HTMLButtonElement>("submit").disabled = false;
  }
}

async function refreshHistory(): Promise<void> {
  try {
    const { probes } = await api.probes();
    const list = el<HTMLElement>("history");
    list.replaceChildren(
      ...[...probes].reverse().map((entry) => historyRow(entry)),
    );
  } catch {
    // history is best-effort; leave the panel as is
  }
}

function historyRow(entry: ProbeHistoryEntry): HTMLElement {
  const li = document.createElement("li");
  li.className = `history-row status-${entry.case.status}`;
  const label = document.createElement("span");
  label.textContent = `${entry.case.uid.slice(0, 8)} · ${entry.case.host} · ${entry.case.status}`;
  const clone = document.createElement("button");
  clone.type = "button";
  clone.textContent = "clone";
  clone.addEventListener("click", () => {
    writeForm(cloneRequest(entry));
    void runDryRun();
  });
  const show = document.createElement("button");
  show.type = "button";
  show.textContent = "view";
  show.addEventListener("click", () => {
    el<HTMLElement>("results").replaceChildren(renderTreeCard(entry.case));
  });
  li.append(label, show, clone);
  return li;
}

export async function start(): Promise<void> {
  el<HTMLFormElement>("probe-form").addEventListener("submit", submitProbe);
  el<HTMLInputElement>("filter").addEventListener("input", scheduleDryRun);
  el<HTMLSelectElement>("backend").addEventListener("change", syncBackendUi);
  syncBackendUi();
  const topo = await loadTopology();
  if (topo) setStatus(`${topo.hosts.length} hosts, ${topo.switches.length} switches`);
  await runDryRun();
  await refreshHistory();
}

if (typeof document !== "undefined" && document.getElementById("probe-form")) {
  void start();
}
