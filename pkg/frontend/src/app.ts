/**
 * DOM shell: one WebSocket feed in, decorations out, prompt choices
 * posted back. All state lives in DashboardModel; this file only
 * renders it and schedules reconnects.
 */

import {
  DashboardModel,
  PROMPT_OPTIONS,
  PROMPT_TITLE,
  Region,
  backoffDelay,
} from "./model.js";
import { ActionRecord, decodeLine } from "./protocol.js";

const model = new DashboardModel();
let selectedMember: string | null = null;
let attempt = 0;

const banner = mustGet("banner");
const session = mustGet("session");
const tabs = mustGet("tabs");
const cards = mustGet("cards");
const modal = mustGet("modal");

function mustGet(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing #${id}`);
  }
  return el;
}

function connect(): void {
  const ws = new WebSocket(`ws://${location.host}/ws`);
  ws.onopen = () => {
    attempt = 0;
    banner.hidden = true;
    void model.flushActions(postAction);
  };
  ws.onmessage = (event) => {
    const msg = decodeLine(String(event.data));
    if (msg) {
      model.apply(msg);
      render();
    }
  };
  ws.onclose = () => {
    banner.hidden = false;
    const delay = backoffDelay(attempt);
    attempt += 1;
    banner.textContent = `connection lost, retrying in ${Math.round(delay / 1000)} s`;
    setTimeout(connect, delay);
  };
  ws.onerror = () => ws.close();
}

async function postAction(record: ActionRecord): Promise<boolean> {
  const res = await fetch("/actions", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(record),
  });
  return res.ok;
}

function render(): void {
  session.textContent = model.sessionId
    ? `session ${model.sessionId}`
    : "waiting for session";
  if (selectedMember === null || !model.members.includes(selectedMember)) {
    selectedMember = model.members[0] ?? null;
  }
  renderTabs();
  renderCards();
}

function renderTabs(): void {
  tabs.replaceChildren();
  for (const member of model.members) {
    const button = document.createElement("button");
    button.textContent = member;
    button.className = member === selectedMember ? "tab active" : "tab";
    button.onclick = () => {
      selectedMember = member;
      render();
    };
    tabs.append(button);
  }
}

function renderCards(): void {
  cards.replaceChildren();
  if (selectedMember === null) {
    cards.append(note("no members connected yet"));
    return;
  }
  const files = model.filesFor(selectedMember);
  if (files.length === 0) {
    cards.append(note("radar clear"));
    return;
  }
  for (const file of files) {
    const card = document.createElement("section");
    card.className = "card";
    const heading = document.createElement("h2");
    heading.textContent = file.filePath;
    card.append(heading);
    for (const region of file.regions) {
      card.append(renderRegion(region));
    }
    cards.append(card);
  }
}

function renderRegion(region: Region): HTMLElement {
  const row = document.createElement("div");
  row.className = "region";

  const where = document.createElement("span");
  where.className = "where";
  const s = region.span;
  where.textContent = `${s.startLine}:${s.startCol}-${s.endLine}:${s.endCol}`;
  row.append(where);

  const chip = document.createElement("span");
  chip.className = `chip ${region.severity.toLowerCase()}`;
  chip.textContent = region.pathId.split("/").slice(2).join("/");
  chip.title = `${region.severity}: ${region.kinds.join(", ")} (${region.authors.join(", ")})`;
  if (region.severity === "Conflict") {
    chip.classList.add("clickable");
    chip.onclick = () => openPrompt(region);
  }
  row.append(chip);
  return row;
}

function note(text: string): HTMLElement {
  const p = document.createElement("p");
  p.className = "note";
  p.textContent = text;
  return p;
}

function openPrompt(region: Region): void {
  modal.replaceChildren();
  const box = document.createElement("div");
  box.className = "prompt";

  const title = document.createElement("h3");
  title.textContent = PROMPT_TITLE;
  box.append(title);

  const detail = document.createElement("p");
  detail.textContent = `${region.pathId} (${region.authors.join(", ")})`;
  box.append(detail);

  for (const option of PROMPT_OPTIONS) {
    const button = document.createElement("button");
    button.textContent = option;
    button.onclick = () => {
      if (selectedMember !== null) {
        model.choose(selectedMember, region, option, Date.now());
        void model.flushActions(postAction);
      }
      modal.hidden = true;
      render();
    };
    box.append(button);
  }

  modal.append(box);
  modal.hidden = false;
  modal.onclick = (event) => {
    if (event.target === modal) {
      modal.hidden = true;
    }
  };
}

// Actions that failed while the server was unreachable retry quietly.
setInterval(() => {
  if (model.pendingActions.length > 0) {
    void model.flushActions(postAction);
  }
}, 5000);

render();
connect();
