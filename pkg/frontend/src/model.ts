/**
 * View model: the latest CONFLICTS payload projected into decorations,
 * plus dismissal state, the prompt log, and the outgoing action queue.
 *
 * Messages apply atomically and regions always derive from the most
 * recent CONFLICTS payload alone, so the decorated (span, severity)
 * set can never go stale. Dismissal is keyed by a content hash of the
 * whole report: an identical recomputed report stays hidden, any
 * change to its kinds, authors, severity, or span resurfaces it.
 */

import {
  ActionRecord,
  ConflictReport,
  FeedMessage,
  Severity,
  Span,
} from "./protocol.js";

export const PROMPT_TITLE = "How would you like to proceed?";

export const PROMPT_OPTIONS: readonly string[] = [
  "Talk to your teammate",
  "Ignore the whole thing",
  "Dismiss",
];

export const DISMISS_OPTION = "Dismiss";

export interface Region {
  pathId: string;
  filePath: string;
  span: Span;
  severity: Severity;
  kinds: string[];
  authors: string[];
  hash: string;
}

export interface FileView {
  filePath: string;
  regions: Region[];
}

export interface PromptEntry {
  pathId: string;
  chosenAction: string;
  atMillis: number;
}

/** Stable serialization: object keys sorted at every level. */
export function canonicalReport(report: ConflictReport): string {
  const sorter = (value: unknown): unknown => {
    if (Array.isArray(value)) {
      return value.map(sorter);
    }
    if (typeof value === "object" && value !== null) {
      const out: Record<string, unknown> = {};
      for (const key of Object.keys(value).sort()) {
        out[key] = sorter((value as Record<string, unknown>)[key]);
      }
      return out;
    }
    return value;
  };
  return JSON.stringify(sorter(report));
}

/** FNV-1a 32 over the canonical form, rendered as 8 hex digits. */
export function reportHash(report: ConflictReport): string {
  const text = canonicalReport(report);
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash.toString(16).padStart(8, "0");
}

/**
 * File segment of a rendered path id. The file part may span several
 * id segments (directories keep their separators), so take everything
 * after the project up to the first segment with a file extension.
 */
export function filePathOf(pathId: string): string {
  const segments = pathId.split("/");
  for (let i = 1; i < segments.length; i++) {
    if (/\.\w+$/.test(segments[i])) {
      return segments.slice(1, i + 1).join("/");
    }
  }
  return segments.length > 1 ? segments[1] : pathId;
}

/** True when no two regions of the same severity overlap byte-wise. */
export function noOverlapsWithinLayer(regions: readonly Region[]): boolean {
  for (const severity of ["Awareness", "Conflict"] as const) {
    const layer = regions
      .filter((r) => r.severity === severity)
      .slice()
      .sort((a, b) => a.span.startByte - b.span.startByte);
    for (let i = 1; i < layer.length; i++) {
      if (layer[i].span.startByte < layer[i - 1].span.endByte) {
        return false;
      }
    }
  }
  return true;
}

function toRegion(report: ConflictReport): Region {
  const kinds = Array.from(
    new Set([...report.remoteKinds, ...report.localKinds])
  ).sort();
  return {
    pathId: report.pathId,
    filePath: filePathOf(report.pathId),
    span: report.decorationSpan,
    severity: report.severity,
    kinds,
    authors: [...report.remoteAuthors].sort(),
    hash: reportHash(report),
  };
}

export class DashboardModel {
  sessionId = "";
  members: string[] = [];
  /** Latest CONFLICTS payload, verbatim. */
  reports = new Map<string, ConflictReport[]>();
  /** Content hashes the user chose to dismiss; kept for the session. */
  dismissed = new Set<string>();
  promptLog: PromptEntry[] = [];
  pendingActions: ActionRecord[] = [];

  apply(msg: FeedMessage): void {
    switch (msg.type) {
      case "WELCOME": {
        this.sessionId = msg.sessionId;
        for (const snap of msg.snapshot) {
          this.addMember(snap.author);
        }
        break;
      }
      case "BROADCAST": {
        this.addMember(msg.author);
        break;
      }
      case "REVERT": {
        this.addMember(msg.author);
        break;
      }
      case "CONFLICTS": {
        this.reports = new Map(Object.entries(msg.reports));
        for (const member of this.reports.keys()) {
          this.addMember(member);
        }
        break;
      }
    }
  }

  private addMember(name: string): void {
    if (!this.members.includes(name)) {
      this.members.push(name);
      this.members.sort();
    }
  }

  /** All regions for a member from the latest payload, dismissals applied. */
  regionsFor(member: string): Region[] {
    const raw = this.reports.get(member) ?? [];
    // Codepoint order, not localeCompare: card order must not depend
    // on the runtime's locale tables.
    return raw
      .map(toRegion)
      .filter((r) => !this.dismissed.has(r.hash))
      .sort((a, b) =>
        a.filePath !== b.filePath
          ? a.filePath < b.filePath
            ? -1
            : 1
          : a.span.startByte - b.span.startByte
      );
  }

  /** regionsFor grouped by file, for one card per file. */
  filesFor(member: string): FileView[] {
    const byFile = new Map<string, Region[]>();
    for (const region of this.regionsFor(member)) {
      const bucket = byFile.get(region.filePath);
      if (bucket) {
        bucket.push(region);
      } else {
        byFile.set(region.filePath, [region]);
      }
    }
    return Array.from(byFile, ([filePath, regions]) => ({ filePath, regions }));
  }

  /**
   * Record a prompt choice. Every choice lands in the prompt log and
   * the outgoing queue; Dismiss additionally hides the report until
   * its content changes.
   */
  choose(
    member: string,
    region: Region,
    action: string,
    atMillis: number
  ): ActionRecord {
    this.promptLog.push({ pathId: region.pathId, chosenAction: action, atMillis });
    if (action === DISMISS_OPTION) {
      this.dismissed.add(region.hash);
    }
    const record: ActionRecord = {
      member,
      pathId: region.pathId,
      action,
      atMillis,
    };
    this.pendingActions.push(record);
    return record;
  }

  /**
   * Send queued actions in order. Stops at the first failure and
   * keeps the remainder (including the failed one) for a later retry.
   */
  async flushActions(
    post: (record: ActionRecord) => Promise<boolean>
  ): Promise<void> {
    while (this.pendingActions.length > 0) {
      let ok: boolean;
      try {
        ok = await post(this.pendingActions[0]);
      } catch {
        ok = false;
      }
      if (!ok) {
        return;
      }
      this.pendingActions.shift();
    }
  }
}

const BACKOFF_BASE_MILLIS = 500;
const BACKOFF_CAP_MILLIS = 10_000;

/** Reconnect delay for the n-th consecutive failure (n starts at 0). */
export function backoffDelay(attempt: number): number {
  return Math.min(BACKOFF_CAP_MILLIS, BACKOFF_BASE_MILLIS * 2 ** attempt);
}
