/**
 * Wire shapes for the dashboard feed, as documented in protocol.md.
 *
 * The WebSocket at /ws delivers one JSON object per text frame. The
 * dashboard consumes WELCOME, BROADCAST, REVERT, and CONFLICTS;
 * anything else on the feed is ignored so newer servers stay
 * compatible.
 */

export type Severity = "Awareness" | "Conflict";

export interface Span {
  startByte: number;
  endByte: number;
  startLine: number;
  startCol: number;
  endLine: number;
  endCol: number;
}

export interface ConflictReport {
  pathId: string;
  severity: Severity;
  localKinds: string[];
  remoteAuthors: string[];
  remoteKinds: string[];
  decorationSpan: Span;
}

export interface ChangeSetWire {
  author: string;
  baseRevision: number;
  changes: unknown[];
}

export interface MemberSnapshotWire extends ChangeSetWire {
  maxSeq: number;
}

export interface WelcomeMsg {
  type: "WELCOME";
  sessionId: string;
  snapshot: MemberSnapshotWire[];
}

export interface BroadcastMsg {
  type: "BROADCAST";
  author: string;
  changeSetDelta: ChangeSetWire;
}

export interface RevertMsg {
  type: "REVERT";
  author: string;
  filePath: string;
}

export interface ConflictsMsg {
  type: "CONFLICTS";
  reports: Record<string, ConflictReport[]>;
}

export type FeedMessage = WelcomeMsg | BroadcastMsg | RevertMsg | ConflictsMsg;

const FEED_TYPES = new Set(["WELCOME", "BROADCAST", "REVERT", "CONFLICTS"]);

/** Parse one feed line; null for non-JSON, non-object, or foreign types. */
export function decodeLine(line: string): FeedMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    return null;
  }
  const type = (obj as { type?: unknown }).type;
  if (typeof type !== "string" || !FEED_TYPES.has(type)) {
    return null;
  }
  return obj as FeedMessage;
}

/** Body shape for POST /actions. */
export interface ActionRecord {
  member: string;
  pathId: string;
  action: string;
  atMillis: number;
}
