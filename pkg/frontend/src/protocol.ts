/**
 * Frame protocol for the live simulation stream: newline-delimited JSON
 * over a persistent bidirectional connection. Every server frame carries
 * `tick` and `seq` (contiguous from 0); clients dedup and gap-detect on
 * `seq`.
 */

export type DecodeStatus = "Ok" | "Truncated" | "BadLength" | "EmptyPayload";

export interface GroundRecordEntry {
  type: "ground_record";
  tick: number;
  seq: number;
  decode_status: DecodeStatus;
  mid: number | null;
  mid_name: string | null;
  seq_count: number | null;
  length: number;
}

export interface EvsEntry {
  type: "evs";
  tick: number;
  seq: number;
  app: string;
  text: string;
}

export interface SecurityEntry {
  type: "security";
  tick: number;
  seq: number;
  kind: string;
  [detail: string]: unknown;
}

export interface BannerEntry {
  type: "banner";
  tick: number;
  seq: number;
  text: string;
}

export type ViewEntry = GroundRecordEntry | EvsEntry | SecurityEntry | BannerEntry;

export interface EventFrame {
  type: "event";
  tick: number;
  seq: number;
  entry: EvsEntry | SecurityEntry | BannerEntry;
}

export interface GroundRecordFrame {
  type: "ground_record";
  tick: number;
  seq: number;
  record: GroundRecordEntry;
}

export interface CommandAckFrame {
  type: "command";
  tick: number;
  seq: number;
  verb: string;
  target: string;
  status: "applied";
}

export interface FlagAckFrame {
  type: "flag";
  tick: number;
  seq: number;
  flag_tick: number;
  component: string;
  status: "recorded";
}

export interface ScoreFrame {
  type: "score";
  tick: number;
  seq: number;
  hits: number;
  false_alarms: number;
  misses: number;
  ground_truth_window: [number | null, number | null];
  malicious_components: string[];
  flags: Array<{ tick: number; component: string; note: string }>;
}

export interface ErrorFrame {
  type: "error";
  tick: number;
  seq: number;
  message: string;
}

export type ServerFrame =
  | EventFrame
  | GroundRecordFrame
  | CommandAckFrame
  | FlagAckFrame
  | ScoreFrame
  | ErrorFrame;

export type OperatorVerb = "enable" | "disable" | "request_hk" | "noop";

export type ClientFrame =
  | { type: "command"; verb: OperatorVerb; target: string }
  | { type: "flag"; tick: number; component: string; note: string }
  | { type: "resume"; from_seq: number };

const SERVER_FRAME_TYPES = new Set([
  "event",
  "ground_record",
  "command",
  "flag",
  "score",
  "error",
]);

/** Narrow an arbitrary parsed object into a ServerFrame, or null. */
export const parseServerFrame = (raw: unknown): ServerFrame | null => {
  if (typeof raw !== "object" || raw === null) return null;
  const obj = raw as Record<string, unknown>;
  if (typeof obj.type !== "string" || !SERVER_FRAME_TYPES.has(obj.type)) return null;
  if (typeof obj.tick !== "number" || typeof obj.seq !== "number") return null;
  return obj as unknown as ServerFrame;
};

export const encodeClientFrame = (frame: ClientFrame): string =>
  `${JSON.stringify(frame)}\n`;

/**
 * Incremental ndjson splitter. Malformed lines are reported, never
 * swallowed silently.
 */
export const createFrameParser = (
  onFrame: (frame: ServerFrame) => void,
  onBadLine: (line: string) => void = () => {},
) => {
  let buffer = "";
  return {
    feed(chunk: string | Buffer) {
      buffer += chunk.toString();
      for (;;) {
        const idx = buffer.indexOf("\n");
        if (idx === -1) return;
        const line = buffer.slice(0, idx);
        buffer = buffer.slice(idx + 1);
        const trimmed = line.trim();
        if (!trimmed) continue;
        let frame: ServerFrame | null = null;
        try {
          frame = parseServerFrame(JSON.parse(trimmed));
        } catch {
          frame = null;
        }
        if (frame === null) onBadLine(trimmed);
        else onFrame(frame);
      }
    },
    flush() {
      const trimmed = buffer.trim();
      buffer = "";
      if (!trimmed) return;
      try {
        const frame = parseServerFrame(JSON.parse(trimmed));
        if (frame) onFrame(frame);
        else onBadLine(trimmed);
      } catch {
        onBadLine(trimmed);
      }
    },
  };
};
