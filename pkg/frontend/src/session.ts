/**
 * Console session state: everything the three panels render.
 *
 * Invariants the tests pin down:
 *  - frames are applied in (tick, seq) order and each event/ground_record
 *    lands in the log exactly once (duplicates from a resume replay are
 *    counted and dropped);
 *  - a seq gap is never silent: it becomes a visible warning line;
 *  - the session only ever holds operator-view data - the server never
 *    streams omniscient frames.
 */

import type {
  GroundRecordEntry,
  ScoreFrame,
  ServerFrame,
  ViewEntry,
} from "./protocol.js";

export type ConnectionState = "idle" | "connecting" | "live" | "reconnecting" | "closed";

export interface LogLine {
  tick: number;
  seq: number;
  kind: "record" | "evs" | "security" | "banner" | "ack" | "flag" | "warning" | "error" | "score";
  text: string;
}

export interface TelemetryRow {
  midName: string;
  mid: number | null;
  lastTick: number;
  lastSeqCount: number | null;
  lastStatus: string;
  lastLength: number;
  count: number;
  decodeFailures: number;
}

export interface PendingFlag {
  tick: number;
  component: string;
  note: string;
  acknowledged: boolean;
}

const renderEntryText = (entry: ViewEntry): string => {
  switch (entry.type) {
    case "ground_record":
      return entry.decode_status === "Ok"
        ? `TLM ${entry.mid_name ?? "?"} seq=${entry.seq_count} len=${entry.length}`
        : `TLM decode ${entry.decode_status} len=${entry.length}`;
    case "evs":
      return `EVS ${entry.app}: ${entry.text}`;
    case "security":
      return `SECURITY ${entry.kind} ${JSON.stringify(
        Object.fromEntries(
          Object.entries(entry).filter(([k]) => !["type", "tick", "seq", "kind"].includes(k)),
        ),
      )}`;
    case "banner":
      return `BANNER ${entry.text}`;
  }
};

export class ConsoleSession {
  readonly operator: string;
  connection: ConnectionState = "idle";
  lastSeq = -1;
  duplicatesDropped = 0;
  framesApplied = 0;
  log: LogLine[] = [];
  telemetry = new Map<string, TelemetryRow>();
  pendingFlags: PendingFlag[] = [];
  score: ScoreFrame | null = null;

  constructor(operator = "operator") {
    this.operator = operator;
  }

  /** Apply one frame; false means it was a duplicate and was dropped. */
  ingest(frame: ServerFrame): boolean {
    if (frame.type === "error") {
      // private response outside the replayable stream (seq -1): always shown
      this.log.push({
        tick: frame.tick,
        seq: frame.seq,
        kind: "error",
        text: `server error: ${frame.message}`,
      });
      return true;
    }
    if (frame.seq <= this.lastSeq) {
      this.duplicatesDropped += 1;
      return false;
    }
    if (frame.seq > this.lastSeq + 1) {
      this.log.push({
        tick: frame.tick,
        seq: frame.seq,
        kind: "warning",
        text: `missed frames seq ${this.lastSeq + 1}..${frame.seq - 1}`,
      });
    }
    this.lastSeq = frame.seq;
    this.framesApplied += 1;
    switch (frame.type) {
      case "ground_record":
        this.applyRecord(frame.tick, frame.seq, frame.record);
        break;
      case "event":
        this.log.push({
          tick: frame.tick,
          seq: frame.seq,
          kind: frame.entry.type,
          text: renderEntryText(frame.entry),
        });
        break;
      case "command":
        this.log.push({
          tick: frame.tick,
          seq: frame.seq,
          kind: "ack",
          text: `ack ${frame.verb} ${frame.target} @tick ${frame.tick}`,
        });
        break;
      case "flag": {
        const pending = this.pendingFlags.find(
          (f) => !f.acknowledged && f.tick === frame.flag_tick && f.component === frame.component,
        );
        if (pending) pending.acknowledged = true;
        this.log.push({
          tick: frame.tick,
          seq: frame.seq,
          kind: "flag",
          text: `flag recorded: tick ${frame.flag_tick} ${frame.component}`,
        });
        break;
      }
      case "score":
        this.score = frame;
        this.log.push({
          tick: frame.tick,
          seq: frame.seq,
          kind: "score",
          text: `score hits=${frame.hits} false_alarms=${frame.false_alarms} misses=${frame.misses}`,
        });
        break;
    }
    return true;
  }

  private applyRecord(tick: number, seq: number, record: GroundRecordEntry) {
    const key = record.mid_name ?? `raw:${record.mid ?? "?"}`;
    const row = this.telemetry.get(key) ?? {
      midName: key,
      mid: record.mid,
      lastTick: tick,
      lastSeqCount: record.seq_count,
      lastStatus: record.decode_status,
      lastLength: record.length,
      count: 0,
      decodeFailures: 0,
    };
    row.lastTick = tick;
    row.lastSeqCount = record.seq_count;
    row.lastStatus = record.decode_status;
    row.lastLength = record.length;
    row.count += 1;
    if (record.decode_status !== "Ok") row.decodeFailures += 1;
    this.telemetry.set(key, row);
    this.log.push({
      tick,
      seq,
      kind: "record",
      text: renderEntryText(record),
    });
  }

  noteLocalFlag(tick: number, component: string, note: string) {
    this.pendingFlags.push({ tick, component, note, acknowledged: false });
  }

  noteBadLine(line: string) {
    this.log.push({
      tick: -1,
      seq: this.lastSeq,
      kind: "warning",
      text: `unparseable line from server: ${line.slice(0, 80)}`,
    });
  }
}
