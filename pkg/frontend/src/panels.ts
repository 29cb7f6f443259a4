/**
 * The three console panels, rendered to plain text so any shell (terminal
 * now, a DOM mount later) can display them unchanged.
 */

import type { ConsoleSession } from "./session.js";

const pad = (value: unknown, width: number): string => String(value ?? "-").padEnd(width);

export const renderTelemetryPanel = (session: ConsoleSession): string => {
  const lines = [
    "== telemetry ==",
    `${pad("stream", 28)}${pad("last tick", 10)}${pad("seq", 7)}${pad("status", 11)}${pad("len", 6)}count`,
  ];
  const rows = [...session.telemetry.values()].sort((a, b) =>
    a.midName.localeCompare(b.midName),
  );
  for (const row of rows) {
    lines.push(
      `${pad(row.midName, 28)}${pad(row.lastTick, 10)}${pad(row.lastSeqCount, 7)}` +
        `${pad(row.lastStatus, 11)}${pad(row.lastLength, 6)}${row.count}` +
        (row.decodeFailures ? `  (+${row.decodeFailures} bad)` : ""),
    );
  }
  if (rows.length === 0) lines.push("(no records yet)");
  return lines.join("\n");
};

export const renderEventFeed = (session: ConsoleSession, limit = 20): string => {
  const interesting = session.log.filter((line) =>
    ["evs", "security", "banner", "warning", "error"].includes(line.kind),
  );
  const tail = interesting.slice(-limit);
  const lines = ["== events =="];
  for (const line of tail) {
    lines.push(`[${String(line.tick).padStart(5)}] ${line.text}`);
  }
  if (tail.length === 0) lines.push("(quiet)");
  return lines.join("\n");
};

export const renderCommandPanel = (session: ConsoleSession): string => {
  const lines = [
    "== operator ==",
    `connection: ${session.connection}   frames: ${session.framesApplied}` +
      (session.duplicatesDropped ? `   dupes dropped: ${session.duplicatesDropped}` : ""),
  ];
  for (const flag of session.pendingFlags) {
    const mark = flag.acknowledged ? "ok" : "..";
    lines.push(`flag [${mark}] tick ${flag.tick} ${flag.component} ${flag.note}`);
  }
  if (session.score) {
    const s = session.score;
    lines.push(
      `score: ${s.hits} hit(s), ${s.false_alarms} false alarm(s), ${s.misses} miss(es)`,
      `ground truth window: ${JSON.stringify(s.ground_truth_window)} on ${s.malicious_components.join(", ")}`,
    );
  }
  return lines.join("\n");
};

export const renderAll = (session: ConsoleSession): string =>
  [renderTelemetryPanel(session), renderEventFeed(session), renderCommandPanel(session)].join(
    "\n\n",
  );
