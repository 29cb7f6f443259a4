/**
 * Terminal shell for the console: renders the three panels on every
 * frame batch and accepts operator input on stdin.
 *
 *   cmd <enable|disable|request_hk|noop> <component>
 *   flag <tick> <component> [note...]
 *   quit
 *
 * Usage: node dist/tui.js [host] [port] [operator]
 */

import * as readline from "node:readline";

import { ConsoleClient } from "./client.js";
import { renderAll } from "./panels.js";
import { ConsoleSession } from "./session.js";
import type { OperatorVerb } from "./protocol.js";

const VERBS: OperatorVerb[] = ["enable", "disable", "request_hk", "noop"];

const main = async () => {
  const host = process.argv[2] ?? "127.0.0.1";
  const port = Number(process.argv[3] ?? 5050);
  const operator = process.argv[4] ?? "operator";

  const session = new ConsoleSession(operator);
  let dirty = false;
  const client = new ConsoleClient({
    host,
    port,
    session,
    onUpdate: () => {
      dirty = true;
    },
  });

  const repaint = () => {
    if (!dirty) return;
    dirty = false;
    console.clear();
    console.log(renderAll(session));
  };
  const painter = setInterval(repaint, 200);

  const rl = readline.createInterface({ input: process.stdin });
  rl.on("line", (line) => {
    const parts = line.trim().split(/\s+/);
    try {
      if (parts[0] === "cmd" && parts.length >= 2) {
        const verb = parts[1] as OperatorVerb;
        if (!VERBS.includes(verb)) throw new Error(`verb must be one of ${VERBS.join(", ")}`);
        client.sendCommand(verb, parts[2] ?? "");
      } else if (parts[0] === "flag" && parts.length >= 3) {
        client.flagAnomaly(Number(parts[1]), parts[2] ?? "", parts.slice(3).join(" "));
      } else if (parts[0] === "quit") {
        client.close();
        rl.close();
      } else if (parts[0]) {
        console.error(`unrecognized input: ${line}`);
      }
    } catch (err) {
      console.error(String(err));
    }
  });

  try {
    await client.run();
  } finally {
    clearInterval(painter);
    repaint();
    rl.close();
  }
  if (session.score) {
    console.log("\nsession complete.");
  }
};

main().catch((err) => {
  console.error(String(err));
  process.exit(1);
});
