/**
 * TCP client for the frame stream, with bounded-backoff reconnect and
 * seq-based resume, so a console that drops mid-run recovers its backlog
 * without rendering anything twice.
 */

import * as net from "node:net";

import {
  createFrameParser,
  encodeClientFrame,
  type ClientFrame,
  type OperatorVerb,
  type ServerFrame,
} from "./protocol.js";
import { ConsoleSession } from "./session.js";

export interface ClientOptions {
  host: string;
  port: number;
  session: ConsoleSession;
  maxRetries?: number;
  baseDelayMs?: number;
  maxDelayMs?: number;
  onUpdate?: (frame: ServerFrame) => void;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class ConsoleClient {
  private readonly opts: Required<Omit<ClientOptions, "onUpdate">> & {
    onUpdate?: (frame: ServerFrame) => void;
  };
  private socket: net.Socket | null = null;
  private closed = false;

  constructor(options: ClientOptions) {
    this.opts = {
      maxRetries: 5,
      baseDelayMs: 100,
      maxDelayMs: 2000,
      ...options,
    };
  }

  get session(): ConsoleSession {
    return this.opts.session;
  }

  /** Resolves once the score frame lands or the stream is over/for good. */
  async run(): Promise<void> {
    const session = this.opts.session;
    let attempt = 0;
    let everConnected = false;
    while (!this.closed && session.score === null) {
      session.connection = everConnected ? "reconnecting" : "connecting";
      try {
        await this.connectOnce(everConnected ? session.lastSeq : null);
        everConnected = true;
        attempt = 0; // a successful connection resets the backoff budget
        if (session.score !== null) break;
      } catch {
        // fall through to retry accounting
      }
      if (this.closed || session.score !== null) break;
      attempt += 1;
      if (attempt > this.opts.maxRetries) {
        session.connection = "closed";
        throw new Error(
          `gave up after ${this.opts.maxRetries} reconnect attempts to ${this.opts.host}:${this.opts.port}`,
        );
      }
      const delay = Math.min(this.opts.baseDelayMs * 2 ** (attempt - 1), this.opts.maxDelayMs);
      await sleep(delay);
    }
    session.connection = "closed";
  }

  private connectOnce(resumeFrom: number | null): Promise<void> {
    return new Promise((resolve, reject) => {
      const session = this.opts.session;
      const socket = net.createConnection({ host: this.opts.host, port: this.opts.port });
      this.socket = socket;
      const parser = createFrameParser(
        (frame) => {
          if (session.ingest(frame)) this.opts.onUpdate?.(frame);
          if (frame.type === "score") {
            socket.end();
          }
        },
        (line) => session.noteBadLine(line),
      );
      socket.once("connect", () => {
        session.connection = "live";
        if (resumeFrom !== null) {
          socket.write(encodeClientFrame({ type: "resume", from_seq: resumeFrom }));
        }
      });
      socket.on("data", (chunk) => parser.feed(chunk));
      socket.once("error", (err) => {
        this.socket = null;
        reject(err);
      });
      socket.once("close", () => {
        this.socket = null;
        resolve();
      });
    });
  }

  private send(frame: ClientFrame) {
    if (this.socket === null) throw new Error("not connected");
    this.socket.write(encodeClientFrame(frame));
  }

  sendCommand(verb: OperatorVerb, target: string) {
    this.send({ type: "command", verb, target });
  }

  flagAnomaly(tick: number, component: string, note = "") {
    this.opts.session.noteLocalFlag(tick, component, note);
    this.send({ type: "flag", tick, component, note });
  }

  close() {
    this.closed = true;
    this.socket?.destroy();
    this.socket = null;
  }
}
