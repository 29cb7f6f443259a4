"""Live operator-console bridge.

Serves a paced simulation over a plain TCP socket speaking
newline-delimited JSON frames. Outbound frame types: event,
ground_record, command (ack), flag (ack), score, error; every frame
carries tick and seq (a server-side frame counter, independent of the
omniscient log). Inbound: command, flag, resume.

The tick loop owns all simulation state. Client reader threads only push
parsed frames onto a queue that the loop drains at tick boundaries, so a
served run with no operator input is byte-for-byte the batch run.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
import time

from .config import ScenarioConfig
from .events import OPERATOR_VISIBLE_CHANNELS
from .orchestrate import RunController, RunResult
from .reports import view_entry

OPERATOR_VERBS = ("enable", "disable", "request_hk", "noop")


def _normalize_component(name: str) -> str:
    return name.strip().lower().replace(" ", "_")


class _Client:
    def __init__(self, sock: socket.socket):
        self.sock = sock
        self.alive = True

    def send(self, frame: dict):
        if not self.alive:
            return
        try:
            self.sock.sendall(json.dumps(frame).encode() + b"\n")
        except OSError:
            self.alive = False


class ConsoleServer:
    def __init__(self, config: ScenarioConfig, host: str = "127.0.0.1", port: int = 5050):
        self.config = config
        self.controller = RunController(config)
        self.listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self.listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self.listener.bind((host, port))
        self.listener.listen(8)
        self.port = self.listener.getsockname()[1]
        self.clients: list[_Client] = []
        self.inbound: queue.Queue = queue.Queue()
        self.frames: list[dict] = []
        self.flags: list[dict] = []
        self._accepting = True
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)

    # -- networking ----------------------------------------------------------

    def _accept_loop(self):
        while self._accepting:
            try:
                sock, _ = self.listener.accept()
            except OSError:
                return
            client = _Client(sock)
            self.clients.append(client)
            threading.Thread(target=self._reader_loop, args=(client,), daemon=True).start()

    def _reader_loop(self, client: _Client):
        buffer = b""
        while client.alive:
            try:
                chunk = client.sock.recv(4096)
            except OSError:
                break
            if not chunk:
                break
            buffer += chunk
            while b"\n" in buffer:
                line, buffer = buffer.split(b"\n", 1)
                if line.strip():
                    self.inbound.put((client, line))
        client.alive = False

    def _broadcast(self, frame: dict):
        self.frames.append(frame)
        for client in self.clients:
            client.send(frame)

    def _next_seq(self) -> int:
        return len(self.frames)

    # -- inbound handling ------------------------------------------------------

    def _drain_inbound(self):
        while True:
            try:
                client, line = self.inbound.get_nowait()
            except queue.Empty:
                return
            try:
                frame = json.loads(line)
                if not isinstance(frame, dict):
                    raise ValueError("frame must be an object")
            except (json.JSONDecodeError, ValueError) as exc:
                client.send(self._error_frame(f"malformed frame: {exc}"))
                continue
            self._handle_frame(client, frame)

    def _handle_frame(self, client: _Client, frame: dict):
        tick = self.controller.sim.clock.tick
        kind = frame.get("type")
        if kind == "resume":
            from_seq = frame.get("from_seq", -1)
            if not isinstance(from_seq, int):
                client.send(self._error_frame("resume.from_seq must be an integer"))
                return
            for buffered in self.frames:
                if buffered["seq"] > from_seq:
                    client.send(buffered)
        elif kind == "command":
            verb = frame.get("verb")
            target = frame.get("target", "")
            ok = verb in OPERATOR_VERBS and self.controller.enqueue_command(verb, target)
            if ok:
                # applied at the upcoming tick boundary
                ack = {
                    "type": "command", "tick": tick + 1, "seq": self._next_seq(),
                    "verb": verb, "target": target, "status": "applied",
                }
                self._broadcast(ack)
            else:
                client.send(self._error_frame(f"rejected command {verb!r} -> {target!r}"))
        elif kind == "flag":
            flag_tick = frame.get("tick")
            component = frame.get("component", "")
            if not isinstance(flag_tick, int):
                client.send(self._error_frame("flag.tick must be an integer"))
                return
            flag = {
                "tick": flag_tick,
                "component": _normalize_component(str(component)),
                "note": str(frame.get("note", "")),
            }
            self.flags.append(flag)
            self._broadcast(
                {
                    "type": "flag", "tick": tick, "seq": self._next_seq(),
                    "flag_tick": flag_tick, "component": flag["component"],
                    "status": "recorded",
                }
            )
        else:
            client.send(self._error_frame(f"unknown frame type {kind!r}"))

    def _error_frame(self, message: str) -> dict:
        # errors are private responses, not part of the replayable stream:
        # they carry seq -1 so clients never count them for dedup/gap logic
        return {
            "type": "error",
            "tick": self.controller.sim.clock.tick,
            "seq": -1,
            "message": message,
        }

    # -- run loop --------------------------------------------------------------

    def serve(self) -> RunResult:
        self._accept_thread.start()
        tps = self.config.ticks_per_second
        period = (1.0 / tps) if tps > 0 else 0.0
        next_deadline = time.monotonic()
        try:
            for _ in range(self.config.run_ticks):
                if period:
                    next_deadline += period
                    delay = next_deadline - time.monotonic()
                    if delay > 0:
                        time.sleep(delay)
                self._drain_inbound()
                events = self.controller.step()
                for event in events:
                    if event.channel not in OPERATOR_VISIBLE_CHANNELS:
                        continue
                    entry = view_entry(event)
                    if entry["type"] == "ground_record":
                        frame = {
                            "type": "ground_record", "tick": event.tick,
                            "seq": self._next_seq(), "record": entry,
                        }
                    else:
                        frame = {
                            "type": "event", "tick": event.tick,
                            "seq": self._next_seq(), "entry": entry,
                        }
                    self._broadcast(frame)
            self._drain_inbound()
            score = self._score()
            self._broadcast(
                {
                    "type": "score", "tick": self.controller.sim.clock.tick,
                    "seq": self._next_seq(), **score,
                }
            )
            return self.controller.finish(score=score)
        finally:
            self.close()

    def _score(self) -> dict:
        """Compare operator flags against the malicious ground truth."""
        summary = self.controller.summarize()
        malicious = set(summary.malicious_components)
        window = (summary.first_activity_tick, summary.last_activity_tick)
        hits = 0
        false_alarms = 0
        for flag in self.flags:
            in_window = (
                window[0] is not None
                and window[0] <= flag["tick"] <= (window[1] if window[1] is not None else flag["tick"])
            )
            if flag["component"] in malicious and in_window:
                hits += 1
            else:
                false_alarms += 1
        attack_present = self.config.scenario != 0 and window[0] is not None
        return {
            "hits": hits,
            "false_alarms": false_alarms,
            "misses": 1 if (attack_present and hits == 0) else 0,
            "ground_truth_window": list(window),
            "malicious_components": sorted(malicious),
            "flags": list(self.flags),
        }

    def close(self):
        self._accepting = False
        try:
            self.listener.close()
        except OSError:
            pass
        for client in self.clients:
            client.alive = False
            try:
                client.sock.close()
            except OSError:
                pass


def serve(config: ScenarioConfig, host: str = "127.0.0.1", port: int = 5050) -> RunResult:
    return ConsoleServer(config, host, port).serve()
