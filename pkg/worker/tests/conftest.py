from __future__ import annotations

import json
import subprocess
import sys

import pytest

WORKER_CMD = [sys.executable, "-m", "heuristic_worker"]


class WorkerHarness:
    """Minimal line-oriented driver for a live worker process."""

    def __init__(self) -> None:
        self.process = subprocess.Popen(
            WORKER_CMD,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def send_line(self, line: str) -> dict:
        self.process.stdin.write(line + "\n")
        self.process.stdin.flush()
        reply = self.process.stdout.readline()
        assert reply, "worker closed its output stream"
        return json.loads(reply)

    def request(self, payload: dict) -> dict:
        return self.send_line(json.dumps(payload))

    def handshake(self, version: str = "1") -> dict:
        return self.request({"op": "handshake", "version": version})

    def load(self, code: str) -> dict:
        return self.request({"op": "load", "code": code})

    def evaluate(self, instance: dict, limits: dict | None = None, policy: str = "paper") -> dict:
        return self.request(
            {
                "op": "evaluate",
                "instance": instance,
                "limits": limits
                or {"timeout_seconds": 10.0, "max_evaluated_nodes": 50000, "max_moves_penalty": 100},
                "policy": policy,
            }
        )

    def alive(self) -> bool:
        return self.process.poll() is None

    def close(self) -> None:
        if self.alive():
            try:
                self.process.stdin.write('{"op": "shutdown"}\n')
                self.process.stdin.flush()
            except (BrokenPipeError, OSError):
                pass
            try:
                self.process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.process.kill()
        self.process.stdin.close()
        self.process.stdout.close()


@pytest.fixture
def worker():
    harness = WorkerHarness()
    yield harness
    harness.close()


UPMP_INSTANCE = {
    "problem": "upmp",
    "seed": 0,
    "depth": 3,
    "num_classes": 3,
    "lanes": [[0, 2, 1], [0, 0, 3], [0, 1, 2]],
}
