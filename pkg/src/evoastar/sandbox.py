"""Orchestrator side of the evaluation-worker protocol.

The worker is a separate process speaking newline-delimited JSON over
stdin/stdout: handshake (protocol version "1"), load (structural validation
plus compile), evaluate (full search runs inside the worker), shutdown.
The orchestrator enforces a hard wall-clock kill at 1.5x the configured
search timeout and respawns the worker after any crash, so one misbehaving
program can never take the run down.
"""

from __future__ import annotations

import json
import select
import subprocess
from typing import Any

from .config import RunConfig
from .evolution import InvalidHeuristic, make_training_instances
from .fitness import InstanceResult
from .problems import get_problem
from .search import SearchLimits

PROTOCOL_VERSION = "1"
KILL_GRACE_FACTOR = 1.5


class WorkerProtocolError(RuntimeError):
    """The worker is unreachable or answered outside the protocol."""


class WorkerClient:
    def __init__(self, command: list[str] | tuple[str, ...]) -> None:
        if not command:
            raise WorkerProtocolError("no worker command configured")
        self.command = list(command)
        self._process: subprocess.Popen | None = None

    def _ensure_process(self) -> subprocess.Popen:
        if self._process is None or self._process.poll() is not None:
            self._process = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
            self._handshake()
        return self._process

    def _handshake(self) -> None:
        reply = self._roundtrip({"op": "handshake", "version": PROTOCOL_VERSION}, timeout=30.0)
        if not reply.get("ok") or reply.get("version") != PROTOCOL_VERSION:
            self.kill()
            raise WorkerProtocolError(f"handshake failed: {reply}")

    def _roundtrip(self, request: dict, timeout: float) -> dict:
        process = self._process
        if process is None or process.poll() is not None:
            raise WorkerProtocolError("worker process is not running")
        try:
            process.stdin.write(json.dumps(request) + "\n")
            process.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise WorkerProtocolError(f"cannot write to worker: {exc}") from exc
        ready, _, _ = select.select([process.stdout], [], [], timeout)
        if not ready:
            self.kill()
            raise WorkerProtocolError(f"worker did not answer within {timeout:.1f}s; killed")
        line = process.stdout.readline()
        if not line:
            self.kill()
            raise WorkerProtocolError("worker closed its output stream")
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            self.kill()
            raise WorkerProtocolError(f"worker sent malformed response: {line!r}") from exc

    def request(self, payload: dict, timeout: float = 60.0) -> dict:
        self._ensure_process()
        return self._roundtrip(payload, timeout)

    def kill(self) -> None:
        if self._process is not None:
            self._process.kill()
            self._process.wait()
            self._process = None

    def shutdown(self) -> None:
        if self._process is not None and self._process.poll() is None:
            try:
                self._roundtrip({"op": "shutdown"}, timeout=5.0)
            except WorkerProtocolError:
                pass
        self.kill()


class WorkerEvaluator:
    """Evaluation backend that hosts generated code in the worker process."""

    def __init__(self, config: RunConfig) -> None:
        spec = get_problem(config.problem)
        self.limits = config.limits
        self.policy = "paper"
        self.client = WorkerClient(config.evaluation.worker_command)
        training = make_training_instances(config)
        self.instances = [
            (seed, spec.make_record(state, seed, **config.instance_params))
            for seed, state, _ in training
        ]
        self.lower_bounds = {seed: lb for seed, _, lb in training}

    def _limits_payload(self) -> dict:
        return {
            "timeout_seconds": self.limits.timeout_seconds,
            "max_evaluated_nodes": self.limits.max_evaluated_nodes,
            "max_moves_penalty": self.limits.max_moves_penalty,
        }

    def evaluate(self, code: str) -> list[InstanceResult]:
        try:
            reply = self.client.request({"op": "load", "code": code}, timeout=30.0)
        except WorkerProtocolError as exc:
            raise InvalidHeuristic(f"worker load failed: {exc}") from exc
        if not reply.get("ok"):
            raise InvalidHeuristic(
                f"code rejected: {reply.get('error_code')}: {reply.get('message')}"
            )

        deadline = self.limits.timeout_seconds * KILL_GRACE_FACTOR + 5.0
        results = []
        for seed, record in self.instances:
            try:
                reply = self.client.request(
                    {
                        "op": "evaluate",
                        "instance": record,
                        "limits": self._limits_payload(),
                        "policy": self.policy,
                    },
                    timeout=deadline,
                )
            except WorkerProtocolError as exc:
                raise InvalidHeuristic(f"worker evaluation failed: {exc}") from exc
            if not reply.get("ok"):
                raise InvalidHeuristic(
                    f"evaluation failed on seed {seed}: "
                    f"{reply.get('error_code')}: {reply.get('message')}"
                )
            solved = bool(reply["solved"])
            results.append(
                InstanceResult(
                    instance_seed=seed,
                    moves=int(reply["moves_count"]) if solved else self.limits.max_moves_penalty,
                    lower_bound=self.lower_bounds[seed],
                    solved=solved,
                    evaluated_nodes=int(reply["evaluated_nodes"]),
                    elapsed_seconds=float(reply["elapsed_seconds"]),
                )
            )
        return results

    def close(self) -> None:
        self.client.shutdown()


def evaluate_code_on_instances(
    client: WorkerClient,
    code: str,
    records: list[dict],
    limits: SearchLimits,
    policy: str = "paper",
) -> list[dict[str, Any]]:
    """One-shot helper for benchmarking stored heuristics through a worker."""
    reply = client.request({"op": "load", "code": code}, timeout=30.0)
    if not reply.get("ok"):
        raise InvalidHeuristic(f"code rejected: {reply.get('error_code')}: {reply.get('message')}")
    deadline = limits.timeout_seconds * KILL_GRACE_FACTOR + 5.0
    limits_payload = {
        "timeout_seconds": limits.timeout_seconds,
        "max_evaluated_nodes": limits.max_evaluated_nodes,
        "max_moves_penalty": limits.max_moves_penalty,
    }
    replies = []
    for record in records:
        replies.append(
            client.request(
                {"op": "evaluate", "instance": record, "limits": limits_payload, "policy": policy},
                timeout=deadline,
            )
        )
    return replies
