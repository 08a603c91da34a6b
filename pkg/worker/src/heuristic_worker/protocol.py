"""Newline-delimited JSON protocol over stdin/stdout.

Requests: handshake (version check, mismatch aborts the process), load
(validate and compile a program), evaluate (run one full search), shutdown.
Every request line gets exactly one response line; anything unparseable or
out of order answers with error_code PROTOCOL. A wall-clock alarm guards
each evaluation at 1.2x the search timeout so a hanging score call turns
into a TIMEOUT answer instead of a dead worker; the orchestrator's own hard
kill sits above that at 1.5x.
"""

from __future__ import annotations

import json
import signal
import sys
from typing import Any, Callable

from . import PROTOCOL_VERSION
from .engine import EvaluationFailure, evaluate, state_from_instance
from .validate import ValidationFailure, load_program

PROTOCOL = "PROTOCOL"
TIMEOUT = "TIMEOUT"
ALARM_FACTOR = 1.2


class _EvaluationAlarm(Exception):
    pass


def _alarm_handler(signum, frame):
    raise _EvaluationAlarm()


class Session:
    def __init__(self) -> None:
        self.program: Callable[[Any], float] | None = None

    def handle(self, request: dict) -> tuple[dict, bool]:
        """Returns (response, should_exit)."""
        if not isinstance(request, dict):
            return {"ok": False, "error_code": PROTOCOL, "message": "request must be an object"}, False
        op = request.get("op")
        if op == "handshake":
            if request.get("version") != PROTOCOL_VERSION:
                return (
                    {
                        "ok": False,
                        "error_code": PROTOCOL,
                        "message": f"unsupported protocol version {request.get('version')!r}",
                    },
                    True,  # version mismatch aborts
                )
            return {"ok": True, "version": PROTOCOL_VERSION}, False
        if op == "load":
            return self._load(request), False
        if op == "evaluate":
            return self._evaluate(request), False
        if op == "shutdown":
            return {"ok": True}, True
        return {"ok": False, "error_code": PROTOCOL, "message": f"unknown op {op!r}"}, False

    def _load(self, request: dict) -> dict:
        code = request.get("code")
        if not isinstance(code, str):
            return {"ok": False, "error_code": PROTOCOL, "message": "load requires code text"}
        try:
            self.program = load_program(code)
        except ValidationFailure as failure:
            self.program = None
            return {"ok": False, "error_code": failure.error_code, "message": failure.message}
        return {"ok": True}

    def _evaluate(self, request: dict) -> dict:
        if self.program is None:
            return {"ok": False, "error_code": PROTOCOL, "message": "no program loaded"}
        try:
            problem, start = state_from_instance(request["instance"])
            limits = request["limits"]
            timeout_seconds = float(limits["timeout_seconds"])
            max_evaluated_nodes = int(limits["max_evaluated_nodes"])
            max_moves_penalty = int(limits["max_moves_penalty"])
            policy = request.get("policy", "paper")
            if policy not in ("paper", "strict"):
                raise ValueError(f"unknown policy {policy!r}")
        except (KeyError, TypeError, ValueError) as exc:
            return {"ok": False, "error_code": PROTOCOL, "message": f"bad evaluate request: {exc}"}

        previous = signal.signal(signal.SIGALRM, _alarm_handler)
        signal.setitimer(signal.ITIMER_REAL, timeout_seconds * ALARM_FACTOR)
        try:
            outcome = evaluate(
                self.program,
                problem,
                start,
                timeout_seconds,
                max_evaluated_nodes,
                max_moves_penalty,
                policy,
            )
        except EvaluationFailure as failure:
            return {"ok": False, "error_code": failure.error_code, "message": failure.message}
        except _EvaluationAlarm:
            return {
                "ok": False,
                "error_code": TIMEOUT,
                "message": f"evaluation exceeded {timeout_seconds * ALARM_FACTOR:.1f}s wall clock",
            }
        finally:
            signal.setitimer(signal.ITIMER_REAL, 0.0)
            signal.signal(signal.SIGALRM, previous)
        return {"ok": True, **outcome}


def serve(stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    session = Session()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            response, should_exit = (
                {"ok": False, "error_code": PROTOCOL, "message": f"malformed request: {exc}"},
                False,
            )
        else:
            response, should_exit = session.handle(request)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
        if should_exit:
            return 0
    return 0


def main() -> None:
    sys.exit(serve())


if __name__ == "__main__":
    main()
