"""Stdio worker process hosting generated score_state programs.

Speaks newline-delimited JSON (protocol version 1) and runs complete search
evaluations in-process so the orchestrator never executes untrusted code.
"""

PROTOCOL_VERSION = "1"
