"""Authoritative structural screening and compilation of submitted programs.

The rules mirror the constraints stated in the generation prompts: a single
function named score_state taking one argument, no imports, no while loops,
no nested or additional definitions, no randomness. Execution happens in a
namespace holding only a fixed whitelist of builtins, so the program has no
path to files, sockets, or processes.
"""

from __future__ import annotations

import ast
import builtins
from typing import Any, Callable

SYNTAX = "SYNTAX"
FORBIDDEN_CONSTRUCT = "FORBIDDEN_CONSTRUCT"
BAD_SIGNATURE = "BAD_SIGNATURE"

_RANDOM_TOKENS = frozenset(
    {
        "random",
        "randint",
        "randrange",
        "shuffle",
        "choice",
        "choices",
        "uniform",
        "gauss",
        "normalvariate",
        "getrandbits",
    }
)

_ALLOWED_BUILTIN_NAMES = (
    "abs",
    "all",
    "any",
    "bool",
    "dict",
    "divmod",
    "enumerate",
    "filter",
    "float",
    "frozenset",
    "int",
    "isinstance",
    "len",
    "list",
    "map",
    "max",
    "min",
    "pow",
    "range",
    "reversed",
    "round",
    "set",
    "sorted",
    "str",
    "sum",
    "tuple",
    "zip",
)


class ValidationFailure(Exception):
    def __init__(self, error_code: str, message: str) -> None:
        super().__init__(message)
        self.error_code = error_code
        self.message = message


def _screen(code: str) -> None:
    try:
        tree = ast.parse(code)
    except SyntaxError as exc:
        raise ValidationFailure(SYNTAX, f"syntax error: {exc}") from exc

    top_defs = [n for n in tree.body if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))]
    if not top_defs:
        raise ValidationFailure(BAD_SIGNATURE, "no function definition found")
    if top_defs[0].name != "score_state":
        raise ValidationFailure(
            BAD_SIGNATURE, f"function must be named score_state, found {top_defs[0].name!r}"
        )
    args = top_defs[0].args
    arity = len(args.args) + len(args.posonlyargs)
    if arity != 1 or args.vararg or args.kwarg or args.kwonlyargs:
        raise ValidationFailure(BAD_SIGNATURE, "score_state must take exactly one argument")
    if len(top_defs) > 1:
        raise ValidationFailure(
            FORBIDDEN_CONSTRUCT,
            f"additional definitions are not allowed: {[d.name for d in top_defs[1:]]}",
        )

    for node in ast.walk(tree):
        if isinstance(node, (ast.Import, ast.ImportFrom)):
            raise ValidationFailure(FORBIDDEN_CONSTRUCT, "import statements are not allowed")
        if isinstance(node, ast.While):
            raise ValidationFailure(FORBIDDEN_CONSTRUCT, "'while' loops are not allowed")
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node not in tree.body:
            raise ValidationFailure(
                FORBIDDEN_CONSTRUCT, f"nested definition {node.name!r} is not allowed"
            )
        if isinstance(node, ast.Name) and node.id in _RANDOM_TOKENS:
            raise ValidationFailure(
                FORBIDDEN_CONSTRUCT, f"randomness identifier {node.id!r} is not allowed"
            )
        if isinstance(node, ast.Attribute) and node.attr in _RANDOM_TOKENS:
            raise ValidationFailure(
                FORBIDDEN_CONSTRUCT, f"randomness identifier {node.attr!r} is not allowed"
            )


def load_program(code: str) -> Callable[[Any], float]:
    """Screen, compile and return the score_state callable."""
    _screen(code)
    namespace: dict[str, Any] = {
        "__builtins__": {name: getattr(builtins, name) for name in _ALLOWED_BUILTIN_NAMES}
    }
    try:
        exec(compile(code, "<score_state>", "exec"), namespace)  # noqa: S102 - screened
    except Exception as exc:
        raise ValidationFailure(SYNTAX, f"program failed to load: {exc!r}") from exc
    fn = namespace.get("score_state")
    if not callable(fn):
        raise ValidationFailure(BAD_SIGNATURE, "score_state is not callable after load")
    return fn
