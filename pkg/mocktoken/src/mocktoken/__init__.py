"""Mock cryptographic token runtime.

A scenario file (see :mod:`mocktoken.scenario`) plants the initial keys.
Proof-of-concept programs import this module, call :func:`connect` and the
attacker-side helpers, and prove extraction by passing recovered bytes to
:func:`report`, which prints ``EXTRACTED <id> <hex>`` only when the bytes
equal a planted sensitive key.

The active scenario comes from the ``MOCKTOKEN_SCENARIO`` environment
variable (set by the ``run-poc`` harness) or an explicit :func:`activate`
call. If ``MOCKTOKEN_STATE`` is set, the final object inventory is written
there as JSON when the process exits so the harness can check that a PoC
cleaned up after itself.
"""

from __future__ import annotations

import atexit
import json
import os

from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .token import Session, StoredObject, Token, TokenError

__all__ = [
    "Scenario", "ScenarioError", "Session", "StoredObject", "Token",
    "TokenError", "activate", "attrs", "caps", "connect", "craft_wrap",
    "current_token", "deactivate", "fresh_id", "known_key", "load_scenario",
    "open_wrap", "parse_scenario", "report",
]

__version__ = "0.1.0"

_TOKEN: Token | None = None
_STATE_PATH: str | None = None


def activate(scenario: Scenario, state_path: str | None = None) -> Token:
    """Install a scenario as the process-wide token. Returns the token."""
    global _TOKEN, _STATE_PATH
    _TOKEN = Token(scenario)
    _STATE_PATH = state_path
    return _TOKEN


def deactivate() -> None:
    """Drop the process-wide token (mainly for tests)."""
    global _TOKEN, _STATE_PATH
    _TOKEN = None
    _STATE_PATH = None


def current_token() -> Token:
    global _TOKEN, _STATE_PATH
    if _TOKEN is None:
        path = os.environ.get("MOCKTOKEN_SCENARIO")
        if not path:
            raise TokenError("no scenario active: set MOCKTOKEN_SCENARIO or "
                             "call mocktoken.activate()")
        _TOKEN = Token(load_scenario(path))
        _STATE_PATH = os.environ.get("MOCKTOKEN_STATE")
    return _TOKEN


@atexit.register
def _dump_state() -> None:
    if _TOKEN is not None and _STATE_PATH:
        with open(_STATE_PATH, "w", encoding="utf-8") as fh:
            json.dump(_TOKEN.state(), fh)


def connect() -> Session:
    return Session(current_token())


def attrs(sensitive: bool, extractable: bool, wrap: bool, unwrap: bool,
          encrypt: bool, decrypt: bool) -> tuple[bool, ...]:
    return (bool(sensitive), bool(extractable), bool(wrap), bool(unwrap),
            bool(encrypt), bool(decrypt))


def caps(export_wrapped: bool, import_wrapped: bool,
         exportable_under_wrap: bool, put_wrap_key: bool) -> tuple[bool, ...]:
    return (bool(export_wrapped), bool(import_wrapped),
            bool(exportable_under_wrap), bool(put_wrap_key))


def known_key(key_id: int) -> bytes:
    return current_token().known_key(key_id)


def fresh_id() -> int:
    return current_token().fresh_id()


def craft_wrap(key_value: bytes, *args) -> bytes:
    return current_token().craft_wrap(key_value, *args)


def open_wrap(key_value: bytes, blob: bytes) -> bytes:
    return current_token().open_wrap(key_value, blob)


def report(value: bytes) -> bool:
    return current_token().report(value)
