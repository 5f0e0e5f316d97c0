"""JSON scenario files.

Example::

    {
      "qubits": 4,
      "initial": ["plus", "plus", "plus", "plus"],
      "marked": ["0100", "0110", "1000", "1011"],
      "scheme": "multi-marked",
      "message": {"halfA": "attack at", "halfB": " dawn"},
      "adversary": "honest",
      "trials": 1000,
      "seed": 7
    }
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .exceptions import ConfigurationError
from .protocol import Scenario, Scheme
from .statevec import MarkedSet, ProductState
from .strategies import strategy_from_dict

REQUIRED = ("qubits", "initial", "marked", "trials", "seed")
OPTIONAL = ("scheme", "iterations_before_send", "message", "adversary")


def _int_field(doc: dict, key: str, default: int | None = None) -> int:
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"field '{key}': expected an integer, got {value!r}")
    return value


def parse_scenario(doc: Any) -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigurationError("scenario must be a JSON object")
    missing = [k for k in REQUIRED if k not in doc]
    if missing:
        raise ConfigurationError(f"missing field(s): {', '.join(missing)}")
    unknown = sorted(set(doc) - set(REQUIRED) - set(OPTIONAL))
    if unknown:
        raise ConfigurationError(f"unknown field(s): {', '.join(unknown)}")

    field = "?"
    try:
        field = "qubits"
        qubits = _int_field(doc, "qubits")
        field = "initial"
        initial = ProductState.parse(doc["initial"])
        field = "marked"
        marked = MarkedSet.parse(doc["marked"], qubits)
        field = "scheme"
        scheme = Scheme(doc.get("scheme", Scheme.MULTI_MARKED.value))
        field = "iterations_before_send"
        ibs = _int_field(doc, "iterations_before_send", 0)
        field = "message"
        msg = doc.get("message", {})
        if not isinstance(msg, dict) or set(msg) - {"halfA", "halfB"}:
            raise ConfigurationError("expected an object with keys halfA, halfB")
        message = (str(msg.get("halfA", "")).encode(), str(msg.get("halfB", "")).encode())
        field = "adversary"
        adversary = strategy_from_dict(doc.get("adversary", "honest"))
        field = "trials"
        trials = _int_field(doc, "trials")
        field = "seed"
        seed = _int_field(doc, "seed")
    except (ConfigurationError, ValueError, TypeError) as exc:
        msg = str(exc)
        raise ConfigurationError(msg if msg.startswith("field '") else f"field '{field}': {msg}") from exc

    return Scenario(
        qubits=qubits,
        initial=initial,
        marked=marked,
        message=message,
        scheme=scheme,
        iterations_before_send=ibs,
        adversary=adversary,
        trials=trials,
        seed=seed,
    )


def loads_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(doc)


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario {path}: {exc.strerror}") from exc
    return loads_scenario(text)


def scenario_to_dict(sc: Scenario) -> dict:
    doc = {
        "qubits": sc.qubits,
        "initial": sc.initial.names(),
        "marked": list(sc.marked.indices),
        "scheme": sc.scheme.value,
        "message": {"halfA": sc.message[0].decode(), "halfB": sc.message[1].decode()},
        "adversary": sc.adversary.to_dict(),
        "trials": sc.trials,
        "seed": sc.seed,
    }
    if sc.scheme is Scheme.SINGLE_MARKED:
        doc["iterations_before_send"] = sc.iterations_before_send
    return doc


def dumps_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"
