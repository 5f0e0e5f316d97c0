"""Cheat strategies a dishonest receiver or eavesdropper may follow.

A field left as ``None`` means "drawn uniformly at random per trial"; the
exact calculators in :mod:`groverqss.adversary` average over that family.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .exceptions import ConfigurationError
from .statevec import (
    Letter,
    MarkedSet,
    ProductState,
    StateVector,
    apply_diffusion,
    apply_oracle,
    expand_product,
    sample_measurement,
)

MEASURE_IMMEDIATELY = "measure-immediately"
GUESS_THEN_MEASURE = "guess-diffusion-then-measure"
_LETTERS = tuple(Letter)


def random_product(qubits: int, rng: np.random.Generator) -> ProductState:
    picks = rng.integers(0, len(_LETTERS), size=qubits)
    return ProductState(tuple(_LETTERS[i] for i in picks))


def random_marked(N: int, M: int, rng: np.random.Generator) -> MarkedSet:
    return MarkedSet(tuple(int(i) for i in rng.choice(N, size=M, replace=False)))


@dataclass(frozen=True)
class Honest:
    name = "honest"

    def describe(self) -> str:
        return "honest"

    def to_dict(self) -> Any:
        return "honest"


@dataclass(frozen=True)
class GuessDiffusion:
    """Receivers' collective reflection is performed about a guessed state."""

    guess: ProductState | None = None
    name = "guess-diffusion"

    def describe(self) -> str:
        return f"guess-diffusion({self.guess.ket() if self.guess else 'uniform'})"

    def to_dict(self) -> dict:
        d: dict = {"strategy": self.name}
        if self.guess is not None:
            d["guess"] = self.guess.names()
        return d


@dataclass(frozen=True)
class InterceptResend:
    """Register is swapped for ``P_fake |fake_initial>`` before the receivers get it.

    ``fake_initial=None`` reuses the dealer's own initial state, the cheater's
    best case; ``fake_marked=None`` draws a uniform set of the right size.
    """

    fake_marked: MarkedSet | None = None
    fake_initial: ProductState | None = None
    name = "intercept-resend"

    def describe(self) -> str:
        fm = ",".join(map(str, self.fake_marked)) if self.fake_marked else "uniform"
        fi = self.fake_initial.ket() if self.fake_initial else "dealer's"
        return f"intercept-resend(marked={fm}; initial={fi})"

    def to_dict(self) -> dict:
        d: dict = {"strategy": self.name}
        if self.fake_marked is not None:
            d["fake_marked"] = list(self.fake_marked.indices)
        if self.fake_initial is not None:
            d["fake_initial"] = self.fake_initial.names()
        return d


@dataclass(frozen=True)
class CaptureAll:
    """Cheater holds every qubit, measures (optionally after a guessed
    reflection) and forwards the collapsed basis state."""

    policy: str = MEASURE_IMMEDIATELY
    guess: ProductState | None = None
    name = "capture-all"

    def __post_init__(self):
        if self.policy not in (MEASURE_IMMEDIATELY, GUESS_THEN_MEASURE):
            raise ConfigurationError(f"unknown capture-all policy {self.policy!r}")

    def describe(self) -> str:
        if self.policy == MEASURE_IMMEDIATELY:
            return f"capture-all({self.policy})"
        return f"capture-all({self.policy}; {self.guess.ket() if self.guess else 'uniform'})"

    def to_dict(self) -> dict:
        d: dict = {"strategy": self.name, "policy": self.policy}
        if self.guess is not None:
            d["guess"] = self.guess.names()
        return d


CheatStrategy = Union[Honest, GuessDiffusion, InterceptResend, CaptureAll]


def check_strategy(strategy: CheatStrategy, qubits: int, marked_count: int) -> None:
    """Raise if any fixed field does not fit a register of ``qubits``."""
    guess = getattr(strategy, "guess", None)
    if guess is not None and guess.qubits != qubits:
        raise ConfigurationError(f"guess has {guess.qubits} qubits, register has {qubits}")
    if isinstance(strategy, InterceptResend):
        if strategy.fake_marked is not None:
            strategy.fake_marked.check_fits(qubits)
            if len(strategy.fake_marked) != marked_count:
                raise ConfigurationError(
                    f"fake marked set has {len(strategy.fake_marked)} entries, expected {marked_count}"
                )
        if strategy.fake_initial is not None and strategy.fake_initial.qubits != qubits:
            raise ConfigurationError("fake initial state has the wrong qubit count")


def strategy_from_dict(data: Any) -> CheatStrategy:
    if data is None or data == "honest":
        return Honest()
    if not isinstance(data, dict) or "strategy" not in data:
        raise ConfigurationError(f"adversary must be 'honest' or an object with 'strategy', got {data!r}")
    kind = data["strategy"]
    known = {"strategy", "guess", "fake_marked", "fake_initial", "policy"}
    extra = set(data) - known
    if extra:
        raise ConfigurationError(f"unknown adversary field(s): {sorted(extra)}")

    def product(key):
        return ProductState.parse(data[key]) if data.get(key) is not None else None

    if kind == "honest":
        return Honest()
    if kind == GuessDiffusion.name:
        return GuessDiffusion(product("guess"))
    if kind == InterceptResend.name:
        fm = data.get("fake_marked")
        return InterceptResend(MarkedSet.parse(fm) if fm is not None else None, product("fake_initial"))
    if kind == CaptureAll.name:
        return CaptureAll(data.get("policy", MEASURE_IMMEDIATELY), product("guess"))
    raise ConfigurationError(f"unknown adversary strategy {kind!r}")


def tamper(
    strategy: CheatStrategy,
    register: StateVector,
    initial: ProductState,
    marked_count: int,
    rng: np.random.Generator,
) -> tuple[StateVector, dict] | None:
    """Apply an in-transit attack, or return None when the strategy has none."""
    n = register.qubits
    if isinstance(strategy, InterceptResend):
        fake = strategy.fake_marked or random_marked(2**n, marked_count, rng)
        start = strategy.fake_initial or initial
        return apply_oracle(expand_product(start), fake), {
            "strategy": strategy.name,
            "fake_marked": list(fake.indices),
            "fake_initial": start.names(),
        }
    if isinstance(strategy, CaptureAll):
        info: dict = {"strategy": strategy.name, "policy": strategy.policy}
        state = register
        if strategy.policy == GUESS_THEN_MEASURE:
            guess = strategy.guess or random_product(n, rng)
            state = apply_diffusion(state, expand_product(guess))
            info["guess"] = guess.names()
        seen = sample_measurement(state, rng)
        info["observed"] = seen
        return StateVector.basis(n, seen), info
    return None


def decode_about(strategy: CheatStrategy, announced: ProductState, rng: np.random.Generator) -> ProductState:
    """State the collective reflection is actually performed about."""
    if isinstance(strategy, GuessDiffusion):
        return strategy.guess or random_product(announced.qubits, rng)
    return announced

