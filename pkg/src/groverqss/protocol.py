"""Dealer/receiver secret-sharing sessions.

The dealer phase-flips the marked states of a product-state register (after
some full Grover iterations in the single-marked scheme), hands qubit ``k``
to party ``k``, waits for every confirmation, announces the initial state,
and the receivers finish with one collective reflection and a measurement.

Qubit "ownership" is only a label on the shared register: the state after
the oracle is entangled and is never split into per-party pieces.
"""
from __future__ import annotations

import enum
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .exceptions import ConfigurationError, ProtocolOrderError
from .grover import grover_iterate
from .statevec import (
    MAX_QUBITS,
    MarkedSet,
    ProductState,
    StateVector,
    apply_diffusion,
    apply_oracle,
    expand_product,
    make_rng,
    measure_distribution,
    sample_measurement,
)
from .strategies import CheatStrategy, Honest, check_strategy, decode_about, tamper

DEFAULT_CONFIDENCE = 0.99


class Scheme(str, enum.Enum):
    MULTI_MARKED = "multi-marked"
    SINGLE_MARKED = "single-marked"


class Half(str, enum.Enum):
    A = "halfA"
    B = "halfB"


class OutcomeLabel(str, enum.Enum):
    HALF_A = "HalfA"
    HALF_B = "HalfB"
    CHEAT_SIGNAL = "CheatSignal"
    CORRELATED = "Correlated"
    # single-marked scheme only: an honest but unlucky non-target outcome
    MISS = "Miss"


@dataclass(frozen=True)
class Scenario:
    qubits: int
    initial: ProductState
    marked: MarkedSet
    message: tuple[bytes, bytes] = (b"", b"")
    scheme: Scheme = Scheme.MULTI_MARKED
    iterations_before_send: int = 0
    adversary: CheatStrategy = field(default_factory=Honest)
    trials: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        n = self.qubits
        if not 1 <= n <= MAX_QUBITS:
            raise ConfigurationError(f"qubits must be in 1..{MAX_QUBITS}, got {n}")
        if self.initial.qubits != n:
            raise ConfigurationError(f"initial state has {self.initial.qubits} letters, expected {n}")
        self.marked.check_fits(n)
        N = 2**n
        if self.scheme is Scheme.MULTI_MARKED:
            if n < 2 or len(self.marked) != N // 4:
                raise ConfigurationError(
                    f"multi-marked scheme needs n >= 2 and exactly N/4 = {N // 4} marked states, "
                    f"got {len(self.marked)}"
                )
            if self.iterations_before_send:
                raise ConfigurationError("iterations_before_send applies to the single-marked scheme only")
        elif len(self.marked) != 1:
            raise ConfigurationError(f"single-marked scheme needs one marked state, got {len(self.marked)}")
        if self.iterations_before_send < 0:
            raise ConfigurationError("iterations_before_send must be >= 0")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be positive, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if len(self.message) != 2:
            raise ConfigurationError("message must have exactly two halves")
        check_strategy(self.adversary, n, len(self.marked))

    @property
    def N(self) -> int:
        return 2**self.qubits


@dataclass(frozen=True)
class MarkedTagging:
    tags: tuple[tuple[int, Half], ...]
    message: tuple[bytes, bytes] = (b"", b"")

    def half_of(self, index: int) -> Half | None:
        for i, h in self.tags:
            if i == index:
                return h
        return None

    def indices(self, half: Half) -> tuple[int, ...]:
        return tuple(i for i, h in self.tags if h is half)

    def payload(self, half: Half) -> bytes:
        return self.message[0] if half is Half.A else self.message[1]


def encode_message(half_a: bytes, half_b: bytes, qubits: int, marked: MarkedSet) -> MarkedTagging:
    """Tag marked states in ascending order: first half carries ``half_a``.

    A lone marked state carries the whole message and is tagged ``halfA``.
    """
    marked.check_fits(qubits)
    M = len(marked)
    if M == 1:
        return MarkedTagging(((marked.indices[0], Half.A),), (half_a + half_b, b""))
    if M != 2**qubits // 4 or M % 2:
        raise ConfigurationError(
            f"cannot split a message over {M} marked states; need 1 or an even N/4 = {2**qubits // 4}"
        )
    tags = tuple((i, Half.A if pos < M // 2 else Half.B) for pos, i in enumerate(marked.indices))
    return MarkedTagging(tags, (half_a, half_b))


def dealer_prepare(sc: Scenario) -> StateVector:
    """The register exactly as it leaves the dealer."""
    return _dealer_encode(expand_product(sc.initial), sc)


def _dealer_encode(start: StateVector, sc: Scenario) -> StateVector:
    state = start
    for _ in range(sc.iterations_before_send):
        state = grover_iterate(state, sc.marked, start)
    return apply_oracle(state, sc.marked)


def distribute(register: StateVector, parties: Sequence[str]) -> dict[str, int]:
    if len(parties) != register.qubits:
        raise ConfigurationError(f"{len(parties)} parties for a {register.qubits}-qubit register")
    if len(set(parties)) != len(parties):
        raise ConfigurationError("party ids must be distinct")
    return {p: k for k, p in enumerate(parties)}


def collective_decode(register: StateVector, announced: ProductState) -> StateVector:
    return apply_diffusion(register, expand_product(announced))


def classify_outcome(index: int, sc: Scenario, tagging: MarkedTagging) -> OutcomeLabel:
    if not 0 <= index < sc.N:
        raise ConfigurationError(f"outcome {index} out of range")
    half = tagging.half_of(index)
    if half is not None:
        return OutcomeLabel.HALF_A if half is Half.A else OutcomeLabel.HALF_B
    if sc.qubits == 2 and index in (0, 3):
        return OutcomeLabel.CORRELATED
    if sc.scheme is Scheme.MULTI_MARKED:
        return OutcomeLabel.CHEAT_SIGNAL
    return OutcomeLabel.MISS


def default_parties(n: int) -> list[str]:
    return [f"receiver{k}" for k in range(n)]


# ---------------------------------------------------------------- transcript

_PHASES = (
    "Prepared",
    "OracleApplied",
    "Distributed",
    "Tampered",
    "Confirmed",
    "Announced",
    "Decoded",
    "Measured",
    "Classified",
)
_RANK = {name: r for r, name in enumerate(_PHASES)}
_REQUIRES = {
    "Prepared": None,
    "OracleApplied": "Prepared",
    "Distributed": "OracleApplied",
    "Tampered": "Distributed",
    "Confirmed": "Distributed",
    "Announced": "Confirmed",
    "Decoded": "Announced",
    "Measured": "Decoded",
    "Classified": "Measured",
}


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    payload: Any = None

    def to_line(self) -> str:
        body = json.dumps(self.payload, sort_keys=True, separators=(",", ":"))
        return f"{self.seq}\t{self.kind}\t{body}"

    @classmethod
    def from_line(cls, line: str) -> "Event":
        seq, kind, body = line.rstrip("\n").split("\t", 2)
        if kind not in _RANK:
            raise ConfigurationError(f"unknown event kind {kind!r}")
        return cls(int(seq), kind, json.loads(body))


@dataclass(frozen=True)
class Transcript:
    events: tuple[Event, ...]

    def kinds(self) -> list[str]:
        return [e.kind for e in self.events]

    def to_log(self) -> str:
        return "".join(e.to_line() + "\n" for e in self.events)

    @classmethod
    def from_log(cls, text: str) -> "Transcript":
        return cls(tuple(Event.from_line(ln) for ln in text.splitlines() if ln.strip()))

    def is_well_ordered(self, parties: int | None = None) -> bool:
        seqs = [e.seq for e in self.events]
        if seqs != list(range(len(seqs))):
            return False
        ranks = [_RANK[e.kind] for e in self.events]
        if ranks != sorted(ranks):
            return False
        counts = Counter(self.kinds())
        once = [k for k in _PHASES if k not in ("Tampered", "Confirmed")]
        if any(counts[k] != 1 for k in once) or counts["Tampered"] > 1:
            return False
        return parties is None or counts["Confirmed"] == parties


class Session:
    """One run of the protocol; each phase method refuses to run out of order."""

    def __init__(self, sc: Scenario, parties: Sequence[str] | None = None):
        self.scenario = sc
        self.parties = list(parties) if parties is not None else default_parties(sc.qubits)
        if len(self.parties) != sc.qubits:
            raise ConfigurationError(f"{len(self.parties)} parties for {sc.qubits} qubits")
        self.tagging = encode_message(*sc.message, sc.qubits, sc.marked)
        self.register: StateVector | None = None
        self.outcome: int | None = None
        self.label: OutcomeLabel | None = None
        self._events: list[Event] = []
        self._stage = -1
        self._confirmed: set[str] = set()

    def _check(self, kind: str) -> None:
        rank, need = _RANK[kind], _RANK[_REQUIRES[kind]] if _REQUIRES[kind] else -1
        if self._stage < need:
            raise ProtocolOrderError(f"{kind} before {_REQUIRES[kind]}")
        if self._stage > rank or (self._stage == rank and kind != "Confirmed"):
            raise ProtocolOrderError(f"{kind} after {_PHASES[self._stage]}")

    def _log(self, kind: str, payload: Any = None) -> None:
        self._events.append(Event(len(self._events), kind, payload))
        self._stage = _RANK[kind]

    def prepare(self) -> StateVector:
        self._check("Prepared")
        self.register = expand_product(self.scenario.initial)
        self._log("Prepared", self.scenario.initial.names())
        return self.register

    def apply_oracle(self) -> StateVector:
        sc = self.scenario
        self._check("OracleApplied")
        self.register = _dealer_encode(self.register, sc)
        self._log(
            "OracleApplied",
            {"marked": list(sc.marked.indices), "iterations_before_send": sc.iterations_before_send},
        )
        return self.register

    def distribute(self) -> dict[str, int]:
        self._check("Distributed")
        assignment = distribute(self.register, self.parties)
        self._log("Distributed", assignment)
        return assignment

    def tamper(self, rng: np.random.Generator) -> None:
        sc = self.scenario
        self._check("Tampered")
        result = tamper(sc.adversary, self.register, sc.initial, len(sc.marked), rng)
        if result is not None:
            self.register, info = result
            self._log("Tampered", info)

    def confirm(self, party: str) -> None:
        if party not in self.parties:
            raise ConfigurationError(f"unknown party {party!r}")
        if party in self._confirmed:
            raise ProtocolOrderError(f"{party} already confirmed")
        self._check("Confirmed")
        self._confirmed.add(party)
        self._log("Confirmed", party)

    def announce(self) -> ProductState:
        missing = [p for p in self.parties if p not in self._confirmed]
        if missing:
            raise ProtocolOrderError(f"announcement before confirmation from {missing}")
        self._check("Announced")
        self._log("Announced", self.scenario.initial.names())
        return self.scenario.initial

    def decode(self, about: ProductState | None = None) -> StateVector:
        self._check("Decoded")
        about = about or self.scenario.initial
        self.register = collective_decode(self.register, about)
        self._log("Decoded", about.names())
        return self.register

    def measure(self, rng: np.random.Generator) -> int:
        self._check("Measured")
        self.outcome = sample_measurement(self.register, rng)
        self._log("Measured", self.outcome)
        return self.outcome

    def classify(self) -> OutcomeLabel:
        self._check("Classified")
        self.label = classify_outcome(self.outcome, self.scenario, self.tagging)
        self._log("Classified", self.label.value)
        return self.label

    @property
    def transcript(self) -> Transcript:
        return Transcript(tuple(self._events))

    def run(self, rng: np.random.Generator) -> OutcomeLabel:
        self.prepare()
        self.apply_oracle()
        self.distribute()
        self.tamper(rng)
        for p in self.parties:
            self.confirm(p)
        announced = self.announce()
        self.decode(decode_about(self.scenario.adversary, announced, rng))
        self.measure(rng)
        return self.classify()


@dataclass(frozen=True)
class SessionStats:
    trials: int
    label_counts: dict[OutcomeLabel, int]
    outcome_counts: dict[int, int]

    def count(self, label: OutcomeLabel) -> int:
        return self.label_counts.get(label, 0)

    def frequency(self, label: OutcomeLabel) -> float:
        return self.count(label) / self.trials

    @property
    def cheat_detected(self) -> bool:
        return self.count(OutcomeLabel.CHEAT_SIGNAL) > 0 or self.count(OutcomeLabel.CORRELATED) > 0


def run_session(sc: Scenario, parties: Sequence[str] | None = None) -> tuple[Transcript, SessionStats]:
    """Run ``sc.trials`` independent sessions off one seeded generator."""
    rng = make_rng(sc.seed)
    labels: Counter = Counter()
    outcomes: Counter = Counter()
    first = None
    for _ in range(sc.trials):
        session = Session(sc, parties)
        labels[session.run(rng)] += 1
        outcomes[session.outcome] += 1
        if first is None:
            first = session.transcript
    ordered = {lab: labels.get(lab, 0) for lab in OutcomeLabel}
    return first, SessionStats(sc.trials, ordered, dict(sorted(outcomes.items())))


def success_probability(sc: Scenario) -> float:
    """Exact chance an honest session lands on a marked state."""
    decoded = collective_decode(dealer_prepare(sc), sc.initial)
    return float(measure_distribution(decoded)[list(sc.marked.indices)].sum())


@dataclass(frozen=True)
class SchedulePlan:
    success_probability: float
    sets_per_unit: int
    message_units: int
    confidence: float

    @property
    def total_sets(self) -> int:
        return self.sets_per_unit * self.message_units

    @property
    def achieved(self) -> float:
        return 1 - (1 - self.success_probability) ** self.sets_per_unit


def session_schedule(
    success_probability: float, message_units: int = 1, confidence: float = DEFAULT_CONFIDENCE
) -> SchedulePlan:
    """How many identical registers to send per message unit.

    One set when a single register already succeeds with certainty, else the
    fewest ``k`` with ``1 - (1 - p)**k >= confidence``.
    """
    if message_units < 1:
        raise ConfigurationError("message_units must be positive")
    p = success_probability
    if not 0 < p <= 1 + 1e-12:
        raise ConfigurationError(f"success probability must be in (0, 1], got {p}")
    if not 0 < confidence < 1:
        raise ConfigurationError("confidence must be in (0, 1)")
    if p >= 1 - 1e-12:
        return SchedulePlan(p, 1, message_units, confidence)
    k = max(1, math.ceil(math.log1p(-confidence) / math.log1p(-p)))
    # guard the log estimate against rounding on either side
    while k > 1 and 1 - (1 - p) ** (k - 1) >= confidence:
        k -= 1
    while 1 - (1 - p) ** k < confidence:
        k += 1
    return SchedulePlan(p, k, message_units, confidence)
