"""Grover iteration driver and its two-level closed form.

With ``M`` of ``N`` basis states marked and a uniform start, every marked
amplitude stays equal to every other marked one (likewise the unmarked), so
the whole run collapses to a pair ``(a, b)``: unmarked, marked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import ConfigurationError
from .statevec import (
    MAX_QUBITS,
    MarkedSet,
    StateVector,
    apply_diffusion,
    apply_oracle,
)

CERTAINTY_TOL = 1e-12


@dataclass(frozen=True)
class SearchSpec:
    N: int
    M: int

    def __post_init__(self):
        if self.N < 2 or self.N & (self.N - 1):
            raise ConfigurationError(f"N must be a power of two >= 2, got {self.N}")
        if not 1 <= self.M <= self.N:
            raise ConfigurationError(f"M must satisfy 1 <= M <= N, got M={self.M}, N={self.N}")

    @classmethod
    def for_qubits(cls, qubits: int, M: int = 1) -> "SearchSpec":
        return cls(2**qubits, M)

    @property
    def qubits(self) -> int:
        return self.N.bit_length() - 1

    @property
    def fraction(self) -> float:
        return self.M / self.N


@dataclass(frozen=True)
class TraceRow:
    k: int
    unmarked: float
    marked: float
    success: float


@dataclass(frozen=True)
class IterationTrace:
    spec: SearchSpec
    rows: tuple[TraceRow, ...]

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, k) -> TraceRow:
        return self.rows[k]

    def final(self) -> TraceRow:
        return self.rows[-1]


def grover_iterate(s: StateVector, w: MarkedSet, about: StateVector) -> StateVector:
    return apply_diffusion(apply_oracle(s, w), about)


def one_shot_amplitudes(spec: SearchSpec) -> tuple[float, float]:
    """(unmarked, marked) amplitudes after a single iteration from uniform."""
    N, M = spec.N, spec.M
    denom = N * math.sqrt(N)
    return (N - 4 * M) / denom, (3 * N - 4 * M) / denom


def success_for_fraction(x: float) -> float:
    """One-iteration success probability as a polynomial in M/N."""
    p = 9 * x - 24 * x**2 + 16 * x**3
    assert -CERTAINTY_TOL <= p <= 1 + CERTAINTY_TOL, p
    return p


def failure_for_fraction(x: float) -> float:
    return (1 - x) * (1 - 4 * x) ** 2


def success_one_iteration(spec: SearchSpec) -> float:
    return success_for_fraction(spec.M / spec.N)


def failure_one_iteration(spec: SearchSpec) -> float:
    N, M = spec.N, spec.M
    return (N - M) * ((N - 4 * M) / (N * math.sqrt(N))) ** 2


def closed_form_trace(spec: SearchSpec, iterations: int) -> IterationTrace:
    if iterations < 0:
        raise ConfigurationError("iterations must be >= 0")
    N, M = spec.N, spec.M
    a = b = 1 / math.sqrt(N)
    rows = [TraceRow(0, a, b, M * b * b)]
    for k in range(1, iterations + 1):
        b = -b
        mean = ((N - M) * a + M * b) / N
        a, b = 2 * mean - a, 2 * mean - b
        rows.append(TraceRow(k, a, b, M * b * b))
    return IterationTrace(spec, tuple(rows))


def sine_form_success(spec: SearchSpec, iterations: int) -> float:
    """Independent cross-check: sin^2((2k+1) theta / 2), sin(theta/2) = sqrt(M/N)."""
    half = math.asin(math.sqrt(spec.M / spec.N))
    return math.sin((2 * iterations + 1) * half) ** 2


def success_curve(samples: Sequence[SearchSpec]) -> list[tuple[float, float]]:
    if not samples:
        raise ConfigurationError("success_curve needs at least one sample")
    return [(s.fraction, success_one_iteration(s)) for s in samples]


def simulate(spec: SearchSpec, iterations: int, marked: MarkedSet | None = None) -> list[StateVector]:
    """Full state-vector run; returns the state after each of 0..iterations."""
    if spec.qubits > MAX_QUBITS:
        raise ConfigurationError(f"N={spec.N} exceeds the simulation cap")
    if marked is None:
        marked = MarkedSet(tuple(range(spec.M)))
    if len(marked) != spec.M:
        raise ConfigurationError(f"marked set has {len(marked)} entries, spec says M={spec.M}")
    about = StateVector.uniform(spec.qubits)
    states = [about]
    for _ in range(iterations):
        states.append(grover_iterate(states[-1], marked, about))
    return states


def brute_force_check(spec: SearchSpec, iterations: int, marked: MarkedSet | None = None) -> float:
    """Max |simulated - closed form| amplitude over all iterations 0..k."""
    if marked is None:
        marked = MarkedSet(tuple(range(spec.M)))
    states = simulate(spec, iterations, marked)
    trace = closed_form_trace(spec, iterations)
    mask = np.zeros(spec.N, dtype=bool)
    mask[list(marked.indices)] = True
    worst = 0.0
    for state, row in zip(states, trace.rows):
        expected = np.where(mask, row.marked, row.unmarked)
        worst = max(worst, float(np.max(np.abs(state.amplitudes - expected))))
    return worst


@dataclass(frozen=True)
class TableCell:
    qubits: int
    iteration: int
    success: float
    simulated: float

    @property
    def percent(self) -> float:
        return 100 * self.success


def iteration_table(qubit_counts: Iterable[int], max_iterations: int | dict[int, int]) -> list[TableCell]:
    """Single-marked success per (n, k), closed form checked against simulation.

    ``max_iterations`` is either one bound for every ``n`` or a per-``n`` map.
    """
    cells = []
    for n in qubit_counts:
        if n < 1:
            raise ConfigurationError("qubit counts must be >= 1")
        kmax = max_iterations[n] if isinstance(max_iterations, dict) else max_iterations
        spec = SearchSpec.for_qubits(n, 1)
        trace = closed_form_trace(spec, kmax)
        # target the last basis state so the check does not lean on index 0
        target = MarkedSet((spec.N - 1,))
        states = simulate(spec, kmax, target)
        for k in range(1, kmax + 1):
            sim = float(abs(states[k][spec.N - 1]) ** 2)
            if abs(sim - trace[k].success) > 1e-12:
                raise RuntimeError(f"closed form and simulation disagree at n={n}, k={k}")
            cells.append(TableCell(n, k, trace[k].success, sim))
    return cells
