"""Cheat strategies scored two ways: exact outcome distributions and sampling.

Detection means the receivers' final outcome falls outside the dealer's
marked set. For a strategy with a ``None`` field the exact value is the plain
average over every member of that family (all ``4**n`` guesses, or all
``C(N, M)`` fake marked sets).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .exceptions import ConfigurationError
from .protocol import Scenario, collective_decode, dealer_prepare
from .statevec import (
    Letter,
    MarkedSet,
    ProductState,
    StateVector,
    apply_diffusion,
    apply_oracle,
    expand_product,
    inner_product,
    make_rng,
    measure_distribution,
    sample_from,
)
from .strategies import (
    GUESS_THEN_MEASURE,
    CaptureAll,
    CheatStrategy,
    GuessDiffusion,
    Honest,
    InterceptResend,
    check_strategy,
)

EXACT_MAX_QUBITS = 10
ENUMERATION_LIMIT = 200_000
DEFAULT_MC_TRIALS = 100_000
SHORTHAND = "-P_w|S1>"

_LETTERS = tuple(Letter)
_LETTER_MATRIX = np.array([x.vector for x in _LETTERS])  # 4 x 2


def guess_space_size(qubits: int) -> int:
    if qubits < 1:
        raise ConfigurationError("qubits must be >= 1")
    return len(_LETTERS) ** qubits


def marked_set_space(N: int, M: int) -> int:
    if not 0 <= M <= N:
        raise ConfigurationError(f"need 0 <= M <= N, got M={M}, N={N}")
    return math.comb(N, M)


def overlap_census(N: int, M: int) -> list[int]:
    """Number of size-M subsets sharing exactly k elements with a fixed one."""
    if not 0 <= M <= N:
        raise ConfigurationError(f"need 0 <= M <= N, got M={M}, N={N}")
    return [math.comb(M, k) * math.comb(N - M, M - k) for k in range(M + 1)]


def enumerate_census(N: int, M: int, reference: tuple[int, ...] | None = None) -> list[int]:
    """Brute-force version of :func:`overlap_census` over every subset."""
    ref = set(reference if reference is not None else range(M))
    counts = [0] * (M + 1)
    for subset in itertools.combinations(range(N), M):
        counts[len(ref.intersection(subset))] += 1
    return counts


# ------------------------------------------------------------ exact routes

def _product_rows(qubits: int, block: int = 5) -> Iterator[np.ndarray]:
    """All 4**n product vectors in base-4 word order, in row blocks."""
    tail = min(qubits, block)
    tail_rows = np.ones((1, 1), dtype=complex)
    for _ in range(tail):
        tail_rows = np.einsum("ab,cd->acbd", tail_rows, _LETTER_MATRIX).reshape(
            tail_rows.shape[0] * 4, -1
        )
    for head in itertools.product(range(4), repeat=qubits - tail):
        prefix = np.ones(1, dtype=complex)
        for i in head:
            prefix = np.kron(prefix, _LETTER_MATRIX[i])
        yield np.einsum("a,rb->rab", prefix, tail_rows).reshape(tail_rows.shape[0], -1)


def _word(qubits: int, code: int) -> ProductState:
    letters = []
    for _ in range(qubits):
        code, r = divmod(code, 4)
        letters.append(_LETTERS[r])
    return ProductState(tuple(reversed(letters)))


def _mean_reflection_distribution(s: StateVector) -> np.ndarray:
    """Outcome distribution of 2<g|s>g - s averaged over every product guess g."""
    total = np.zeros(len(s))
    count = 0
    amps = s.amplitudes
    for rows in _product_rows(s.qubits):
        c = rows.conj() @ amps
        out = 2 * c[:, None] * rows - amps[None, :]
        total += (np.abs(out) ** 2).sum(axis=0)
        count += rows.shape[0]
    return total / count


def _decode_basis_distributions(announced: ProductState) -> np.ndarray:
    """Row x: outcome distribution when basis state |x> is decoded."""
    a = expand_product(announced).amplitudes
    out = 2 * np.outer(a.conj(), a)  # row x is 2 <a|x> a
    out[np.diag_indices_from(out)] -= 1
    return np.abs(out) ** 2


def _resent_distribution(sc: Scenario, fake: MarkedSet, start: ProductState) -> np.ndarray:
    return measure_distribution(collective_decode(apply_oracle(expand_product(start), fake), sc.initial))


def final_distribution(sc: Scenario, strategy: CheatStrategy | None = None) -> np.ndarray:
    """Exact distribution of the receivers' measured outcome under ``strategy``."""
    strategy = sc.adversary if strategy is None else strategy
    check_strategy(strategy, sc.qubits, len(sc.marked))
    if sc.qubits > EXACT_MAX_QUBITS:
        raise ConfigurationError(f"exact distributions are limited to {EXACT_MAX_QUBITS} qubits")
    sent = dealer_prepare(sc)
    if isinstance(strategy, Honest):
        return measure_distribution(collective_decode(sent, sc.initial))
    if isinstance(strategy, GuessDiffusion):
        if strategy.guess is not None:
            return measure_distribution(collective_decode(sent, strategy.guess))
        return _mean_reflection_distribution(sent)
    if isinstance(strategy, InterceptResend):
        start = strategy.fake_initial or sc.initial
        if strategy.fake_marked is not None:
            return _resent_distribution(sc, strategy.fake_marked, start)
        M = len(sc.marked)
        if marked_set_space(sc.N, M) > ENUMERATION_LIMIT:
            raise ConfigurationError(f"C({sc.N},{M}) fake sets is too many to enumerate")
        total = np.zeros(sc.N)
        count = 0
        for subset in itertools.combinations(range(sc.N), M):
            total += _resent_distribution(sc, MarkedSet(subset), start)
            count += 1
        return total / count
    if isinstance(strategy, CaptureAll):
        if strategy.policy == GUESS_THEN_MEASURE:
            if strategy.guess is not None:
                seen = measure_distribution(apply_diffusion(sent, expand_product(strategy.guess)))
            else:
                seen = _mean_reflection_distribution(sent)
        else:
            seen = measure_distribution(sent)
        return seen @ _decode_basis_distributions(sc.initial)
    raise ConfigurationError(f"unsupported strategy {strategy!r}")


def detection_probability(sc: Scenario, strategy: CheatStrategy | None = None) -> float:
    p = final_distribution(sc, strategy)
    return float(1.0 - p[list(sc.marked.indices)].sum())


def intercept_census_undetected(sc: Scenario) -> float:
    """Uniform-fake-set undetected probability from the overlap census alone.

    Valid when the cheater reuses the dealer's initial state: every product
    word has flat magnitudes, so each resent fake-marked state decodes to
    ``(2c+1)**2 / N`` and every other state to ``(2c-1)**2 / N`` with
    ``c = 1 - 2M/N``.
    """
    N, M = sc.N, len(sc.marked)
    c = 1 - 2 * M / N
    hit, miss = (2 * c + 1) ** 2 / N, (2 * c - 1) ** 2 / N
    census = overlap_census(N, M)
    total = sum(cnt * (k * hit + (M - k) * miss) for k, cnt in enumerate(census))
    return total / marked_set_space(N, M)


# ------------------------------------------------------------ sampling route

def _random_codes(rng, trials: int, qubits: int) -> np.ndarray:
    digits = rng.integers(0, 4, size=(trials, qubits))
    return digits @ (4 ** np.arange(qubits - 1, -1, -1))


def _sample_grouped(keys: np.ndarray, dist_for, u: np.ndarray) -> np.ndarray:
    out = np.empty(len(keys), dtype=np.int64)
    for key in np.unique(keys):
        sel = keys == key
        out[sel] = sample_from(dist_for(key), u[sel])
    return out


def monte_carlo_outcomes(sc: Scenario, strategy: CheatStrategy, trials: int, seed: int) -> np.ndarray:
    """Sample ``trials`` final outcomes, drawing a fresh family member per trial."""
    rng = make_rng(seed)
    n, N, M = sc.qubits, sc.N, len(sc.marked)
    sent = dealer_prepare(sc)
    one = np.zeros(trials, dtype=np.int64)

    def decoded(state: StateVector, about: ProductState):
        return measure_distribution(collective_decode(state, about))

    if isinstance(strategy, Honest):
        return _sample_grouped(one, lambda _: decoded(sent, sc.initial), rng.random(trials))
    if isinstance(strategy, GuessDiffusion):
        if strategy.guess is not None:
            return _sample_grouped(one, lambda _: decoded(sent, strategy.guess), rng.random(trials))
        codes = _random_codes(rng, trials, n)
        return _sample_grouped(codes, lambda c: decoded(sent, _word(n, int(c))), rng.random(trials))
    if isinstance(strategy, InterceptResend):
        start = strategy.fake_initial or sc.initial
        if strategy.fake_marked is not None:
            fakes = [strategy.fake_marked]
            keys = one
        else:
            # first M columns of a random permutation give a uniform M-subset
            picks = np.argsort(rng.random((trials, N)), axis=1)[:, :M]
            masks = (1 << picks.astype(object)).sum(axis=1)
            uniq, keys = np.unique(masks, return_inverse=True)
            fakes = [MarkedSet(tuple(i for i in range(N) if (int(m) >> i) & 1)) for m in uniq]
        return _sample_grouped(
            keys, lambda k: _resent_distribution(sc, fakes[int(k)], start), rng.random(trials)
        )
    if isinstance(strategy, CaptureAll):
        if strategy.policy == GUESS_THEN_MEASURE:
            if strategy.guess is not None:
                codes = one
                guess_of = lambda _: strategy.guess  # noqa: E731
            else:
                codes = _random_codes(rng, trials, n)
                guess_of = lambda c: _word(n, int(c))  # noqa: E731
            seen = _sample_grouped(
                codes,
                lambda c: measure_distribution(apply_diffusion(sent, expand_product(guess_of(c)))),
                rng.random(trials),
            )
        else:
            seen = _sample_grouped(one, lambda _: measure_distribution(sent), rng.random(trials))
        return _sample_grouped(
            seen, lambda x: decoded(StateVector.basis(n, int(x)), sc.initial), rng.random(trials)
        )
    raise ConfigurationError(f"unsupported strategy {strategy!r}")


def monte_carlo_detection(sc: Scenario, strategy: CheatStrategy, trials: int, seed: int) -> float:
    outcomes = monte_carlo_outcomes(sc, strategy, trials, seed)
    return float(np.mean(~np.isin(outcomes, sc.marked.indices)))


# ------------------------------------------------------------------ reports

def as_fraction(x: float, max_denominator: int = 1 << 16, tol: float = 1e-12) -> Fraction | None:
    f = Fraction(x).limit_denominator(max_denominator)
    return f if abs(float(f) - x) <= tol else None


@dataclass(frozen=True)
class PublishedClaim:
    quantity: str  # "detection" or "undetected"
    text: str
    value: float


@dataclass(frozen=True)
class DetectionReport:
    strategy: str
    detection: float
    mc_estimate: float | None
    mc_trials: int
    space_sizes: dict[str, int] = field(default_factory=dict)
    claim: PublishedClaim | None = None

    @property
    def undetected(self) -> float:
        return 1.0 - self.detection

    @property
    def fraction(self) -> Fraction | None:
        return as_fraction(self.detection)

    @property
    def sigma(self) -> float:
        p = min(max(self.detection, 0.0), 1.0)
        return math.sqrt(p * (1 - p) / self.mc_trials) if self.mc_trials else float("nan")

    def within_sigmas(self, k: float = 3.0) -> bool:
        if self.mc_estimate is None:
            return False
        return abs(self.mc_estimate - self.detection) <= k * self.sigma + 1e-15

    @property
    def discrepancy(self) -> bool | None:
        if self.claim is None:
            return None
        ours = self.detection if self.claim.quantity == "detection" else self.undetected
        return abs(ours - self.claim.value) > 1e-9


def _claim_for(strategy: CheatStrategy) -> PublishedClaim | None:
    if isinstance(strategy, GuessDiffusion) and strategy.guess is None:
        return PublishedClaim("detection", "11/16", 11 / 16)
    if isinstance(strategy, InterceptResend) and strategy.fake_marked is None:
        return PublishedClaim("undetected", "1/728", 1 / 728)
    return None


def _space_sizes(sc: Scenario, strategy: CheatStrategy) -> dict[str, int]:
    sizes = {}
    guessing = isinstance(strategy, GuessDiffusion) or (
        isinstance(strategy, CaptureAll) and strategy.policy == GUESS_THEN_MEASURE
    )
    if guessing and strategy.guess is None:
        sizes["guess_space"] = guess_space_size(sc.qubits)
    if isinstance(strategy, InterceptResend):
        sizes["marked_set_space"] = marked_set_space(sc.N, len(sc.marked))
    return sizes


def exact_detection_probability(
    sc: Scenario,
    strategy: CheatStrategy | None = None,
    mc_trials: int = DEFAULT_MC_TRIALS,
    seed: int | None = None,
) -> DetectionReport:
    strategy = sc.adversary if strategy is None else strategy
    detection = detection_probability(sc, strategy)
    estimate = (
        monte_carlo_detection(sc, strategy, mc_trials, sc.seed if seed is None else seed)
        if mc_trials
        else None
    )
    return DetectionReport(
        strategy.describe(),
        detection,
        estimate,
        mc_trials,
        _space_sizes(sc, strategy),
        _claim_for(strategy),
    )


def intercept_resend_report(
    sc: Scenario,
    fake: MarkedSet | None = None,
    mc_trials: int = DEFAULT_MC_TRIALS,
    seed: int | None = None,
) -> DetectionReport:
    if fake is not None and len(fake) != len(sc.marked):
        raise ConfigurationError(f"fake set has {len(fake)} states, dealer marked {len(sc.marked)}")
    return exact_detection_probability(sc, InterceptResend(fake), mc_trials, seed)


# ------------------------------------------------- reflection table (table1)

TABLE1_INITIALS = tuple(
    ProductState.parse(w)
    for w in (
        "+,+,+,+",
        "+,-,+,-",
        "-,-,+,+",
        "-,-,-,-",
        "+i,+i,+i,+i",
        "-i,-i,-i,-i",
        "+,+,+i,+i",
        "-i,+i,-i,+i",
        "-,-,-i,-i",
        "+,-,+i,-i",
    )
)
TABLE1_DEFAULT_MARKED = MarkedSet((1, 3, 5, 7))


@dataclass(frozen=True)
class Table1Row:
    row: int
    initial: ProductState
    decoded: StateVector
    overlap: complex

    @property
    def shorthand(self) -> bool:
        return abs(self.overlap) < 1e-12

    def render(self) -> str:
        return SHORTHAND if self.shorthand else render_state(self.decoded)


def table1_report(marked: MarkedSet = TABLE1_DEFAULT_MARKED) -> list[Table1Row]:
    """Reflect ``P_w |++++>`` about each listed initial state."""
    if len(marked) != 4:
        raise ConfigurationError("the four-qubit table needs exactly four marked states")
    marked.check_fits(4)
    sent = apply_oracle(expand_product(TABLE1_INITIALS[0]), marked)
    rows = []
    for i, initial in enumerate(TABLE1_INITIALS, start=1):
        about = expand_product(initial)
        rows.append(Table1Row(i, initial, apply_diffusion(sent, about), inner_product(about, sent)))
    return rows


def render_amplitude(a: complex, max_denominator: int = 64) -> str:
    """Exact-looking rendering such as ``3/8+1/8i`` when the value is dyadic."""
    re, im = as_fraction(a.real, max_denominator, 1e-12), as_fraction(a.imag, max_denominator, 1e-12)
    if re is None or im is None:
        return f"{a.real:.12g}{a.imag:+.12g}i"
    if im == 0:
        return str(re)
    sign = "+" if im > 0 else "-"
    return f"{re}{sign}{abs(im)}i"


def render_state(s: StateVector, tol: float = 1e-12) -> str:
    n = s.qubits
    terms = [
        f"({render_amplitude(complex(a))})|{i:0{n}b}>"
        for i, a in enumerate(s.amplitudes)
        if abs(a) > tol
    ]
    return " + ".join(terms)
