"""Dense state vectors for small registers.

Basis index convention: qubit 0 is the most significant bit, so the ket
``|0100>`` is index 4. All public operations return new read-only vectors.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import ConfigurationError

MAX_QUBITS = 20
NORM_TOL = 1e-12

_R = 1 / math.sqrt(2)


class Letter(enum.Enum):
    """Single-qubit states the dealer may prepare."""

    PLUS = "plus"
    MINUS = "minus"
    PLUS_I = "plus_i"
    MINUS_I = "minus_i"

    @property
    def vector(self) -> np.ndarray:
        return _LETTER_VECTORS[self]

    @property
    def ket(self) -> str:
        return _LETTER_KETS[self]

    @classmethod
    def parse(cls, name: str) -> "Letter":
        key = name.strip().lower()
        key = _LETTER_ALIASES.get(key, key.replace("-", "_"))
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(f"unknown single-qubit letter {name!r}") from None


_LETTER_VECTORS = {
    Letter.PLUS: np.array([_R, _R], dtype=complex),
    Letter.MINUS: np.array([_R, -_R], dtype=complex),
    Letter.PLUS_I: np.array([_R, 1j * _R], dtype=complex),
    Letter.MINUS_I: np.array([_R, -1j * _R], dtype=complex),
}
_LETTER_KETS = {
    Letter.PLUS: "|+>",
    Letter.MINUS: "|->",
    Letter.PLUS_I: "|+i>",
    Letter.MINUS_I: "|-i>",
}
_LETTER_ALIASES = {"+": "plus", "-": "minus", "+i": "plus_i", "-i": "minus_i", "i": "plus_i"}


@dataclass(frozen=True)
class ProductState:
    letters: tuple[Letter, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        if not 1 <= len(letters) <= MAX_QUBITS:
            raise ConfigurationError(f"product state needs 1..{MAX_QUBITS} letters, got {len(letters)}")
        if not all(isinstance(x, Letter) for x in letters):
            raise ConfigurationError("product state letters must be Letter members")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, names: Iterable[str] | str) -> "ProductState":
        """Build from names like ``["plus", "minus_i"]`` or ``"+,-,+i"``."""
        if isinstance(names, str):
            names = [s for s in names.split(",") if s.strip()]
        return cls(tuple(Letter.parse(n) for n in names))

    @classmethod
    def uniform(cls, n: int, letter: Letter = Letter.PLUS) -> "ProductState":
        return cls((letter,) * n)

    @property
    def qubits(self) -> int:
        return len(self.letters)

    def names(self) -> list[str]:
        return [x.value for x in self.letters]

    def ket(self) -> str:
        return "".join(x.ket for x in self.letters)

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class MarkedSet:
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ConfigurationError("marked set must be non-empty")
        if any(i < 0 for i in idx):
            raise ConfigurationError("marked indices must be non-negative")
        if len(set(idx)) != len(idx):
            raise ConfigurationError(f"duplicate marked indices in {idx}")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    @classmethod
    def parse(cls, items: Iterable[int | str] | str, qubits: int | None = None) -> "MarkedSet":
        """Accept integers or most-significant-first bit strings (``"0100"`` -> 4)."""
        if isinstance(items, str):
            items = [s for s in items.split(",") if s.strip()]
        out = []
        for item in items:
            if isinstance(item, bool):
                raise ConfigurationError(f"bad marked entry {item!r}")
            if isinstance(item, (int, np.integer)):
                out.append(int(item))
                continue
            text = str(item).strip()
            is_ket = text.startswith("|") and text.endswith(">")
            if is_ket:
                text = text[1:-1]
            # a 0/1 string is read as bits when written as a ket or when its
            # width matches the register (width > 1 if the register is unknown)
            bitlike = bool(text) and set(text) <= {"0", "1"}
            width_ok = len(text) == qubits if qubits is not None else len(text) > 1
            if is_ket or (bitlike and width_ok):
                if not bitlike or (qubits is not None and len(text) != qubits):
                    raise ConfigurationError(f"bad bit string {item!r} for {qubits} qubits")
                out.append(int(text, 2))
            elif text.isdigit():
                out.append(int(text))
            else:
                raise ConfigurationError(f"bad marked entry {item!r}")
        ms = cls(tuple(out))
        if qubits is not None:
            ms.check_fits(qubits)
        return ms

    def check_fits(self, qubits: int) -> None:
        if self.indices[-1] >= 2**qubits:
            raise ConfigurationError(
                f"marked index {self.indices[-1]} out of range for {qubits} qubits"
            )

    def bitstrings(self, qubits: int) -> list[str]:
        return [format(i, f"0{qubits}b") for i in self.indices]

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, index) -> bool:
        return int(index) in self.indices

    def __iter__(self):
        return iter(self.indices)


class StateVector:
    """Immutable normalized amplitude vector over ``2**qubits`` basis states."""

    __slots__ = ("_amps", "_qubits")

    def __init__(self, amps: Sequence[complex] | np.ndarray, *, check: bool = True):
        arr = np.array(amps, dtype=complex).reshape(-1)
        size = arr.shape[0]
        qubits = size.bit_length() - 1
        if size < 2 or size != 1 << qubits:
            raise ConfigurationError(f"amplitude count {size} is not 2**n with n >= 1")
        if qubits > MAX_QUBITS:
            raise ConfigurationError(f"{qubits} qubits exceeds the cap of {MAX_QUBITS}")
        if check:
            norm2 = float(np.vdot(arr, arr).real)
            if not math.isfinite(norm2) or abs(norm2 - 1.0) > NORM_TOL:
                raise ConfigurationError(f"state is not normalized (norm^2 = {norm2!r})")
        arr.flags.writeable = False
        self._amps = arr
        self._qubits = qubits

    @classmethod
    def basis(cls, qubits: int, index: int) -> "StateVector":
        if not 0 <= index < 2**qubits:
            raise ConfigurationError(f"basis index {index} out of range for {qubits} qubits")
        amps = np.zeros(2**qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def uniform(cls, qubits: int) -> "StateVector":
        N = 2**qubits
        return cls(np.full(N, 1 / math.sqrt(N), dtype=complex))

    @property
    def qubits(self) -> int:
        return self._qubits

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    def __len__(self) -> int:
        return self._amps.shape[0]

    def __getitem__(self, index):
        return self._amps[index]

    def __neg__(self) -> "StateVector":
        return StateVector(-self._amps, check=False)

    def __repr__(self) -> str:
        return f"StateVector(qubits={self._qubits}, {format_ket(self)})"

    def norm(self) -> float:
        return math.sqrt(float(np.vdot(self._amps, self._amps).real))

    def allclose(self, other: "StateVector", atol: float = NORM_TOL) -> bool:
        return len(self) == len(other) and bool(np.max(np.abs(self._amps - other._amps)) <= atol)

    def equal_up_to_phase(self, other: "StateVector", atol: float = NORM_TOL) -> bool:
        return len(self) == len(other) and abs(abs(np.vdot(self._amps, other._amps)) - 1.0) <= atol


def _same_dims(a: StateVector, b: StateVector) -> None:
    if a.qubits != b.qubits:
        raise ConfigurationError(f"dimension mismatch: {a.qubits} vs {b.qubits} qubits")


@functools.lru_cache(maxsize=4096)
def expand_product(p: ProductState) -> StateVector:
    amps = np.ones(1, dtype=complex)
    for letter in p.letters:
        amps = np.outer(amps, letter.vector).reshape(-1)
    return StateVector(amps)


def apply_oracle(s: StateVector, w: MarkedSet) -> StateVector:
    """Phase-flip every marked basis state (I - 2 sum_w |w><w|)."""
    w.check_fits(s.qubits)
    amps = s.amplitudes.copy()
    amps[list(w.indices)] *= -1
    return StateVector(amps, check=False)


def apply_diffusion(s: StateVector, about: StateVector) -> StateVector:
    """Reflect ``s`` about ``about``: returns 2<about|s> about - s."""
    _same_dims(s, about)
    overlap = np.vdot(about.amplitudes, s.amplitudes)
    return StateVector(2 * overlap * about.amplitudes - s.amplitudes)


def inner_product(a: StateVector, b: StateVector) -> complex:
    _same_dims(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def measure_distribution(s: StateVector) -> np.ndarray:
    """Born-rule probabilities, indexed by basis integer."""
    return np.abs(s.amplitudes) ** 2


# Pinned generator: numpy PCG64 seeded with the given integer, consumed one
# double in [0, 1) per measurement via Generator.random().
def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFF_FFFF_FFFF_FFFF))


def sample_from(probs: np.ndarray, u: float | np.ndarray):
    """Inverse CDF over ascending indices for uniform draw(s) ``u``."""
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(probs) - 1)


def sample_measurement(s: StateVector, rng: np.random.Generator) -> int:
    return int(sample_from(measure_distribution(s), rng.random()))


def format_ket(s: StateVector, tol: float = 1e-12, limit: int = 8) -> str:
    terms = []
    n = s.qubits
    for i, a in enumerate(s.amplitudes):
        if abs(a) > tol:
            terms.append(f"({a.real:.4g}{a.imag:+.4g}j)|{i:0{n}b}>")
    more = f" + ...{len(terms) - limit} more" if len(terms) > limit else ""
    return " + ".join(terms[:limit]) + more
