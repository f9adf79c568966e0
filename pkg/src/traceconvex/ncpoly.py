"""Elements of the free algebra on symmetric letters.

Letters are small integers (``X = 0`` is the matrix variable, ``H = 1`` and
``H2 = 2`` are direction letters; higher indices are formal symbols).  A word
is a tuple of letters, and an :class:`NcPoly` is a sparse table mapping words
to coefficients.  Coefficients are either exact (:class:`fractions.Fraction`)
or double precision; one polynomial never mixes the two.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError

X, H, H2 = 0, 1, 2
EXACT, FLOAT = "exact", "float"
MODES = (EXACT, FLOAT)

# dropped after float arithmetic
FLOAT_CLEANUP = 1e-14

_NAMES = {X: "x", H: "h", H2: "h2"}
_LETTER_RE = re.compile(r"^(x|h|h1|h2|y(\d+))$")


def letter_name(letter: int) -> str:
    return _NAMES.get(letter, f"y{letter}")


def parse_letter(name: str) -> int:
    m = _LETTER_RE.match(name.strip())
    if not m:
        raise InputError(f"unknown letter {name!r}")
    tok = m.group(1)
    if tok == "x":
        return X
    if tok in ("h", "h1"):
        return H
    if tok == "h2":
        return H2
    return int(m.group(2))


def word_str(word: tuple) -> str:
    if not word:
        return "1"
    return "*".join(letter_name(a) for a in word)


def parse_word(text: str) -> tuple:
    text = text.strip()
    if text in ("", "1"):
        return ()
    return tuple(parse_letter(part) for part in text.split("*"))


def word_key(word: tuple):
    """Sort key: shorter words first, then lexicographic by letter index."""
    return (len(word), word)


def least_rotation(word: tuple) -> tuple:
    """Lexicographically least rotation of ``word`` (Booth's algorithm, linear time)."""
    n = len(word)
    if n < 2:
        return tuple(word)
    s = tuple(word) + tuple(word)
    fail = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = s[j]
        i = fail[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = fail[i]
        if i == -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j
            fail[j - k] = -1
        else:
            fail[j - k] = i + 1
    return s[k:k + n]


def coerce_scalar(c, mode: str):
    if mode == EXACT:
        if isinstance(c, Fraction):
            return c
        if isinstance(c, Rational):
            return Fraction(c)
        raise InputError(f"exact-mode coefficient must be rational, got {c!r}")
    if mode == FLOAT:
        try:
            return float(c)
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad coefficient {c!r}") from exc
    raise InputError(f"unknown coefficient mode {mode!r}")


def _is_zero(c, mode):
    if mode == EXACT:
        return c == 0
    return abs(c) < FLOAT_CLEANUP


class NcPoly:
    """Immutable noncommutative polynomial."""

    __slots__ = ("_terms", "_mode")

    def __init__(self, terms: Mapping[tuple, object] | None = None, mode: str = EXACT):
        if mode not in MODES:
            raise InputError(f"unknown coefficient mode {mode!r}")
        table = {}
        for word, c in (terms or {}).items():
            word = tuple(int(a) for a in word)
            c = coerce_scalar(c, mode)
            if word in table:
                c = table[word] + c
            table[word] = c
        self._terms = {w: c for w, c in table.items() if not _is_zero(c, mode)}
        self._mode = mode

    @classmethod
    def _raw(cls, table: dict, mode: str) -> "NcPoly":
        obj = cls.__new__(cls)
        obj._terms = {w: c for w, c in table.items() if not _is_zero(c, mode)}
        obj._mode = mode
        return obj

    @classmethod
    def constant(cls, c, mode: str = EXACT) -> "NcPoly":
        return cls({(): c}, mode)

    @classmethod
    def letter(cls, letter: int, mode: str = EXACT) -> "NcPoly":
        return cls({(letter,): 1}, mode)

    @classmethod
    def monomial(cls, word: Iterable[int], c=1, mode: str = EXACT) -> "NcPoly":
        return cls({tuple(word): c}, mode)

    @classmethod
    def zero(cls, mode: str = EXACT) -> "NcPoly":
        return cls._raw({}, mode)

    @property
    def mode(self) -> str:
        return self._mode

    @property
    def terms(self) -> Mapping[tuple, object]:
        return MappingProxyType(self._terms)

    def coefficient(self, word) -> object:
        return self._terms.get(tuple(word), coerce_scalar(0, self._mode))

    def words(self) -> list:
        return sorted(self._terms, key=word_key)

    def items(self):
        for w in self.words():
            yield w, self._terms[w]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def degree(self) -> int:
        """Length of the longest word; -1 for the zero polynomial."""
        return max((len(w) for w in self._terms), default=-1)

    def degree_in(self, letter: int) -> int:
        return max((w.count(letter) for w in self._terms), default=-1)

    def is_homogeneous_in(self, letter: int, degree: int) -> bool:
        return all(w.count(letter) == degree for w in self._terms)

    def letters(self) -> set:
        return {a for w in self._terms for a in w}

    def max_abs_coefficient(self):
        return max((abs(c) for c in self._terms.values()), default=coerce_scalar(0, self._mode))

    def _check(self, other: "NcPoly"):
        if other._mode != self._mode:
            raise InputError(f"coefficient mode mismatch: {self._mode} vs {other._mode}")

    def _lift(self, other) -> "NcPoly":
        if isinstance(other, NcPoly):
            self._check(other)
            return other
        return NcPoly.constant(other, self._mode)

    def __add__(self, other):
        other = self._lift(other)
        table = dict(self._terms)
        for w, c in other._terms.items():
            table[w] = table[w] + c if w in table else c
        return NcPoly._raw(table, self._mode)

    __radd__ = __add__

    def __neg__(self):
        return NcPoly._raw({w: -c for w, c in self._terms.items()}, self._mode)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "NcPoly":
        c = coerce_scalar(c, self._mode)
        return NcPoly._raw({w: c * v for w, v in self._terms.items()}, self._mode)

    def __mul__(self, other):
        if not isinstance(other, NcPoly):
            return self.scale(other)
        self._check(other)
        table = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                table[w] = table.get(w, 0) + c1 * c2
        return NcPoly._raw(table, self._mode)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise InputError("negative power")
        out = NcPoly.constant(1, self._mode)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self._mode == other._mode and self._terms == other._terms

    def __hash__(self):
        return hash((self._mode, frozenset(self._terms.items())))

    def involute(self) -> "NcPoly":
        return NcPoly._raw({w[::-1]: c for w, c in self._terms.items()}, self._mode)

    def cyclic_canonical(self) -> "NcPoly":
        table = {}
        for w, c in self._terms.items():
            r = least_rotation(w)
            table[r] = table.get(r, 0) + c
        return NcPoly._raw(table, self._mode)

    def substitute(self, letter: int, value: "NcPoly") -> "NcPoly":
        """Replace every occurrence of ``letter`` by ``value``."""
        self._check(value)
        out = NcPoly.zero(self._mode)
        for w, c in self._terms.items():
            term = NcPoly.constant(c, self._mode)
            for a in w:
                term = term * (value if a == letter else NcPoly.letter(a, self._mode))
            out = out + term
        return out

    def to_float(self) -> "NcPoly":
        if self._mode == FLOAT:
            return self
        return NcPoly({w: float(c) for w, c in self._terms.items()}, FLOAT)

    def to_mode(self, mode: str) -> "NcPoly":
        if mode == self._mode:
            return self
        if mode == FLOAT:
            return self.to_float()
        raise InputError("cannot convert a float polynomial to exact mode")

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"NcPoly({render(self)!r}, mode={self._mode!r})"


def render(p: NcPoly) -> str:
    """Signed term list, e.g. ``2*x*h*h*x - 3*h``."""
    if p.is_zero():
        return "0"
    parts = []
    for w, c in p.items():
        neg = c < 0
        mag = -c if neg else c
        if w and mag == 1:
            body = word_str(w)
        elif w:
            body = f"{_fmt(mag)}*{word_str(w)}"
        else:
            body = _fmt(mag)
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(c)


# -- functional API ---------------------------------------------------------

def add(p: NcPoly, q: NcPoly) -> NcPoly:
    return p + q


def negate(p: NcPoly) -> NcPoly:
    return -p


def scale(p: NcPoly, c) -> NcPoly:
    return p.scale(c)


def multiply(p: NcPoly, q: NcPoly) -> NcPoly:
    return p * q


def involute(p: NcPoly) -> NcPoly:
    return p.involute()


def cyclic_canonical(p: NcPoly) -> NcPoly:
    return p.cyclic_canonical()


def cyc_residual(p: NcPoly, q: NcPoly):
    """Largest coefficient magnitude of the cyclic canonical form of ``p - q``."""
    return (p - q).cyclic_canonical().max_abs_coefficient()


def cyc_equal(p: NcPoly, q: NcPoly, tol=0) -> bool:
    if p.mode != q.mode:
        raise InputError(f"coefficient mode mismatch: {p.mode} vs {q.mode}")
    return cyc_residual(p, q) <= tol


def commutator(p: NcPoly, q: NcPoly) -> NcPoly:
    return p * q - q * p


# -- evaluation on symmetric matrices --------------------------------------

@dataclass(frozen=True)
class MatrixAssignment:
    """Symmetric n x n matrices assigned to letters."""

    matrices: Mapping[int, np.ndarray]

    def __post_init__(self):
        mats = {}
        n = None
        for letter, m in self.matrices.items():
            arr = np.asarray(m)
            if arr.ndim == 0:
                arr = arr.reshape(1, 1)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise InputError(f"letter {letter_name(letter)}: matrix must be square")
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise InputError("all assigned matrices must have the same size")
            if arr.dtype == object:
                if not all(arr[i, j] == arr[j, i] for i in range(n) for j in range(i)):
                    raise InputError(f"letter {letter_name(letter)}: matrix is not symmetric")
            else:
                arr = arr.astype(float)
                if n and np.max(np.abs(arr - arr.T)) > 1e-12:
                    raise InputError(f"letter {letter_name(letter)}: matrix is not symmetric")
            mats[int(letter)] = arr
        if n is None:
            raise InputError("empty matrix assignment")
        object.__setattr__(self, "matrices", MappingProxyType(mats))

    @property
    def n(self) -> int:
        return next(iter(self.matrices.values())).shape[0]

    @property
    def exact(self) -> bool:
        return all(m.dtype == object for m in self.matrices.values())

    def __getitem__(self, letter):
        return self.matrices[letter]


def _identity(A: MatrixAssignment):
    if A.exact:
        eye = np.empty((A.n, A.n), dtype=object)
        for i in range(A.n):
            for j in range(A.n):
                eye[i, j] = Fraction(int(i == j))
        return eye
    return np.eye(A.n)


def _word_products(p: NcPoly, A: MatrixAssignment):
    missing = p.letters() - set(A.matrices)
    if missing:
        raise InputError("unassigned letters: " + ", ".join(letter_name(a) for a in sorted(missing)))
    cache = {(): _identity(A)}

    def prod(w):
        got = cache.get(w)
        if got is None:
            got = prod(w[:-1]) @ A.matrices[w[-1]]
            cache[w] = got
        return got

    for w, c in p._terms.items():
        yield w, c, prod(w)


def evaluate(p: NcPoly, A: MatrixAssignment) -> np.ndarray:
    total = None
    for _, c, m in _word_products(p, A):
        term = m * c
        total = term if total is None else total + term
    if total is None:
        total = _identity(A) * 0
    return total


def trace_evaluate(p: NcPoly, A: MatrixAssignment):
    total = 0
    for _, c, m in _word_products(p, A):
        total = total + c * np.trace(m)
    return total


def trace_terms(p: NcPoly, A: MatrixAssignment) -> tuple:
    """Trace value together with ``sum |c| * ||word matrix||_F`` (a rounding scale)."""
    total = 0.0
    mag = 0.0
    for _, c, m in _word_products(p, A):
        t = float(c) * float(np.trace(m))
        total += t
        mag += abs(float(c)) * float(np.linalg.norm(m))
    return total, mag
