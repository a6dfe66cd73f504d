"""Sparse noncommutative polynomials in n noncommuting variables.

Words are tuples of 1-based variable indices; the empty tuple is the unit
monomial.  Polynomials and bi-polynomials (elements of the tensor square)
are canonical maps from words to complex coefficients with no stored zeros,
so structural equality is meaningful and iteration is deterministic.

The text format used by the CLI and config files writes one term per
``coeff*x<i>...x<k>`` group, e.g. ``1*x1x2 + 1*x2x1``.  Coefficients may be
complex, written compactly (``1+2i``) or parenthesized (``(1+2i)``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NcPoly",
    "BiPoly",
    "MatrixTuple",
    "PolyParseError",
    "adjoint",
    "nc_derivative",
    "cyclic_derivative",
    "norm_R",
    "leading_weight",
    "projective_norm_R",
    "evaluate",
    "parse_poly",
    "format_poly",
]

NEG_INF = float("-inf")


def _word_key(word):
    return (len(word), word)


def _clean(terms):
    return {w: c for w, c in terms.items() if c != 0}


class NcPoly:
    """A noncommutative polynomial, stored as a word -> coefficient map."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        n = int(n)
        if n < 1:
            raise ValueError("variable count must be >= 1")
        terms = _clean(dict(terms or {}))
        for word in terms:
            if any(not (1 <= letter <= n) for letter in word):
                raise ValueError(f"word {word} has letters outside 1..{n}")
        self.n = n
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n):
        return cls(n, {})

    @classmethod
    def unit(cls, n):
        return cls(n, {(): 1.0 + 0.0j})

    @classmethod
    def variable(cls, j, n):
        return cls(n, {(j,): 1.0 + 0.0j})

    @classmethod
    def monomial(cls, word, n, coeff=1.0):
        return cls(n, {tuple(word): complex(coeff)})

    # -- structure ---------------------------------------------------------

    def degree(self):
        """Maximal stored word length; -inf for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        return max(len(w) for w in self.terms)

    def is_zero(self):
        return not self.terms

    def is_selfadjoint(self, tol=1e-12):
        scale = max((abs(c) for c in self.terms.values()), default=1.0)
        star = self.adjoint()
        keys = set(self.terms) | set(star.terms)
        return all(
            abs(self.terms.get(w, 0) - star.terms.get(w, 0)) <= tol * scale
            for w in keys
        )

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _word_key(kv[0]))

    # -- algebra -----------------------------------------------------------

    def adjoint(self):
        return NcPoly(
            self.n, {w[::-1]: c.conjugate() for w, c in self.terms.items()}
        )

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return NcPoly(self.n, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return NcPoly(self.n, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        if np.isscalar(other):
            return NcPoly(
                self.n, {w: c * complex(other) for w, c in self.terms.items()}
            )
        other = self._coerce(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return NcPoly(self.n, out)

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return self._coerce(other) * self

    def _coerce(self, other):
        if isinstance(other, NcPoly):
            if other.n != self.n:
                raise ValueError("variable counts differ")
            return other
        if np.isscalar(other):
            return NcPoly(self.n, {(): complex(other)})
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def approx_equal(self, other, tol=1e-10):
        keys = set(self.terms) | set(other.terms)
        scale = 1.0 + max(
            (abs(c) for c in list(self.terms.values()) + list(other.terms.values())),
            default=0.0,
        )
        return all(
            abs(self.terms.get(w, 0) - other.terms.get(w, 0)) <= tol * scale
            for w in keys
        )

    def __repr__(self):
        return f"NcPoly({self.n}, {format_poly(self)!r})"


class BiPoly:
    """Element of the tensor square: a map (left word, right word) -> coeff."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        n = int(n)
        if n < 1:
            raise ValueError("variable count must be >= 1")
        self.n = n
        self.terms = _clean(dict(terms or {}))

    @classmethod
    def zero(cls, n):
        return cls(n, {})

    @classmethod
    def tensor(cls, p, q):
        out = {}
        for w1, c1 in p.terms.items():
            for w2, c2 in q.terms.items():
                out[(w1, w2)] = out.get((w1, w2), 0) + c1 * c2
        return cls(p.n, out)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BiPoly(self.n, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return BiPoly(self.n, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        """Product in the tensor algebra: (a@b)(c@d) = ac @ bd."""
        if np.isscalar(other):
            return BiPoly(
                self.n, {k: c * complex(other) for k, c in self.terms.items()}
            )
        out = {}
        for (l1, r1), c1 in self.terms.items():
            for (l2, r2), c2 in other.terms.items():
                k = (l1 + l2, r1 + r2)
                out[k] = out.get(k, 0) + c1 * c2
        return BiPoly(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def approx_equal(self, other, tol=1e-10):
        keys = set(self.terms) | set(other.terms)
        scale = 1.0 + max(
            (abs(c) for c in list(self.terms.values()) + list(other.terms.values())),
            default=0.0,
        )
        return all(
            abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= tol * scale
            for k in keys
        )

    def __repr__(self):
        parts = [
            f"({format_word(l)}|{format_word(r)}):{c}"
            for (l, r), c in sorted(self.terms.items())
        ]
        return "BiPoly{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class MatrixTuple:
    """A tuple of square complex matrices, the evaluation point X_1..X_n."""

    matrices: tuple
    hermitian: tuple

    def __init__(self, matrices, hermitian=None):
        matrices = tuple(np.asarray(m, dtype=complex) for m in matrices)
        if not matrices:
            raise ValueError("empty matrix tuple")
        size = matrices[0].shape
        if len(size) != 2 or size[0] != size[1]:
            raise ValueError("matrices must be square")
        if any(m.shape != size for m in matrices):
            raise ValueError("matrices must share one size")
        if hermitian is None:
            hermitian = tuple(
                np.linalg.norm(m - m.conj().T) <= 1e-12 * (1.0 + np.linalg.norm(m))
                for m in matrices
            )
        else:
            hermitian = tuple(bool(h) for h in hermitian)
            for m, h in zip(matrices, hermitian):
                if h:
                    defect = np.linalg.norm(m - m.conj().T)
                    if defect > 1e-12 * (1.0 + np.linalg.norm(m)):
                        raise ValueError("matrix flagged hermitian is not")
        object.__setattr__(self, "matrices", matrices)
        object.__setattr__(self, "hermitian", hermitian)

    @property
    def n(self):
        return len(self.matrices)

    @property
    def size(self):
        return self.matrices[0].shape[0]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def adjoint(p):
    """Involution: reverse every word, conjugate every coefficient."""
    return p.adjoint()


def nc_derivative(p, j):
    """Derivative into the tensor square with d_j x_i = delta_ij 1 @ 1.

    Each occurrence of x_j inside a word splits it into the (prefix, suffix)
    pair; the map is the unique derivation with that action on letters.
    """
    if not (1 <= j <= p.n):
        raise IndexError(f"derivative index {j} outside 1..{p.n}")
    out = {}
    for word, c in p.terms.items():
        for pos, letter in enumerate(word):
            if letter == j:
                key = (word[:pos], word[pos + 1 :])
                out[key] = out.get(key, 0) + c
    return BiPoly(p.n, out)


def cyclic_derivative(p, j):
    """Cyclic derivative: every occurrence of x_j contributes suffix*prefix."""
    if not (1 <= j <= p.n):
        raise IndexError(f"derivative index {j} outside 1..{p.n}")
    out = {}
    for word, c in p.terms.items():
        for pos, letter in enumerate(word):
            if letter == j:
                w = word[pos + 1 :] + word[:pos]
                out[w] = out.get(w, 0) + c
    return NcPoly(p.n, out)


def norm_R(p, R):
    """Weighted coefficient-sum norm: sum over terms of |a| * R**degree."""
    if R <= 0:
        raise ValueError("R must be positive")
    return float(sum(abs(c) * R ** len(w) for w, c in p.terms.items()))


def leading_weight(p, R):
    """Largest top-degree coefficient mass |a| R^d relative to the full norm.

    Always in (0, 1]; equals 1 for a single monomial.  Rejects the zero
    polynomial, whose degree is the -inf sentinel.
    """
    if p.is_zero():
        raise ValueError("leading weight undefined for the zero polynomial")
    if R <= 0:
        raise ValueError("R must be positive")
    d = p.degree()
    top = max(abs(c) for w, c in p.terms.items() if len(w) == d)
    return top * R**d / norm_R(p, R)


def projective_norm_R(q, R):
    """Upper bound for the projective tensor norm of a bi-polynomial.

    Evaluates the term-by-term monomial split of the stored representation,
    summing ||left||_R * ||right||_R over terms.  This dominates the true
    infimum over all representations, which is never needed downstream.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    return float(
        sum(abs(c) * R ** (len(l) + len(r)) for (l, r), c in q.terms.items())
    )


def evaluate(p, X):
    """Evaluate p on a matrix tuple by direct word products.

    Accepts a :class:`MatrixTuple` or any sequence of equal-size square
    arrays.  Linear in the number of stored terms.
    """
    if isinstance(X, MatrixTuple):
        mats = X.matrices
    else:
        mats = tuple(np.asarray(m, dtype=complex) for m in X)
    if p.n > len(mats):
        raise ValueError(f"polynomial uses {p.n} variables, got {len(mats)} matrices")
    size = mats[0].shape[0]
    if any(m.shape != (size, size) for m in mats):
        raise ValueError("matrices must be square and share one size")
    out = np.zeros((size, size), dtype=complex)
    eye = np.eye(size, dtype=complex)
    for word, c in p.sorted_terms():
        acc = eye
        for letter in word:
            acc = acc @ mats[letter - 1]
        out = out + c * acc
    return out


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


class PolyParseError(ValueError):
    """Polynomial text rejected; carries the 0-based offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_FLOAT = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
# longest alternative first: full complex, parenthesized, imaginary, real
_COEFF_RE = re.compile(
    rf"\((?P<paren>[^()]*)\)"
    rf"|(?P<cplx>{_FLOAT}[+-](?:{_FLOAT})?[ij])"
    rf"|(?P<imag>(?:{_FLOAT})?[ij])"
    rf"|(?P<real>{_FLOAT})"
)
_MONO_RE = re.compile(r"(?:x\d+)+")
_LETTER_RE = re.compile(r"x(\d+)")


def _parse_complex(text, pos):
    body = text.replace(" ", "").replace("i", "j")
    if body in ("j", "+j"):
        return 1j
    if body == "-j":
        return -1j
    body = re.sub(r"([+-])j", r"\g<1>1j", body)
    try:
        return complex(body)
    except ValueError:
        raise PolyParseError(f"bad coefficient {text!r}", pos) from None


def parse_poly(text, n=None):
    """Parse the term-list text format into an :class:`NcPoly`.

    The variable count is inferred from the largest index seen unless ``n``
    is given.  Raises :class:`PolyParseError` with the offending position.
    """
    s = text
    pos = 0
    length = len(s)
    terms = {}
    max_letter = 0
    first = True
    while True:
        while pos < length and s[pos].isspace():
            pos += 1
        if pos >= length:
            if first:
                raise PolyParseError("empty polynomial", pos)
            break
        sign = 1.0
        if not first:
            if s[pos] == "+":
                pos += 1
            elif s[pos] == "-":
                sign = -1.0
                pos += 1
            else:
                raise PolyParseError(f"expected '+' or '-', got {s[pos]!r}", pos)
            while pos < length and s[pos].isspace():
                pos += 1
        elif pos < length and s[pos] in "+-":
            if s[pos] == "-":
                sign = -1.0
            pos += 1
            while pos < length and s[pos].isspace():
                pos += 1
        first = False
        coeff = None
        m = _COEFF_RE.match(s, pos)
        if m:
            raw = m.group("paren")
            coeff = _parse_complex(raw if raw is not None else m.group(0), pos)
            pos = m.end()
            while pos < length and s[pos].isspace():
                pos += 1
            if pos < length and s[pos] == "*":
                pos += 1
                while pos < length and s[pos].isspace():
                    pos += 1
        mono = _MONO_RE.match(s, pos)
        if mono:
            letters = tuple(int(g) for g in _LETTER_RE.findall(mono.group(0)))
            if any(letter < 1 for letter in letters):
                raise PolyParseError("variable indices start at x1", pos)
            max_letter = max(max_letter, *letters)
            pos = mono.end()
        elif coeff is None:
            raise PolyParseError("expected coefficient or monomial", pos)
        else:
            letters = ()
        if coeff is None:
            coeff = 1.0
        word = letters if mono else ()
        terms[word] = terms.get(word, 0) + sign * coeff
    if n is None:
        n = max(max_letter, 1)
    elif max_letter > n:
        raise PolyParseError(f"variable x{max_letter} exceeds n={n}", 0)
    return NcPoly(n, terms)


def format_word(word):
    return "".join(f"x{letter}" for letter in word) if word else "1"


def _format_coeff(c):
    c = complex(c)

    def fmt(x):
        if x == int(x) and abs(x) < 1e16:
            return str(int(x))
        return repr(x)

    if c.imag == 0:
        return fmt(c.real)
    if c.real == 0:
        return f"{fmt(c.imag)}i" if c.imag != 1 else "i"
    sign = "+" if c.imag >= 0 else "-"
    return f"({fmt(c.real)}{sign}{fmt(abs(c.imag))}i)"


def format_poly(p):
    """Canonical text for a polynomial; inverse of :func:`parse_poly`."""
    if p.is_zero():
        return "0"
    parts = []
    for word, c in p.sorted_terms():
        if word:
            parts.append(f"{_format_coeff(c)}*{format_word(word)}")
        else:
            parts.append(_format_coeff(c))
    return " + ".join(parts)
