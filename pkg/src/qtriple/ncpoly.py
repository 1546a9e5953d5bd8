"""Canonical forms in the q-deformed unitary algebra on generators a, b.

The *-algebra is generated by two elements ``a`` ("alpha") and ``b`` ("beta")
subject to

    a* a + b* b = 1          a a* + q^2 b b* = 1
    a b  = q b a             a b* = q b* a
    b* b = b b*

with a fixed real deformation parameter 0 < q < 1.  Every element reduces to
a unique linear combination of the canonical monomials

    a^k  b^n b*^m        (k >= 0)
    a*^k b^n b*^m        (k >= 1)

and this module implements that reduction as a terminating rewriting system
together with the product, involution and the sign flip  g: a -> -a, b -> -b
whose fixed points form the even (quantum SO(3)) subalgebra.

Rewrite rule set (derived from the relations above and their adjoints):

    b  a   -> q^-1 a  b         b  a*  -> q a*  b
    b* a   -> q^-1 a  b*        b* a*  -> q a*  b*
    a* a   -> 1 - b* b          a  a*  -> 1 - q^2 b b*
    b* b   -> b b*

Contractions (the two mixed a/a* rules) strictly reduce the number of mixed
alpha pairs, transpositions strictly reduce inversions against the letter
order a, a* < b < b*, so rewriting terminates; uniqueness of the resulting
normal form is checked against the faithful-representation oracle in `rep`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "ALPHA", "ALPHA_STAR", "BETA", "BETA_STAR", "LETTERS", "UNIT_MONOMIAL",
    "QParam", "CanonicalMonomial", "Word", "NCPolynomial",
    "normalize", "mul", "adjoint", "z2_act", "z2_project",
    "module_decompose", "monomials_up_to", "random_word", "random_polynomial",
    "DegreeOverflowError", "ParityError",
]

# letter codes for free words
ALPHA, ALPHA_STAR, BETA, BETA_STAR = 0, 1, 2, 3
LETTERS = (ALPHA, ALPHA_STAR, BETA, BETA_STAR)

LETTER_NAMES = {ALPHA: "a", ALPHA_STAR: "a*", BETA: "b", BETA_STAR: "b*"}
ADJOINT_OF = {ALPHA: ALPHA_STAR, ALPHA_STAR: ALPHA, BETA: BETA_STAR, BETA_STAR: BETA}


class DegreeOverflowError(ValueError):
    """Raised when a product or parsed power exceeds the configured degree cap."""


class ParityError(ValueError):
    """Raised when an operation requires definite (odd) parity input."""


@dataclass(frozen=True)
class QParam:
    """Deformation parameter plus the numeric policy attached to it.

    ``prune`` is the absolute magnitude below which coefficients are dropped
    after every normalization, ``max_degree`` caps monomial degrees.  q = 1 is
    the commutative cross-check regime and must be requested explicitly.
    """

    q: float
    classical: bool = False
    prune: float = 1e-14
    max_degree: int = 64

    def __post_init__(self):
        if self.classical:
            if not 0.0 < self.q <= 1.0:
                raise ValueError(f"need 0 < q <= 1 in classical mode, got {self.q}")
        elif not 0.0 < self.q < 1.0:
            raise ValueError(f"deformation parameter must satisfy 0 < q < 1, got {self.q}")
        if self.prune < 0.0:
            raise ValueError("prune threshold must be nonnegative")
        if self.max_degree < 1:
            raise ValueError("max_degree must be positive")


@dataclass(frozen=True, order=True)
class CanonicalMonomial:
    """One basis element a^k b^n b*^m (alpha > 0) or a*^|k| b^n b*^m (alpha < 0).

    ``alpha`` is the signed alpha exponent, ``beta``/``beta_star`` the
    nonnegative b and b* exponents.
    """

    alpha: int
    beta: int
    beta_star: int

    def __post_init__(self):
        if self.beta < 0 or self.beta_star < 0:
            raise ValueError("beta exponents must be nonnegative")

    @property
    def degree(self) -> int:
        return abs(self.alpha) + self.beta + self.beta_star

    @property
    def parity(self) -> int:
        """+1 for even total degree, -1 for odd."""
        return -1 if self.degree % 2 else 1

    @property
    def charges(self) -> tuple[int, int]:
        """The two commuting gradings (alpha exponent, beta minus beta* exponent)."""
        return (self.alpha, self.beta - self.beta_star)

    def letters(self) -> tuple[int, ...]:
        alpha_part = (ALPHA,) * self.alpha if self.alpha >= 0 else (ALPHA_STAR,) * (-self.alpha)
        return alpha_part + (BETA,) * self.beta + (BETA_STAR,) * self.beta_star

    def __str__(self):
        if self.degree == 0:
            return "1"
        parts = []
        if self.alpha > 0:
            parts.append("a" + (f"^{self.alpha}" if self.alpha > 1 else ""))
        elif self.alpha < 0:
            parts.append("a*" + (f"^{-self.alpha}" if self.alpha < -1 else ""))
        if self.beta:
            parts.append("b" + (f"^{self.beta}" if self.beta > 1 else ""))
        if self.beta_star:
            parts.append("b*" + (f"^{self.beta_star}" if self.beta_star > 1 else ""))
        return " ".join(parts)


UNIT_MONOMIAL = CanonicalMonomial(0, 0, 0)


@dataclass(frozen=True)
class Word:
    """A free (unreduced) word over {a, a*, b, b*} with a scalar coefficient."""

    letters: tuple[int, ...]
    coefficient: complex = 1.0 + 0.0j

    def __post_init__(self):
        if any(l not in LETTERS for l in self.letters):
            raise ValueError(f"invalid letters in {self.letters!r}")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        body = " ".join(LETTER_NAMES[l] for l in self.letters) or "1"
        return f"({self.coefficient}) {body}"


class NCPolynomial:
    """Finite complex combination of canonical monomials; immutable after build.

    Every constructor path prunes coefficients below ``qp.prune``, so the zero
    polynomial always has empty support.
    """

    __slots__ = ("qp", "terms")

    def __init__(self, qp: QParam, terms=None):
        pruned = {}
        if terms:
            for mon, c in terms.items():
                c = complex(c)
                if abs(c) > qp.prune:
                    pruned[mon] = c
        object.__setattr__(self, "qp", qp)
        object.__setattr__(self, "terms", pruned)

    def __setattr__(self, name, value):
        raise AttributeError("NCPolynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, qp: QParam) -> "NCPolynomial":
        return cls(qp, {})

    @classmethod
    def one(cls, qp: QParam) -> "NCPolynomial":
        return cls(qp, {UNIT_MONOMIAL: 1.0})

    @classmethod
    def monomial(cls, qp: QParam, mon: CanonicalMonomial, coeff=1.0) -> "NCPolynomial":
        return cls(qp, {mon: coeff})

    @classmethod
    def generator(cls, qp: QParam, letter: int) -> "NCPolynomial":
        mon = {
            ALPHA: CanonicalMonomial(1, 0, 0),
            ALPHA_STAR: CanonicalMonomial(-1, 0, 0),
            BETA: CanonicalMonomial(0, 1, 0),
            BETA_STAR: CanonicalMonomial(0, 0, 1),
        }[letter]
        return cls(qp, {mon: 1.0})

    # -- ring structure ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = NCPolynomial(self.qp, {UNIT_MONOMIAL: other})
        if other.qp != self.qp:
            raise ValueError("mixed deformation parameters")
        acc = dict(self.terms)
        for mon, c in other.terms.items():
            acc[mon] = acc.get(mon, 0.0) + c
        return NCPolynomial(self.qp, acc)

    __radd__ = __add__

    def __neg__(self):
        return NCPolynomial(self.qp, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, NCPolynomial) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return NCPolynomial(self.qp, {m: c * other for m, c in self.terms.items()})
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return NCPolynomial(self.qp, {m: other * c for m, c in self.terms.items()})
        return NotImplemented

    def __eq__(self, other):
        return (isinstance(other, NCPolynomial) and self.qp == other.qp
                and self.terms == other.terms)

    __hash__ = None  # mutable-looking container semantics

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Maximal total degree in the support (-1 for the zero polynomial)."""
        return max((m.degree for m in self.terms), default=-1)

    def coeff(self, mon: CanonicalMonomial) -> complex:
        return self.terms.get(mon, 0.0 + 0.0j)

    def adjoint(self) -> "NCPolynomial":
        return adjoint(self)

    def z2(self) -> "NCPolynomial":
        return z2_act(self)

    def allclose(self, other: "NCPolynomial", tol: float = 1e-12) -> bool:
        if self.qp != other.qp:
            return False
        for mon in self.terms.keys() | other.terms.keys():
            if abs(self.coeff(mon) - other.coeff(mon)) > tol:
                return False
        return True

    def max_coeff_diff(self, other: "NCPolynomial") -> float:
        return max((abs(self.coeff(m) - other.coeff(m))
                    for m in self.terms.keys() | other.terms.keys()), default=0.0)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mon in sorted(self.terms, key=lambda m: (m.degree, -m.alpha, m.beta)):
            parts.append(f"({self.terms[mon]:.12g}) {mon}")
        return " + ".join(parts)

    __repr__ = __str__

    # -- wire format -------------------------------------------------------

    def to_json_dict(self) -> dict:
        """Frozen serialization {"q": ..., "terms": [{"a","b","bs","re","im"}]}."""
        return {
            "q": self.qp.q,
            "terms": [
                {"a": m.alpha, "b": m.beta, "bs": m.beta_star,
                 "re": c.real, "im": c.imag}
                for m, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict, qp: QParam | None = None) -> "NCPolynomial":
        qp = qp or QParam(float(data["q"]))
        terms = {}
        for t in data["terms"]:
            mon = CanonicalMonomial(int(t["a"]), int(t["b"]), int(t["bs"]))
            terms[mon] = complex(float(t["re"]), float(t["im"]))
        return cls(qp, terms)


# ---------------------------------------------------------------------------
# The rewriting engine
# ---------------------------------------------------------------------------

# transpositions: (left, right) -> (q exponent of the factor, swapped pair)
_SWAPS = {
    (BETA, ALPHA): (-1, (ALPHA, BETA)),
    (BETA_STAR, ALPHA): (-1, (ALPHA, BETA_STAR)),
    (BETA, ALPHA_STAR): (1, (ALPHA_STAR, BETA)),
    (BETA_STAR, ALPHA_STAR): (1, (ALPHA_STAR, BETA_STAR)),
    (BETA_STAR, BETA): (0, (BETA, BETA_STAR)),
}

_CONTRACTIONS = frozenset({(ALPHA_STAR, ALPHA), (ALPHA, ALPHA_STAR)})


def normalize(word: Word, qp: QParam, stats: dict | None = None) -> NCPolynomial:
    """Reduce a free word to its canonical-basis expansion.

    Contractions (a*a, aa*) are eliminated before any transposition is
    applied; the combined measure (mixed alpha pairs, inversion count)
    strictly decreases at every rule application.  If ``stats`` is given,
    the number of rule applications is accumulated under ``"steps"``.
    """
    q = qp.q
    out: dict[CanonicalMonomial, complex] = {}
    stack: list[tuple[complex, tuple[int, ...]]] = [(complex(word.coefficient), tuple(word.letters))]
    steps = 0
    while stack:
        c, w = stack.pop()
        while True:
            pos = _first_contraction(w)
            if pos is not None:
                steps += 1
                left, right = w[:pos], w[pos + 2:]
                if w[pos] == ALPHA_STAR:  # a* a -> 1 - b* b
                    stack.append((-c, left + (BETA_STAR, BETA) + right))
                else:                     # a a* -> 1 - q^2 b b*
                    stack.append((-c * q * q, left + (BETA, BETA_STAR) + right))
                w = left + right
                continue
            pos = _first_swap(w)
            if pos is None:
                break
            steps += 1
            exp, swapped = _SWAPS[w[pos], w[pos + 1]]
            if exp:
                c = c * (q ** exp)
            w = w[:pos] + swapped + w[pos + 2:]
        mon = _canonical_of(w)
        out[mon] = out.get(mon, 0.0) + c
    if stats is not None:
        stats["steps"] = stats.get("steps", 0) + steps
    return NCPolynomial(qp, out)


def _first_contraction(w):
    for i in range(len(w) - 1):
        if (w[i], w[i + 1]) in _CONTRACTIONS:
            return i
    return None


def _first_swap(w):
    for i in range(len(w) - 1):
        if (w[i], w[i + 1]) in _SWAPS:
            return i
    return None


def _canonical_of(w: tuple[int, ...]) -> CanonicalMonomial:
    # the word must already have shape [a... or a*...][b...][b*...]
    i = 0
    alpha = 0
    if i < len(w) and w[i] == ALPHA:
        while i < len(w) and w[i] == ALPHA:
            alpha += 1
            i += 1
    elif i < len(w) and w[i] == ALPHA_STAR:
        while i < len(w) and w[i] == ALPHA_STAR:
            alpha -= 1
            i += 1
    beta = 0
    while i < len(w) and w[i] == BETA:
        beta += 1
        i += 1
    beta_star = 0
    while i < len(w) and w[i] == BETA_STAR:
        beta_star += 1
        i += 1
    if i != len(w):
        raise AssertionError(f"word not in canonical shape: {w}")
    return CanonicalMonomial(alpha, beta, beta_star)


@lru_cache(maxsize=1 << 18)
def _monomial_product(qp: QParam, m1: CanonicalMonomial, m2: CanonicalMonomial) -> NCPolynomial:
    return normalize(Word(m1.letters() + m2.letters()), qp)


@lru_cache(maxsize=1 << 16)
def _monomial_adjoint(qp: QParam, m: CanonicalMonomial) -> NCPolynomial:
    reversed_starred = tuple(ADJOINT_OF[l] for l in reversed(m.letters()))
    return normalize(Word(reversed_starred), qp)


def mul(x: NCPolynomial, y: NCPolynomial) -> NCPolynomial:
    """Product in the algebra: normalize the concatenation, bilinearly."""
    if x.qp != y.qp:
        raise ValueError("mixed deformation parameters")
    qp = x.qp
    acc: dict[CanonicalMonomial, complex] = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            if m1.degree + m2.degree > qp.max_degree:
                raise DegreeOverflowError(
                    f"product degree {m1.degree + m2.degree} exceeds cap {qp.max_degree}")
            scale = c1 * c2
            for mon, c in _monomial_product(qp, m1, m2).terms.items():
                acc[mon] = acc.get(mon, 0.0) + scale * c
    return NCPolynomial(qp, acc)


def adjoint(x: NCPolynomial) -> NCPolynomial:
    """The involution: conjugate-linear, anti-multiplicative, involutive."""
    acc: dict[CanonicalMonomial, complex] = {}
    for m, c in x.terms.items():
        scale = c.conjugate()
        for mon, cc in _monomial_adjoint(x.qp, m).terms.items():
            acc[mon] = acc.get(mon, 0.0) + scale * cc
    return NCPolynomial(x.qp, acc)


def z2_act(x: NCPolynomial) -> NCPolynomial:
    """Sign-flip automorphism a -> -a, b -> -b: scales each monomial by (-1)^degree."""
    return NCPolynomial(x.qp, {m: (c if m.degree % 2 == 0 else -c) for m, c in x.terms.items()})


def z2_project(x: NCPolynomial, sector: str) -> NCPolynomial:
    """Parity projection; ``sector`` is "even" or "odd".  even + odd == x."""
    if sector not in ("even", "odd"):
        raise ValueError(f"sector must be 'even' or 'odd', got {sector!r}")
    keep = 0 if sector == "even" else 1
    return NCPolynomial(x.qp, {m: c for m, c in x.terms.items() if m.degree % 2 == keep})


def _peel(mon: CanonicalMonomial) -> tuple[CanonicalMonomial, int]:
    """Split an odd monomial as (even factor, generator letter), peeled from the right.

    Cases follow the structure of the basis: strip b* if present, else b,
    else one alpha letter.  Reassembly by `mul` is exact (coefficient 1)."""
    if mon.beta_star > 0:
        return CanonicalMonomial(mon.alpha, mon.beta, mon.beta_star - 1), BETA_STAR
    if mon.beta > 0:
        return CanonicalMonomial(mon.alpha, mon.beta - 1, 0), BETA
    if mon.alpha > 0:
        return CanonicalMonomial(mon.alpha - 1, 0, 0), ALPHA
    if mon.alpha < 0:
        return CanonicalMonomial(mon.alpha + 1, 0, 0), ALPHA_STAR
    raise AssertionError("unit monomial has no generator factor")


def module_decompose(x: NCPolynomial) -> list[tuple[NCPolynomial, int]]:
    """Write an odd-parity element as sum of (even factor) * generator.

    Exposes the even subalgebra's module structure: the returned pairs
    satisfy  x == sum(mul(factor, generator))  exactly, with every factor of
    even parity.  Even-parity input is rejected; project first.
    """
    if any(m.degree % 2 == 0 for m in x.terms):
        raise ParityError("module_decompose needs odd-parity input; z2_project to 'odd' first")
    buckets: dict[int, dict[CanonicalMonomial, complex]] = {}
    for mon, c in x.terms.items():
        factor, letter = _peel(mon)
        buckets.setdefault(letter, {})
        buckets[letter][factor] = buckets[letter].get(factor, 0.0) + c
    return [(NCPolynomial(x.qp, terms), letter) for letter, terms in sorted(buckets.items())]


# ---------------------------------------------------------------------------
# Enumeration and sampling helpers (shared by verification suites and tests)
# ---------------------------------------------------------------------------

def monomials_up_to(max_degree: int, parity: str | None = None):
    """All canonical monomials of total degree <= max_degree, optionally one parity."""
    out = []
    for d in range(max_degree + 1):
        if parity == "even" and d % 2:
            continue
        if parity == "odd" and d % 2 == 0:
            continue
        for a in range(-d, d + 1):
            rest = d - abs(a)
            for n in range(rest + 1):
                out.append(CanonicalMonomial(a, n, rest - n))
    return out


def random_word(rng, max_len: int, min_len: int = 1, with_coefficient: bool = False) -> Word:
    """Uniform random free word from a seeded ``random.Random``."""
    length = rng.randint(min_len, max_len)
    letters = tuple(rng.choice(LETTERS) for _ in range(length))
    if with_coefficient:
        coeff = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    else:
        coeff = 1.0 + 0.0j
    return Word(letters, coeff)


def random_polynomial(rng, qp: QParam, max_degree: int = 4, n_terms: int = 4,
                      parity: str | None = None) -> NCPolynomial:
    """Random element with the requested parity, for property checks."""
    pool = monomials_up_to(max_degree, parity)
    terms: dict[CanonicalMonomial, complex] = {}
    for _ in range(n_terms):
        mon = rng.choice(pool)
        terms[mon] = terms.get(mon, 0.0) + complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return NCPolynomial(qp, terms)
