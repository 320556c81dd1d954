"""Locally constant matrix generators and overflow-safe cocycle products.

A generator assigns a d x d matrix to every admissible window of length
2r+1; the cocycle product multiplies those matrices along an orbit.
Products are kept as (unit-norm body, log scale) pairs so chains of length
1e5 and beyond neither overflow nor underflow, and an exact-zero absorbing
state keeps genuine rank collapse distinguishable from round-off.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, inf, log
from typing import Mapping

import numpy as np

from .budget import enumeration_budget
from .errors import BudgetExceeded, InadmissibleWindow
from .sft import Sft, SymbolicPoint, admissible_words, as_word

# a product is declared singular when the smallest singular value of the
# body drops below this fraction of the largest
SINGULAR_RTOL = 1e-12


def op_norm(m) -> float:
    """Spectral norm (Euclidean operator norm)."""
    return float(np.linalg.norm(m, 2))


def is_singular(m, rtol=SINGULAR_RTOL) -> bool:
    """Rank-deficiency test: sigma_min <= rtol * sigma_max (exact zeros included)."""
    s = np.linalg.svd(m, compute_uv=False)
    return bool(s[0] == 0.0 or s[-1] <= rtol * s[0])


@dataclass(frozen=True)
class ScaledMatrix:
    """A matrix stored as exp(log_scale) * body with ||body||_F = 1.

    The Frobenius normalization keeps the operator norm of the body inside
    [d^-1/2, 1]; an exactly zero product is stored as (0, -inf) and absorbs
    all further factors.
    """

    body: np.ndarray
    log_scale: float

    @classmethod
    def identity(cls, dim: int) -> "ScaledMatrix":
        return cls.of(np.eye(dim))

    @classmethod
    def of(cls, matrix) -> "ScaledMatrix":
        matrix = np.asarray(matrix, dtype=float)
        nrm = float(np.linalg.norm(matrix))
        if nrm == 0.0:
            return cls(np.zeros_like(matrix), -inf)
        body = matrix / nrm
        body.setflags(write=False)
        return cls(body, log(nrm))

    @property
    def is_zero(self) -> bool:
        return self.log_scale == -inf

    def apply(self, factor) -> "ScaledMatrix":
        """Left-multiply by a new factor and renormalize."""
        if self.is_zero:
            return self
        raw = np.asarray(factor, dtype=float) @ self.body
        nrm = float(np.linalg.norm(raw))
        if nrm == 0.0:
            return ScaledMatrix(np.zeros_like(raw), -inf)
        body = raw / nrm
        body.setflags(write=False)
        return ScaledMatrix(body, self.log_scale + log(nrm))

    def value(self) -> np.ndarray:
        """Dense value exp(log_scale) * body; may overflow for huge scales."""
        if self.is_zero:
            return np.zeros_like(self.body)
        return np.exp(self.log_scale) * self.body

    def log_norm(self) -> float:
        """log of the operator norm, computed without leaving log space."""
        if self.is_zero:
            return -inf
        return self.log_scale + log(op_norm(self.body))

    def is_rank_deficient(self, rtol=SINGULAR_RTOL) -> bool:
        return self.is_zero or is_singular(self.body, rtol)


class MatrixGenerator:
    """Locally constant d x d matrix map on an SFT.

    ``table`` maps every admissible window of length 2*radius+1 to a matrix;
    the value at a point is the entry of its centered window.  ``alpha`` is
    the Holder exponent carried for the regularity bookkeeping (a locally
    constant map is alpha-Holder for every alpha in (0, 1]).
    """

    def __init__(self, sft: Sft, dim: int, radius: int, table: Mapping, alpha: float = 1.0):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if radius < 0:
            raise ValueError("radius must be >= 0")
        if not 0.0 < alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        windows = admissible_words(sft, 2 * radius + 1)
        normalized = {}
        for w in windows:
            if w not in table:
                raise ValueError(f"table missing admissible window {w}")
            m = np.asarray(table[w], dtype=float)
            if m.shape != (dim, dim):
                raise ValueError(f"entry for {w} has shape {m.shape}, want ({dim},{dim})")
            if not np.isfinite(m).all():
                raise ValueError(f"entry for {w} has non-finite values")
            m = m.copy()
            m.setflags(write=False)
            normalized[w] = m
        extra = set(table) - set(normalized)
        if extra:
            raise ValueError(f"table has inadmissible windows: {sorted(extra)}")
        self.sft = sft
        self.dim = dim
        self.radius = radius
        self.alpha = float(alpha)
        self.table = normalized

    @property
    def windows(self) -> tuple:
        return tuple(sorted(self.table))

    def window_of(self, x: SymbolicPoint, position: int = 0):
        return x.window(position, self.radius)

    def __repr__(self):
        return (
            f"MatrixGenerator(d={self.dim}, r={self.radius}, "
            f"alpha={self.alpha}, windows={len(self.table)})"
        )


def evaluate(g: MatrixGenerator, x: SymbolicPoint) -> np.ndarray:
    """A(x): the table entry of x's centered window."""
    w = g.window_of(x)
    try:
        return g.table[w]
    except KeyError:
        raise InadmissibleWindow(
            f"window {w} not in table; point/SFT pairing inconsistent"
        ) from None


def cocycle_product(g: MatrixGenerator, x: SymbolicPoint, n: int, budget=None) -> ScaledMatrix:
    """A^n(x) = A(sigma^(n-1) x) ... A(sigma x) A(x), renormalized per factor."""
    if n < 0:
        raise ValueError("n must be >= 0")
    cap = enumeration_budget(budget)
    if n > cap:
        raise BudgetExceeded(f"product length {n} exceeds budget {cap}")
    out = ScaledMatrix.identity(g.dim)
    r = g.radius
    for j in range(n):
        w = x.window(j, r)
        try:
            factor = g.table[w]
        except KeyError:
            raise InadmissibleWindow(f"window {w} at position {j} not in table") from None
        out = out.apply(factor)
        if out.is_zero:
            break  # absorbing state
    return out


def compound(m, i: int) -> np.ndarray:
    """i-th compound matrix: minors indexed by lexicographic i-subsets.

    compound(m, 1) is m itself and compound(m, d) is the 1x1 matrix [det m].
    Functorial: compound(a @ b, i) = compound(a, i) @ compound(b, i).
    """
    m = np.asarray(m, dtype=float)
    d = m.shape[0]
    if not 1 <= i <= d:
        raise ValueError(f"i must lie in 1..{d}")
    if i == 1:
        return m.copy()
    subsets = list(itertools.combinations(range(d), i))
    out = np.empty((len(subsets), len(subsets)))
    for a, rows in enumerate(subsets):
        for b, cols in enumerate(subsets):
            out[a, b] = np.linalg.det(m[np.ix_(rows, cols)])
    return out


def exterior_generator(g: MatrixGenerator, i: int) -> MatrixGenerator:
    """Generator of the i-th exterior-power cocycle (entrywise compounds)."""
    if not 1 <= i <= g.dim:
        raise ValueError(f"i must lie in 1..{g.dim}")
    table = {w: compound(m, i) for w, m in g.table.items()}
    return MatrixGenerator(g.sft, comb(g.dim, i), g.radius, table, g.alpha)


def holder_constant(g: MatrixGenerator) -> float:
    """Smallest exhibited C1 with ||A(x) - A(y)|| <= C1 d(x, y)^alpha.

    Distinct evaluations force the points apart by at least b^-r, so the
    max pairwise table distance scaled by b^(r alpha) is a valid constant.
    """
    entries = [g.table[w] for w in g.windows]
    best = 0.0
    for a in range(len(entries)):
        for b in range(a + 1, len(entries)):
            best = max(best, op_norm(entries[a] - entries[b]))
    return best * g.sft.metric_base ** (g.radius * g.alpha)


def augmented_generator(g: MatrixGenerator) -> MatrixGenerator:
    """Block extension diag(1, A): keeps every product norm >= 1 > 0."""
    d = g.dim
    table = {}
    for w, m in g.table.items():
        block = np.zeros((d + 1, d + 1))
        block[0, 0] = 1.0
        block[1:, 1:] = m
        table[w] = block
    return MatrixGenerator(g.sft, d + 1, g.radius, table, g.alpha)


# ---------------------------------------------------------------------------
# builtin generator families


def identity_generator(s: Sft, dim: int, radius: int = 0, alpha: float = 1.0) -> MatrixGenerator:
    return constant_generator(s, np.eye(dim), radius, alpha)


def constant_generator(s: Sft, matrix, radius: int = 0, alpha: float = 1.0) -> MatrixGenerator:
    matrix = np.asarray(matrix, dtype=float)
    table = {w: matrix for w in admissible_words(s, 2 * radius + 1)}
    return MatrixGenerator(s, matrix.shape[0], radius, table, alpha)


def diagonal_by_symbol(s: Sft, diagonals, alpha: float = 1.0) -> MatrixGenerator:
    """Radius-0 generator: symbol a maps to diag(diagonals[a])."""
    diagonals = [np.asarray(v, dtype=float) for v in diagonals]
    if len(diagonals) != s.alphabet_size:
        raise ValueError("need one diagonal per symbol")
    dim = len(diagonals[0])
    table = {(a,): np.diag(diagonals[a]) for a in range(s.alphabet_size)}
    return MatrixGenerator(s, dim, 0, table, alpha)


def rotation_by_symbol(s: Sft, angles, alpha: float = 1.0) -> MatrixGenerator:
    """Radius-0 generator of 2D rotations: symbol a maps to R(angles[a])."""
    angles = [float(t) for t in angles]
    if len(angles) != s.alphabet_size:
        raise ValueError("need one angle per symbol")
    table = {}
    for a, t in enumerate(angles):
        c, sn = np.cos(t), np.sin(t)
        table[(a,)] = np.array([[c, -sn], [sn, c]])
    return MatrixGenerator(s, 2, 0, table, alpha)


def coboundary_generator(s: Sft, p_table: Mapping, alpha: float = 1.0) -> MatrixGenerator:
    """A(x) = P(sigma x) P(x)^-1 for a locally constant invertible P.

    ``p_table`` maps windows of odd length 2*rp+1 to invertible matrices;
    the result has radius rp+1 (its window must see both P arguments).
    """
    p_table = {as_word(w): np.asarray(m, dtype=float) for w, m in p_table.items()}
    lengths = {len(w) for w in p_table}
    if len(lengths) != 1:
        raise ValueError("all P windows must have equal length")
    (p_len,) = lengths
    if p_len % 2 != 1:
        raise ValueError("P window length must be odd")
    rp = (p_len - 1) // 2
    for w, m in p_table.items():
        if abs(np.linalg.det(m)) <= SINGULAR_RTOL:
            raise ValueError(f"P entry for {w} is singular")
    dim = next(iter(p_table.values())).shape[0]
    r = rp + 1
    table = {}
    for w in admissible_words(s, 2 * r + 1):
        w_cur = w[1 : 2 * rp + 2]       # window of x at radius rp
        w_next = w[2 : 2 * rp + 3]      # window of sigma x at radius rp
        table[w] = p_table[w_next] @ np.linalg.inv(p_table[w_cur])
    return MatrixGenerator(s, dim, r, table, alpha)
