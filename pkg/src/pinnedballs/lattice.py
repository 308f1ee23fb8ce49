"""Exact arithmetic over Z[sqrt(3)] and triangular-lattice configurations.

Centers on the triangular lattice have coordinates (a, b*sqrt(3)) with
integers a, b of equal parity, so every collision vector of a lattice
configuration has entries in the ring Z[sqrt(3)].  Determinants of matrices
with such entries stay in the ring and obey explicit coefficient bounds,
which combine with continued-fraction lower bounds on |r1 + r2*sqrt(3)| to
certify exact positive lower bounds on the rigidity index of any lattice
configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import NonconformingColumnError, NotTouchingError
from .geometry import BallConfiguration, Edge, canonical_edge
from .rigidity import extend_basis

HIGH_PRECISION_BITS = 200


@dataclass(frozen=True)
class QuadraticInteger:
    """Element r1 + r2*sqrt(3) of the ring Z[sqrt(3)], exact arithmetic."""

    r1: int
    r2: int = 0

    def __post_init__(self):
        object.__setattr__(self, "r1", int(self.r1))
        object.__setattr__(self, "r2", int(self.r2))

    @staticmethod
    def _coerce(value) -> "QuadraticInteger":
        if isinstance(value, QuadraticInteger):
            return value
        if isinstance(value, int):
            return QuadraticInteger(value, 0)
        raise TypeError(f"cannot coerce {value!r} to QuadraticInteger")

    def __add__(self, other):
        o = self._coerce(other)
        return QuadraticInteger(self.r1 + o.r1, self.r2 + o.r2)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return QuadraticInteger(self.r1 - o.r1, self.r2 - o.r2)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadraticInteger(
            self.r1 * o.r1 + 3 * self.r2 * o.r2,
            self.r1 * o.r2 + self.r2 * o.r1,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return QuadraticInteger(-self.r1, -self.r2)

    def __bool__(self) -> bool:
        return self.r1 != 0 or self.r2 != 0

    def conjugate(self) -> "QuadraticInteger":
        return QuadraticInteger(self.r1, -self.r2)

    def field_norm(self) -> int:
        """r1^2 - 3 r2^2; zero only for the zero element."""
        return self.r1 * self.r1 - 3 * self.r2 * self.r2

    def exact_div(self, other) -> "QuadraticInteger":
        """Exact ring division; raises when the quotient is not in the ring."""
        o = self._coerce(other)
        if not o:
            raise ZeroDivisionError("division by zero in Z[sqrt(3)]")
        num = self * o.conjugate()
        den = o.field_norm()
        q1, rem1 = divmod(num.r1, den)
        q2, rem2 = divmod(num.r2, den)
        if rem1 or rem2:
            raise ValueError(f"{self} is not divisible by {o} in Z[sqrt(3)]")
        return QuadraticInteger(q1, q2)

    def sign(self) -> int:
        """Exact sign of the real value r1 + r2*sqrt(3)."""
        if self.r1 == 0 and self.r2 == 0:
            return 0
        if self.r1 >= 0 and self.r2 >= 0:
            return 1
        if self.r1 <= 0 and self.r2 <= 0:
            return -1
        # mixed signs: compare r1^2 against 3 r2^2
        if self.r1 > 0:
            return 1 if self.r1 * self.r1 > 3 * self.r2 * self.r2 else -1
        return 1 if 3 * self.r2 * self.r2 > self.r1 * self.r1 else -1

    def __abs__(self) -> "QuadraticInteger":
        return self if self.sign() >= 0 else -self

    def __float__(self) -> float:
        return float(self.r1) + float(self.r2) * math.sqrt(3.0)

    def to_mpf(self) -> mpmath.mpf:
        return mpmath.mpf(self.r1) + mpmath.mpf(self.r2) * mpmath.sqrt(3)

    def __str__(self) -> str:
        if self.r2 == 0:
            return str(self.r1)
        if self.r1 == 0:
            return f"{self.r2}*sqrt(3)"
        op = "+" if self.r2 > 0 else "-"
        return f"{self.r1} {op} {abs(self.r2)}*sqrt(3)"


QI_ZERO = QuadraticInteger(0, 0)
QI_ONE = QuadraticInteger(1, 0)
SQRT3 = QuadraticInteger(0, 1)


@dataclass(frozen=True, order=True)
class LatticePoint:
    """Point (a, b*sqrt(3)) of the triangular lattice; a and b share parity."""

    a: int
    b: int

    def __post_init__(self):
        if (self.a - self.b) % 2 != 0:
            raise ValueError(
                f"({self.a}, {self.b}*sqrt(3)) violates the lattice parity rule"
            )

    def xy(self) -> np.ndarray:
        return np.array([float(self.a), self.b * math.sqrt(3.0)])

    def coords(self) -> tuple[QuadraticInteger, QuadraticInteger]:
        return QuadraticInteger(self.a, 0), QuadraticInteger(0, self.b)


def is_lattice_point(a: int, b: int) -> bool:
    """Whether (a, b*sqrt(3)) belongs to the triangular lattice."""
    return (a - b) % 2 == 0


def squared_distance(p: LatticePoint, q: LatticePoint) -> int:
    """Exact squared distance; touching pairs have value 4."""
    da, db = p.a - q.a, p.b - q.b
    return da * da + 3 * db * db


def lattice_points_in_radius(radius: float) -> list[LatticePoint]:
    """All lattice points with |point| <= radius, sorted by norm then coordinates."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    r2 = radius * radius
    amax = int(math.floor(radius))
    bmax = int(math.floor(radius / math.sqrt(3.0)))
    points = []
    for a in range(-amax, amax + 1):
        for b in range(-bmax, bmax + 1):
            if (a - b) % 2 == 0 and a * a + 3 * b * b <= r2:
                points.append(LatticePoint(a, b))
    points.sort(key=lambda p: (p.a * p.a + 3 * p.b * p.b, p.a, p.b))
    return points


def contact_edges(points: Sequence[LatticePoint]) -> tuple[Edge, ...]:
    """Pairs at exact distance 2 (squared distance 4)."""
    edges = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if squared_distance(points[i], points[j]) == 4:
                edges.append((i, j))
    return tuple(edges)


def lattice_configuration(
    points: Sequence[LatticePoint], contact_tolerance: float = 1e-9
) -> BallConfiguration:
    """Floating-point view of a lattice configuration."""
    centers = np.array([p.xy() for p in points])
    return BallConfiguration(2, centers, contact_tolerance)


# --- exact determinants -----------------------------------------------------


def _coerce_matrix(matrix) -> list[list[QuadraticInteger]]:
    rows = [[QuadraticInteger._coerce(x) for x in row] for row in matrix]
    m = len(rows)
    if m == 0 or any(len(row) != m for row in rows):
        raise ValueError("matrix must be square and non-empty")
    return rows


def _cofactor_determinant(rows: list[list[QuadraticInteger]]) -> QuadraticInteger:
    m = len(rows)
    cache: dict[int, QuadraticInteger] = {}

    def rec(mask: int) -> QuadraticInteger:
        if mask == 0:
            return QI_ONE
        hit = cache.get(mask)
        if hit is not None:
            return hit
        r = m - bin(mask).count("1")
        total = QI_ZERO
        sign = 1
        mbits = mask
        while mbits:
            low = mbits & -mbits
            j = low.bit_length() - 1
            entry = rows[r][j]
            if entry:
                sub = rec(mask ^ low)
                term = entry * sub
                total = total + (term if sign > 0 else -term)
            sign = -sign
            mbits ^= low
        cache[mask] = total
        return total

    return rec((1 << m) - 1)


def _bareiss_determinant(rows: list[list[QuadraticInteger]]) -> QuadraticInteger:
    m = len(rows)
    mat = [row[:] for row in rows]
    sign = 1
    prev = QI_ONE
    for k in range(m - 1):
        if not mat[k][k]:
            pivot_row = next((i for i in range(k + 1, m) if mat[i][k]), None)
            if pivot_row is None:
                return QI_ZERO
            mat[k], mat[pivot_row] = mat[pivot_row], mat[k]
            sign = -sign
        pivot = mat[k][k]
        for i in range(k + 1, m):
            row_i = mat[i]
            row_k = mat[k]
            lead = row_i[k]
            for j in range(k + 1, m):
                row_i[j] = (pivot * row_i[j] - lead * row_k[j]).exact_div(prev)
            row_i[k] = QI_ZERO
        prev = pivot
    det = mat[m - 1][m - 1]
    return det if sign > 0 else -det


def exact_determinant(matrix, method: str = "auto") -> QuadraticInteger:
    """Exact determinant of a square matrix over Z[sqrt(3)].

    method "auto" uses cofactor expansion up to 10x10 and fraction-free
    elimination above; "cofactor" and "bareiss" force one path (the two
    agree exactly, which the test suite exercises).
    """
    rows = _coerce_matrix(matrix)
    if method == "auto":
        method = "cofactor" if len(rows) <= 10 else "bareiss"
    if method == "cofactor":
        return _cofactor_determinant(rows)
    if method == "bareiss":
        return _bareiss_determinant(rows)
    raise ValueError(f"unknown method {method!r}")


def exact_rank(vectors: Sequence[Sequence[QuadraticInteger]]) -> int:
    """Rank of a family of Z[sqrt(3)] vectors via fraction-free elimination."""
    rows = [list(v) for v in vectors]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    prev = QI_ONE
    for c in range(cols):
        pivot_row = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        pivot = rows[rank][c]
        for i in range(rank + 1, len(rows)):
            lead = rows[i][c]
            for j in range(c + 1, cols):
                rows[i][j] = (pivot * rows[i][j] - lead * rows[rank][j]).exact_div(prev)
            rows[i][c] = QI_ZERO
        prev = pivot
        rank += 1
        if rank == len(rows):
            break
    return rank


# --- admissible column patterns ---------------------------------------------


def classify_column(column: Sequence[QuadraticInteger]) -> str:
    """Label a column (a), (b), (c), or nonconforming.

    (a): exactly one non-zero entry, equal to 1.
    (b): exactly two non-zero entries, one 2 and one -2.
    (c): exactly four non-zero entries, two with absolute value 1 and two
    with absolute value sqrt(3).
    """
    nonzero = [QuadraticInteger._coerce(x) for x in column if QuadraticInteger._coerce(x)]
    if len(nonzero) == 1 and nonzero[0] == QI_ONE:
        return "a"
    if len(nonzero) == 2:
        values = sorted((v.r1, v.r2) for v in nonzero)
        if values == [(-2, 0), (2, 0)]:
            return "b"
    if len(nonzero) == 4:
        units = sum(1 for v in nonzero if abs(v) == QI_ONE)
        roots = sum(1 for v in nonzero if abs(v) == SQRT3)
        if units == 2 and roots == 2:
            return "c"
    return "nonconforming"


def check_column_conditions(matrix) -> list[str]:
    """Per-column labels for the admissible pattern classification."""
    rows = _coerce_matrix(matrix)
    m = len(rows)
    return [classify_column([rows[i][j] for i in range(m)]) for j in range(m)]


@dataclass(frozen=True)
class DetBoundReport:
    """Exact determinant of a conforming matrix and its coefficient bounds."""

    m: int
    determinant: QuadraticInteger
    r1_bound: int
    r1_ok: bool
    r2_ok: bool
    det_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.r1_ok and self.r2_ok and self.det_ok


def verify_det_bound(matrix) -> DetBoundReport:
    """Check |r1| <= 4^m, |r2| <= 4^m/sqrt(3), |det| <= 2*4^m exactly.

    All columns must conform to one of the admissible patterns, otherwise
    :class:`NonconformingColumnError` is raised.
    """
    rows = _coerce_matrix(matrix)
    labels = check_column_conditions(rows)
    for j, label in enumerate(labels):
        if label == "nonconforming":
            raise NonconformingColumnError(j)
    m = len(rows)
    det = exact_determinant(rows)
    limit = 4**m
    r1_ok = abs(det.r1) <= limit
    # |r2| <= 4^m / sqrt(3)  <=>  3 r2^2 <= 4^{2m}
    r2_ok = 3 * det.r2 * det.r2 <= limit * limit
    cap = QuadraticInteger(2 * limit, 0)
    det_ok = (cap - det).sign() >= 0 and (cap + det).sign() >= 0
    return DetBoundReport(m, det, limit, r1_ok, r2_ok, det_ok)


# --- continued fraction machinery for sqrt(3) --------------------------------


@dataclass(frozen=True)
class ConvergentPair:
    """Numerator/denominator pair h_k/g_k of the sqrt(3) continued fraction."""

    index: int
    h: int
    g: int


def _cf_digit(k: int) -> int:
    # digits of sqrt(3): 1, then alternating 1, 2
    if k == 0:
        return 1
    return 1 if k % 2 == 1 else 2


def sqrt3_convergents(k_max: int) -> list[ConvergentPair]:
    """Convergents h_k/g_k for k = 0..k_max from the standard recurrences."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    h_prev2, h_prev1 = 0, 1
    g_prev2, g_prev1 = 1, 0
    out = []
    for k in range(k_max + 1):
        a = _cf_digit(k)
        h = a * h_prev1 + h_prev2
        g = a * g_prev1 + g_prev2
        out.append(ConvergentPair(k, h, g))
        h_prev2, h_prev1 = h_prev1, h
        g_prev2, g_prev1 = g_prev1, g
    return out


def quadratic_lower_bound(r2_bound: float) -> float:
    """Certified lower bound on |r1 + r2*sqrt(3)| for integers with 1 <= |r2| <= r2_bound.

    Brackets the range by convergent denominators: with k the smallest index
    such that g_k >= r2_bound, every admissible pair satisfies
    |r1 + r2*sqrt(3)| > 1/(6 g_{k+1}).  Pairs with r2 = 0 are excluded; for
    those |r1| >= 1 holds trivially.
    """
    if r2_bound < 1:
        raise ValueError("r2_bound must be >= 1")
    h_prev2, h_prev1 = 0, 1
    g_prev2, g_prev1 = 1, 0
    k = 0
    g_k = None
    while True:
        a = _cf_digit(k)
        h = a * h_prev1 + h_prev2
        g = a * g_prev1 + g_prev2
        h_prev2, h_prev1 = h_prev1, h
        g_prev2, g_prev1 = g_prev1, g
        if g_k is None and g >= r2_bound:
            g_k = g
        elif g_k is not None:
            g_next = g
            break
        k += 1
    return 1.0 / (6.0 * g_next)


def quadratic_lower_bound_closed_form(n: int) -> float:
    """Closed form sqrt(3)/(54*4^{2n}), the bound for r2 ranges up to 4^{2n}/sqrt(3)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(3.0) / (54.0 * 4.0 ** (2 * n))


def lattice_alpha_lower_bound_log2(n: int) -> float:
    """log2 of the certified rigidity-index floor for n lattice discs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 0.5 * math.log2(3.0) - math.log2(432.0) - 8.0 * n - 0.5 * math.log2(n)


def lattice_alpha_lower_bound(n: int) -> float:
    """(sqrt(3)/432) * 4^{-4n} / sqrt(n); underflows to 0.0 for very large n."""
    return 2.0 ** lattice_alpha_lower_bound_log2(n)


# --- exact rigidity certificate ----------------------------------------------


def exact_collision_vector(
    points: Sequence[LatticePoint], edge: Edge
) -> list[QuadraticInteger]:
    """Unnormalized collision vector of a touching lattice pair, over Z[sqrt(3)]."""
    i, j = canonical_edge(*edge)
    if squared_distance(points[i], points[j]) != 4:
        raise NotTouchingError(
            i, j, math.sqrt(squared_distance(points[i], points[j]))
        )
    n = len(points)
    vec = [QI_ZERO] * (2 * n)
    da = points[i].a - points[j].a
    db = points[i].b - points[j].b
    vec[2 * i] = QuadraticInteger(da, 0)
    vec[2 * i + 1] = QuadraticInteger(0, db)
    vec[2 * j] = QuadraticInteger(-da, 0)
    vec[2 * j + 1] = QuadraticInteger(0, -db)
    return vec


@dataclass(frozen=True, eq=False)
class CertificateData:
    """Exact normal-vector data backing a rigidity lower bound."""

    r1: int
    r2: int
    normal: tuple[QuadraticInteger, ...]
    norm_squared: QuadraticInteger
    basis_edges: tuple[Edge, ...]
    basis_indices: tuple[int, ...]
    exact_zero: bool


def exact_alpha_certificate(
    points: Sequence[LatticePoint],
    edge_set: Iterable[Edge],
    edge: Edge,
) -> tuple[float, CertificateData]:
    """Certified lower bound on alpha_star for a lattice configuration.

    Works with the integer-scaled collision vectors so that all arithmetic
    stays in Z[sqrt(3)]; the 2^{-3/2} normalization is applied once at the
    end.  The bound is the distance from the chosen direction to a hyperplane
    containing the span of the others: a maximal independent subset of the
    other edges' vectors (chosen by exact rank) is completed to dimension
    2n - 1 with standard basis vectors, the hyperplane normal c is computed
    as an exact cofactor vector, and the certificate is |z . c| / |c|.
    Returns exactly 0.0 when the chosen direction already lies in the span
    (or, defensively, when z . c vanishes), and exactly 1.0 when the span is
    trivial.
    """
    n = len(points)
    if n < 1:
        raise ValueError("need at least one point")
    m = 2 * n
    chosen = canonical_edge(*edge)
    edges = sorted({canonical_edge(*e) for e in edge_set})
    if chosen not in edges:
        raise ValueError(f"edge {chosen} is not in the edge set")
    others = [e for e in edges if e != chosen]

    w_exact = exact_collision_vector(points, chosen)

    basis_vectors: list[list[QuadraticInteger]] = []
    basis_edges: list[Edge] = []
    for e in others:
        candidate = exact_collision_vector(points, e)
        if exact_rank(basis_vectors + [candidate]) > len(basis_vectors):
            basis_vectors.append(candidate)
            basis_edges.append(e)
    p = len(basis_vectors)

    if p == 0:
        # trivial span: the certificate is the length of the unit direction
        norm_sq = QuadraticInteger(8, 0)
        data = CertificateData(8, 0, tuple(w_exact), norm_sq, (), (), False)
        return 1.0, data

    if exact_rank(basis_vectors + [w_exact]) == p:
        data = CertificateData(
            0, 0, (QI_ZERO,) * m, QI_ZERO, tuple(basis_edges), (), True
        )
        return 0.0, data

    float_basis = [np.array([float(x) for x in v]) for v in basis_vectors]
    float_w = np.array([float(x) for x in w_exact])
    picks = extend_basis(float_basis, float_w, m)

    # columns of the bordered matrix, first column swapped per cofactor
    fixed_cols = [list(v) for v in basis_vectors]
    for idx in picks:
        col = [QI_ZERO] * m
        col[idx] = QI_ONE
        fixed_cols.append(col)

    normal: list[QuadraticInteger] = []
    pick_set = set(picks)
    for i in range(m):
        if i in pick_set:
            normal.append(QI_ZERO)
            continue
        matrix = [
            [(QI_ONE if r == i else QI_ZERO)] + [col[r] for col in fixed_cols]
            for r in range(m)
        ]
        normal.append(exact_determinant(matrix))

    num = QI_ZERO
    for wi, ci in zip(w_exact, normal):
        num = num + wi * ci
    if not num:
        data = CertificateData(
            0, 0, tuple(normal), QI_ZERO, tuple(basis_edges), tuple(picks), True
        )
        return 0.0, data

    norm_sq = QI_ZERO
    for ci in normal:
        norm_sq = norm_sq + ci * ci

    with mpmath.workprec(HIGH_PRECISION_BITS):
        value = abs(num.to_mpf()) / (
            mpmath.mpf(2) ** mpmath.mpf("1.5") * mpmath.sqrt(norm_sq.to_mpf())
        )
        bound = float(value)
    data = CertificateData(
        num.r1,
        num.r2,
        tuple(normal),
        norm_sq,
        tuple(basis_edges),
        tuple(picks),
        False,
    )
    return bound, data
