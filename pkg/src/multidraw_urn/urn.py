"""Urn schemas: replacement matrices, tenability, affinity, index classification.

A scheme draws a multiset of ``m`` balls per step.  If the sample contains
``k`` white and ``m-k`` black balls, the urn receives ``a[m-k]`` white and
``b[m-k]`` black balls.  Everything in this module is exact integer/rational
arithmetic; no floating point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import List, Sequence, Tuple, Union


class SamplingModel(enum.Enum):
    """How the m-ball sample is taken at each step."""

    WITHOUT_REPLACEMENT = "M"
    WITH_REPLACEMENT = "R"

    @classmethod
    def parse(cls, text: str) -> "SamplingModel":
        t = text.strip().upper()
        for member in cls:
            if t in (member.value, member.name):
                return member
        raise ValueError(f"unknown sampling model {text!r} (expected M or R)")


@dataclass(frozen=True)
class ReplacementMatrix:
    """Balanced (m+1) x 2 ball addition rules.

    ``a[j]`` white balls (and ``b[j] = sigma - a[j]`` black balls) are added
    when the drawn sample contains ``j`` black balls, i.e. ``m - j`` white.
    """

    m: int
    a: Tuple[int, ...]
    sigma: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("sample size m must be >= 1")
        if len(self.a) != self.m + 1:
            raise ValueError(f"expected {self.m + 1} white-addition entries, got {len(self.a)}")
        if self.sigma < 1:
            raise ValueError("balance sigma must be >= 1 (strictly growing urn)")
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))

    @property
    def b(self) -> Tuple[int, ...]:
        return tuple(self.sigma - x for x in self.a)

    def white_added(self, k_white_drawn: int) -> int:
        """White balls added when the sample contains ``k_white_drawn`` white."""
        return self.a[self.m - k_white_drawn]

    def swap_colors(self) -> "ReplacementMatrix":
        """The same scheme with white and black interchanged."""
        return ReplacementMatrix(self.m, tuple(reversed(self.b)), self.sigma)

    @classmethod
    def from_affine(cls, m: int, a_m_minus_1: int, a_m: int, sigma: int) -> "ReplacementMatrix":
        rows = tuple((m - k) * a_m_minus_1 - (m - k - 1) * a_m for k in range(m + 1))
        return cls(m, rows, sigma)


@dataclass(frozen=True)
class UrnState:
    """Composition after ``step`` draws; the total is deterministic."""

    white: int
    total: int
    step: int

    def __post_init__(self) -> None:
        if not 0 <= self.white <= self.total:
            raise ValueError(f"white count {self.white} outside [0, {self.total}]")
        if self.step < 0:
            raise ValueError("step must be >= 0")

    @property
    def black(self) -> int:
        return self.total - self.white


@dataclass(frozen=True)
class AffineParams:
    """Reduced parametrization of an affine urn: (a_{m-1}, a_m, sigma, m)."""

    m: int
    a_m_minus_1: int
    a_m: int
    sigma: int

    @property
    def eigen_gap(self) -> int:
        """Second eigenvalue of the reduced matrix: a_{m-1} - a_m."""
        return self.a_m_minus_1 - self.a_m

    @property
    def urn_index(self) -> Fraction:
        return Fraction(self.m * self.eigen_gap, self.sigma)

    @property
    def b0(self) -> int:
        return self.sigma - self.m * self.eigen_gap - self.a_m

    def matrix(self) -> ReplacementMatrix:
        return ReplacementMatrix.from_affine(self.m, self.a_m_minus_1, self.a_m, self.sigma)

    def drift(self) -> int:
        """The mean-recurrence shift m(a_{m-1} - a_m) added to the total."""
        return self.m * self.eigen_gap


@dataclass(frozen=True)
class NotAffine:
    """Witness that the closed-form affinity condition fails."""

    first_violated_k: int


class IndexClass(enum.Enum):
    DEGENERATE = "degenerate"
    TRIANGULAR = "triangular"
    SMALL_INDEX = "small-index"
    CRITICAL_INDEX = "critical-index"
    LARGE_INDEX = "large-index"


@dataclass(frozen=True)
class Classification:
    index_class: IndexClass
    urn_index: Fraction
    restart_required: bool


@dataclass
class TenabilityReport:
    ok: bool
    diagnostics: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def validate_tenability(matrix: ReplacementMatrix, model: SamplingModel) -> TenabilityReport:
    """Row-wise feasibility of ball removal for the given sampling model.

    Without replacement: a_k >= -(m-k) and b_k >= -k.  With replacement:
    a_k >= -1 for k < m, a_m >= 0, and mirrored bounds on the b column.
    """
    m = matrix.m
    diags: List[str] = []
    b = matrix.b
    if model is SamplingModel.WITHOUT_REPLACEMENT:
        for k, ak in enumerate(matrix.a):
            if ak < -(m - k):
                diags.append(f"row k={k}: a_{k}={ak} < -(m-k)={-(m - k)}")
        for k, bk in enumerate(b):
            if bk < -k:
                diags.append(f"row k={k}: b_{k}={bk} < -k={-k}")
    else:
        for k, ak in enumerate(matrix.a):
            if k < m and ak < -1:
                diags.append(f"row k={k}: a_{k}={ak} < -1")
        if matrix.a[m] < 0:
            diags.append(f"row k={m}: a_{m}={matrix.a[m]} < 0")
        for k, bk in enumerate(b):
            if k >= 1 and bk < -1:
                diags.append(f"row k={k}: b_{k}={bk} < -1")
        if b[0] < 0:
            diags.append(f"row k=0: b_0={b[0]} < 0")
    return TenabilityReport(not diags, diags)


def check_affinity(matrix: ReplacementMatrix) -> Union[AffineParams, NotAffine]:
    """Closed-form test a_k = (m-k) a_{m-1} - (m-k-1) a_m for every row."""
    m = matrix.m
    a = matrix.a
    a1, a2 = a[m - 1], a[m]
    for k in range(m + 1):
        if a[k] != (m - k) * a1 - (m - k - 1) * a2:
            return NotAffine(first_violated_k=k)
    return AffineParams(m=m, a_m_minus_1=a1, a_m=a2, sigma=matrix.sigma)


def urn_index(params: AffineParams) -> Fraction:
    """The index m (a_{m-1} - a_m) / sigma as an exact rational."""
    return params.urn_index


def classify(params: AffineParams, T0: int) -> Classification:
    """Regime of an affine urn; degenerate and triangular take precedence."""
    lam = params.urn_index
    restart = T0 + params.drift() <= 0
    if params.eigen_gap == 0:
        cls = IndexClass.DEGENERATE
    elif params.a_m == 0 or params.b0 == 0:
        cls = IndexClass.TRIANGULAR
    elif lam < Fraction(1, 2):
        cls = IndexClass.SMALL_INDEX
    elif lam == Fraction(1, 2):
        cls = IndexClass.CRITICAL_INDEX
    else:
        cls = IndexClass.LARGE_INDEX
    return Classification(cls, lam, restart)


# -- conditional expectation coefficients -----------------------------------

Poly = List[Fraction]  # coefficients, ascending powers


def _poly_add(p: Poly, q: Poly, scale: Fraction = Fraction(1)) -> Poly:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i in range(n):
        if i < len(p):
            out[i] += p[i]
        if i < len(q):
            out[i] += scale * q[i]
    return out


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, qj in enumerate(q):
            out[i + j] += pi * qj
    return out


def _falling_poly(k: int, negate: bool = False) -> Poly:
    """Coefficients of x^(k) = x(x-1)...(x-k+1), or of (-x)^(k)."""
    poly: Poly = [Fraction(1)]
    sign = Fraction(-1) if negate else Fraction(1)
    for i in range(k):
        poly = _poly_mul(poly, [Fraction(-i), sign])
    return poly


def _falling_number(x: Union[int, Fraction], k: int) -> Union[int, Fraction]:
    out: Union[int, Fraction] = 1
    for i in range(k):
        out *= x - i
    return out


def conditional_coefficients(
    matrix: ReplacementMatrix, model: SamplingModel, T_prev: int
) -> Tuple[Fraction, ...]:
    """Coefficients (f_0 .. f_m) of E[W_n | F_{n-1}] as a polynomial in W_{n-1}.

    Exact rationals; the degree is at most the sample size.
    """
    m = matrix.m
    if T_prev < m:
        raise ValueError(f"previous total {T_prev} < sample size {m}: draw impossible")
    a = matrix.a
    coeffs = [Fraction(0)] * (m + 1)
    if model is SamplingModel.WITH_REPLACEMENT:
        for i in range(m + 1):
            s = sum(
                a[m - k] * comb(m, k) * comb(m - k, m - i) * (-1) ** k
                for k in range(i + 1)
            )
            coeffs[i] = Fraction((-1) ** i * s, T_prev**i)
    else:
        # expand p_{m,j}(x) in the monomial basis, then weight by T_prev^(j)
        total = [Fraction(0)] * (m + 1)
        for j in range(m + 1):
            pmj: Poly = [Fraction(0)]
            for k in range(m - j + 1):
                c = a[m - k] * comb(m, k) * comb(m - k, j)
                if c == 0:
                    continue
                term = _poly_mul(_falling_poly(k), _falling_poly(m - k - j, negate=True))
                pmj = _poly_add(pmj, term, scale=Fraction(c))
            tj = _falling_number(T_prev, j)
            for i, ci in enumerate(pmj):
                if i <= m:
                    total[i] += tj * ci
        tm = _falling_number(T_prev, m)
        coeffs = [c / tm for c in total]
    coeffs[1] += 1
    return tuple(coeffs)


def conditional_mean_coefficients(params: AffineParams, T_prev: int) -> Tuple[Fraction, int]:
    """(alpha_n, beta_n) of the affine one-step mean at previous total T_prev."""
    return Fraction(T_prev + params.drift(), T_prev), params.a_m


__all__ = [
    "SamplingModel",
    "ReplacementMatrix",
    "UrnState",
    "AffineParams",
    "NotAffine",
    "IndexClass",
    "Classification",
    "TenabilityReport",
    "validate_tenability",
    "check_affinity",
    "urn_index",
    "classify",
    "conditional_coefficients",
    "conditional_mean_coefficients",
]
