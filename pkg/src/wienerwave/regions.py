"""Exact exponent algebra for amalgam Strichartz estimates.

Every exponent lives in :class:`ExtendedRational`, a reduced fraction or +inf
with 1/inf = 0. Predicates are phrased on reciprocals so that endpoint cases
(q = inf and friends) need no special handling. No floating point is used
here; floats enter only in :func:`life_span`, whose outputs are times.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from functools import total_ordering
from math import floor
from pathlib import Path

__all__ = [
    "ExtendedRational",
    "INF",
    "ExponentTuple",
    "CaseExponents",
    "ContractionPlan",
    "DualIndices",
    "is_wave_admissible",
    "thm1_admissible",
    "thm2_admissible",
    "propfix_admissible",
    "decay_exponents",
    "case_exponents",
    "k_max",
    "corollary_admissible",
    "nlw_admissible",
    "implied_sigma",
    "duhamel_dual_indices",
    "life_span",
    "sample_region",
    "sample_propfix",
    "kmax_curve",
    "write_region_csv",
]


@total_ordering
class ExtendedRational:
    """A reduced fraction or +inf.

    Accepts ints, Fractions, other ExtendedRationals, and strings such as
    ``"9/2"``, ``"-3"``, ``"inf"``. Floats are refused: exactness is the point.
    """

    __slots__ = ("_value",)

    def __init__(self, value):
        if isinstance(value, ExtendedRational):
            self._value = value._value
        elif isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "+inf", "infinity", "oo"):
                self._value = None
            else:
                self._value = Fraction(text)
        elif isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            self._value = Fraction(value)
        else:
            raise TypeError(f"cannot build an exact exponent from {value!r}")

    @classmethod
    def infinity(cls) -> "ExtendedRational":
        return cls("inf")

    @property
    def infinite_flag(self) -> bool:
        return self._value is None

    @property
    def numerator(self) -> int:
        return 1 if self._value is None else self._value.numerator

    @property
    def denominator(self) -> int:
        return 0 if self._value is None else self._value.denominator

    @property
    def value(self) -> Fraction:
        if self._value is None:
            raise ValueError("infinite exponent has no finite value")
        return self._value

    @property
    def inv(self) -> Fraction:
        """Reciprocal as a Fraction, with 1/inf = 0."""
        if self._value is None:
            return Fraction(0)
        if self._value == 0:
            raise ZeroDivisionError("reciprocal of 0 is not finite")
        return 1 / self._value

    def reciprocal(self) -> "ExtendedRational":
        if self._value is None:
            return ExtendedRational(0)
        if self._value == 0:
            return INF
        return ExtendedRational(1 / self._value)

    def conjugate(self) -> "ExtendedRational":
        """Hoelder conjugate p' with 1/p + 1/p' = 1."""
        return _from_inv(1 - self.inv)

    def __float__(self):
        return float("inf") if self._value is None else float(self._value)

    def __str__(self):
        return "inf" if self._value is None else str(self._value)

    def __repr__(self):
        return f"ExtendedRational('{self}')"

    def __hash__(self):
        return hash(("ER", self._value))

    def __eq__(self, other):
        try:
            other = ExtendedRational(other)
        except TypeError:
            return NotImplemented
        return self._value == other._value

    def __lt__(self, other):
        other = ExtendedRational(other)
        if self._value is None:
            return False
        if other._value is None:
            return True
        return self._value < other._value

    def _binary(self, other, op):
        other = ExtendedRational(other)
        if self._value is None or other._value is None:
            raise ValueError("arithmetic with an infinite exponent is undefined here")
        return ExtendedRational(op(self._value, other._value))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return ExtendedRational(other)._binary(self, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return ExtendedRational(other)._binary(self, lambda a, b: a / b)

    def __neg__(self):
        return ExtendedRational(-self.value)


INF = ExtendedRational.infinity()


def _er(x) -> ExtendedRational:
    return x if isinstance(x, ExtendedRational) else ExtendedRational(x)


def _from_inv(inv: Fraction) -> ExtendedRational:
    return INF if inv == 0 else ExtendedRational(1 / Fraction(inv))


def _fr(x) -> Fraction:
    return _er(x).value


_INDEX_FIELDS = ("q", "q_tilde", "r", "r_tilde", "q1", "q1_tilde", "r1", "r1_tilde")


@dataclass(frozen=True)
class ExponentTuple:
    """Lebesgue and Sobolev indices of one estimate.

    ``q1, q1_tilde, r1, r1_tilde`` are the dual (forcing-side) indices of a
    retarded or Duhamel estimate and are optional.
    """

    n: int
    q: ExtendedRational
    q_tilde: ExtendedRational
    r: ExtendedRational
    r_tilde: ExtendedRational
    sigma: ExtendedRational | None = None
    gamma: ExtendedRational | None = None
    q1: ExtendedRational | None = None
    q1_tilde: ExtendedRational | None = None
    r1: ExtendedRational | None = None
    r1_tilde: ExtendedRational | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n}")
        for f in fields(self):
            if f.name == "n":
                continue
            val = getattr(self, f.name)
            if val is None:
                continue
            val = _er(val)
            object.__setattr__(self, f.name, val)
            if f.name in ("sigma", "gamma"):
                if val.infinite_flag:
                    raise ValueError(f"{f.name} must be finite")
            elif not (ExtendedRational(1) <= val):
                raise ValueError(f"Lebesgue exponent {f.name}={val} must lie in [1, inf]")
        duals = [getattr(self, k) for k in ("q1", "q1_tilde", "r1", "r1_tilde")]
        if any(d is None for d in duals) and any(d is not None for d in duals):
            raise ValueError("dual indices must be given all together or not at all")

    @property
    def has_duals(self) -> bool:
        return self.q1 is not None

    def inverses(self) -> dict[str, Fraction]:
        return {k: getattr(self, k).inv for k in _INDEX_FIELDS if getattr(self, k) is not None}

    def with_duals(self, q1, q1_tilde, r1, r1_tilde) -> "ExponentTuple":
        return replace(self, q1=_er(q1), q1_tilde=_er(q1_tilde), r1=_er(r1), r1_tilde=_er(r1_tilde))

    def as_strings(self) -> dict[str, str | int]:
        out: dict[str, str | int] = {"n": self.n}
        for f in fields(self):
            if f.name != "n" and getattr(self, f.name) is not None:
                out[f.name] = str(getattr(self, f.name))
        return out


@dataclass(frozen=True)
class CaseExponents:
    alpha: ExtendedRational
    lambda_: ExtendedRational
    beta: ExtendedRational
    kappa: ExtendedRational


@dataclass(frozen=True)
class ContractionPlan:
    k: ExtendedRational
    q0_tilde: ExtendedRational
    M: float
    T: float
    C: float

    def satisfies_smallness(self) -> bool:
        """C T^(1/q0~) M^(k-1) <= 1/2 (up to round-off) and T < 1."""
        lhs = self.C * self.T ** float(self.q0_tilde.inv) * self.M ** (float(self.k) - 1)
        return self.T < 1 and lhs <= 0.5 * (1 + 1e-12)


def is_wave_admissible(n, q, r, sigma) -> bool:
    """Classical wave-admissible pair at regularity sigma (sharp scaling)."""
    n, sigma = int(n), _fr(sigma)
    iq, ir = _er(q).inv, _er(r).inv
    return (
        iq <= Fraction(1, 2)
        and 0 < ir <= Fraction(1, 2)
        and 2 * iq + (n - 1) * ir <= Fraction(n - 1, 2)
        and iq + n * ir == Fraction(n, 2) - sigma
    )


def _lt_bound(x: ExtendedRational, num: Fraction, den: Fraction) -> bool:
    """x < num/den, read literally; a nonpositive bound admits no exponent."""
    if den == 0:
        return not x.infinite_flag
    bound = Fraction(num) / Fraction(den)
    return (not x.infinite_flag) and bound > 0 and x.value < bound


def thm1_admissible(t: ExponentTuple) -> bool:
    """Homogeneous amalgam Strichartz range for regularity sigma, n >= 3."""
    n = t.n
    if n < 3 or t.sigma is None:
        return False
    s = t.sigma.value
    iq, iqt, ir, irt = t.q.inv, t.q_tilde.inv, t.r.inv, t.r_tilde.inv
    if not (Fraction(n, 4) < s < Fraction(n - 1, 2)):
        return False
    # 2 <= q~ < q < inf
    if not (0 < iq < iqt <= Fraction(1, 2)):
        return False
    # 2n/(n - 2s) < r <= r~
    if not (ir < Fraction(n - 2 * s, 2 * n) and irt <= ir):
        return False
    if s < Fraction(n, 4) + Fraction(1, 2 * (n - 1)):
        upper_ok = _lt_bound(t.r_tilde, 4, n - 4 * s + 1)
    else:
        upper_ok = _lt_bound(t.r_tilde, 2 * n, n - 2 * s - 1)
    if not upper_ok:
        return False
    half_gap = Fraction(n, 2) - s
    return iqt + (n - 1) * irt > half_gap and iq + n * ir == half_gap


def _gamma_range_ok(n: int, g: Fraction) -> bool:
    return Fraction(n, 2) < g < Fraction(n + 1, 2) or Fraction(n + 1, 2) < g < n - 1


def thm2_admissible(t: ExponentTuple, gamma=None) -> bool:
    """Retarded amalgam estimate range for |grad|^-gamma, n >= 3."""
    n = t.n
    g = _er(gamma if gamma is not None else t.gamma).value
    if n < 3 or not t.has_duals or not _gamma_range_ok(n, g):
        return False
    iq, iqt, ir, irt = t.q.inv, t.q_tilde.inv, t.r.inv, t.r_tilde.inv
    iq1, iqt1, ir1, irt1 = t.q1.inv, t.q1_tilde.inv, t.r1.inv, t.r1_tilde.inv
    if t.q.infinite_flag:
        return False
    if not (0 < iq + iq1 < iqt + iqt1 <= 1):
        return False
    lower = max(Fraction(n - 2 * g + 1, 2), Fraction(n - g - 1, n))
    if not (lower < irt + irt1 <= ir + ir1 < Fraction(n - g, n)):
        return False
    return (
        iqt + iqt1 + (n - 1) * (irt + irt1) > n - g
        and iq + iq1 + n * (ir + ir1) == n - g
    )


def propfix_admissible(n, gamma, r, r_tilde) -> bool:
    """Exponent range of the kernel time-decay estimate.

    The upper bound on r~ is read literally: when its denominator is not
    positive no r~ qualifies.
    """
    n, g = int(n), _fr(gamma)
    r, rt = _er(r), _er(r_tilde)
    if n < 3 or not _gamma_range_ok(n, g):
        return False
    if not (r.inv < Fraction(n - g, 2 * n) and rt.inv <= r.inv):
        return False
    if g < Fraction(n, 2) + Fraction(1, n - 1):
        return _lt_bound(rt, 4, n - 2 * g + 1)
    return _lt_bound(rt, 2 * n, n - g - 1)


def decay_exponents(n, gamma, r, r_tilde) -> tuple[ExtendedRational, ExtendedRational]:
    """Kernel-norm decay exponents (|t| <= 1, |t| >= 1)."""
    if not propfix_admissible(n, gamma, r, r_tilde):
        raise ValueError(f"(n={n}, gamma={gamma}, r={r}, r~={r_tilde}) is outside the decay range")
    n, g = int(n), _fr(gamma)
    small = -n + g + 2 * (n - 1) * _er(r_tilde).inv
    large = -n + g + 2 * n * _er(r).inv
    return ExtendedRational(small), ExtendedRational(large)


def case_exponents(n, gamma, r, r_tilde) -> CaseExponents:
    n, g = int(n), _fr(gamma)
    r, rt = _fr(r), _fr(r_tilde)
    half = rt / 2
    return CaseExponents(
        alpha=ExtendedRational(half * (-n + g + 1) + n),
        lambda_=ExtendedRational(-half * Fraction(n - 1, 2) + n - 1),
        beta=ExtendedRational(half * (Fraction(-n, 2) - Fraction(1, 2) + g)),
        kappa=ExtendedRational(-(r / rt) * (n - 1) + n - 1),
    )


def k_max(n, sigma) -> ExtendedRational:
    """Power above which the nonlinear wave problem is ill-posed at regularity sigma."""
    n, s = int(n), _fr(sigma)
    if s < 0:
        raise ValueError("sigma must be nonnegative")
    if s >= Fraction(n, 2):
        raise ValueError("sigma >= n/2 is outside the threshold formula")
    if s <= Fraction(1, 2):
        return ExtendedRational(1 + Fraction(4) / (n + 1 - 4 * s))
    return ExtendedRational(1 + Fraction(4) / (n - 2 * s))


def implied_sigma(t: ExponentTuple) -> ExtendedRational:
    """Regularity fixed by the scaling identity 1/q + n/r = n/2 - sigma."""
    return ExtendedRational(Fraction(t.n, 2) - t.q.inv - t.n * t.r.inv)


def _homogeneous_low(s: Fraction, iq, iqt, ir, irt) -> bool:
    return (
        0 < iq < iqt <= s / 2
        and (1 - s) / 2 < irt <= ir < (3 - 2 * s) / 6
        and iqt + 2 * irt > 1 - s / 2
        and iq + 3 * ir == Fraction(3, 2) - s
    )


def _inhomogeneous_low(iq, iqt, ir, irt, iq1, iqt1, ir1, irt1, q_infinite: bool) -> bool:
    if q_infinite:
        return False
    return (
        0 < iq + iq1 < iqt + iqt1 <= Fraction(1, 2)
        and Fraction(1, 2) < irt + irt1 <= ir + ir1 < Fraction(2, 3)
        and iqt + iqt1 + 2 * irt + 2 * irt1 > Fraction(3, 2)
        and iq + iq1 + 3 * ir + 3 * ir1 == 2
    )


def corollary_admissible(t: ExponentTuple, sigma=None) -> bool:
    """n = 3 low-regularity estimates.

    Without dual indices this is the homogeneous system at ``sigma``, with
    0 < sigma < 1. With dual indices it is the inhomogeneous system for the
    |grad|^-1 Duhamel operator.
    """
    if t.n != 3:
        return False
    iq, iqt, ir, irt = t.q.inv, t.q_tilde.inv, t.r.inv, t.r_tilde.inv
    if t.has_duals:
        return _inhomogeneous_low(
            iq, iqt, ir, irt, t.q1.inv, t.q1_tilde.inv, t.r1.inv, t.r1_tilde.inv, t.q.infinite_flag
        )
    s = _er(sigma if sigma is not None else t.sigma).value
    if not 0 < s < 1:
        return False
    return _homogeneous_low(s, iq, iqt, ir, irt)


def nlw_admissible(t: ExponentTuple, k) -> bool:
    """Exponent range of the local well-posedness result, n = 3.

    Checks the eliminated solution-space system and its k-dependent
    companion, and additionally that the regularity fixed by scaling lies
    in (0, 1/2] with 1 < k < k_max(sigma).
    """
    if t.n != 3:
        return False
    k = _fr(k)
    if not k > 1:
        return False
    iq, iqt, ir, irt = t.q.inv, t.q_tilde.inv, t.r.inv, t.r_tilde.inv
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    solution_space = (
        0 < iq < iqt <= quarter
        and quarter < irt <= ir < half
        and 1 <= iq + 3 * ir < min(Fraction(3, 2) - 2 * iqt, 2 * iqt + 4 * irt - half)
    )
    if not solution_space:
        return False
    km1 = k - 1
    eliminated = (
        0 <= iqt < 1 / km1
        and 0 <= iq < 1 / km1
        and not t.q.infinite_flag
        and 1 / (3 * km1) < irt < 1 / (2 * km1)
        and 1 / (3 * km1) < ir
        and iqt + 2 * irt < Fraction(3, 2) / km1
    )
    if not eliminated:
        return False
    s = implied_sigma(t).value
    return 0 < s <= half and k < k_max(3, s).value


@dataclass(frozen=True)
class _Bounds:
    lows: list
    highs: list

    def pick(self):
        """Midpoint of the feasible interval, or None if it is empty."""
        lo = max(self.lows, key=lambda b: (b[0], b[1]))
        hi = min(self.highs, key=lambda b: (b[0], not b[1]))
        if lo[0] < hi[0] or (lo[0] == hi[0] and not lo[1] and not hi[1]):
            return (lo[0] + hi[0]) / 2
        return None


@dataclass(frozen=True)
class DualIndices:
    tuple: ExponentTuple
    q0_tilde: ExtendedRational
    q0: ExtendedRational
    r2: ExtendedRational


def duhamel_dual_indices(t: ExponentTuple, k) -> DualIndices:
    """Forcing-side indices for the Duhamel term of the nonlinear problem.

    The duals are the low-regularity homogeneous indices at 1 - sigma, with
    1/r1~ = 1 - k/r~ fixed by Hoelder. 1/r1 is placed at the midpoint of its
    feasible interval, 1/q1 follows from scaling, and 1/q1~ is again a
    midpoint. The time exponent of the cutoff follows from
    1/q0~ = 1 - k/q~ - 1/q1~.
    """
    k = _fr(k)
    if t.n != 3:
        raise ValueError("dual indices are defined for n = 3")
    s = implied_sigma(t).value if t.sigma is None else t.sigma.value
    s1 = 1 - s
    iq, iqt, ir, irt = t.q.inv, t.q_tilde.inv, t.r.inv, t.r_tilde.inv
    irt1 = 1 - k * irt
    # (value, strict) pairs
    r1 = _Bounds(
        lows=[(irt1, False), (1 - k * ir, False), (irt + irt1 - ir, False)],
        highs=[((3 - 2 * s1) / 6, True), (Fraction(2, 3) - ir, True),
               ((Fraction(3, 2) - s1) / 3, True), (Fraction(1, 2), True)],
    ).pick()
    if r1 is None:
        raise ValueError(f"no dual r1 for {t.as_strings()} and k={k}")
    iq1 = Fraction(3, 2) - s1 - 3 * r1
    qt1 = _Bounds(
        lows=[(iq1, True), (1 - s1 / 2 - 2 * irt1, True), (iq + iq1 - iqt, True),
              (Fraction(3, 2) - 2 * (irt + irt1) - iqt, True), (Fraction(0), False)],
        highs=[(s1 / 2, False), (Fraction(1, 2) - iqt, False), (1 - k * iqt, True)],
    ).pick()
    if qt1 is None or iq1 <= 0:
        raise ValueError(f"no dual q1~ for {t.as_strings()} and k={k}")
    dual = t.with_duals(_from_inv(iq1), _from_inv(qt1), _from_inv(r1), _from_inv(irt1))
    if not (corollary_admissible(dual) and _homogeneous_low(s1, iq1, qt1, r1, irt1)):
        raise ValueError(f"dual indices for {t.as_strings()} fail the Duhamel estimate range")
    iq0t = 1 - k * iqt - qt1
    iq0 = 1 - k * iq - iq1
    ir2 = 1 - k * ir
    if not (iq0t > 0 and iq0 >= 0 and ir2 <= r1):
        raise ValueError("Hoelder bookkeeping fails for these dual indices")
    return DualIndices(dual, _from_inv(iq0t), _from_inv(iq0), _from_inv(ir2))


def life_span(C: float, data_norm: float, k, q0_tilde) -> ContractionPlan:
    """Ball radius M = 2 C |data| and the time T solving C T^(1/q0~) M^(k-1) = 1/2."""
    if not C > 0:
        raise ValueError("C must be positive")
    if data_norm < 0:
        raise ValueError("data_norm must be nonnegative")
    k, q0t = _er(k), _er(q0_tilde)
    if not k.value > 1:
        raise ValueError("k must exceed 1")
    if q0t.infinite_flag or not q0t.value > 0:
        raise ValueError("q0~ must be finite and positive")
    M = 2.0 * C * data_norm
    if M == 0:
        T = 0.99
    else:
        T = min(0.99, (1.0 / (2.0 * C * M ** (float(k) - 1.0))) ** float(q0t))
    return ContractionPlan(k=k, q0_tilde=q0t, M=M, T=T, C=float(C))


def _grid(den: int, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1, 2)):
    start = floor(lo * den)
    stop = floor(hi * den)
    return [Fraction(i, den) for i in range(max(start, 1), stop + 1)]


def sample_region(n, sigma, denominator: int = 40):
    """Rows (1/r, 1/r~, admissible) over a rational grid in (0, 1/2]^2.

    A point is admissible when some (q~, q) completes it to a tuple accepted
    by :func:`thm1_admissible`: q is fixed by scaling and 1/q~ is taken at the
    midpoint of its feasible interval.
    """
    n, s = int(n), _fr(sigma)
    rows = []
    for ir in _grid(denominator):
        for irt in _grid(denominator):
            iq = Fraction(n, 2) - s - n * ir
            ok = False
            if 0 < iq <= Fraction(1, 2):
                lo = max(iq, Fraction(n, 2) - s - (n - 1) * irt)
                if lo < Fraction(1, 2):
                    iqt = (lo + Fraction(1, 2)) / 2
                    t = ExponentTuple(n, q=_from_inv(iq), q_tilde=_from_inv(iqt),
                                      r=_from_inv(ir), r_tilde=_from_inv(irt), sigma=s)
                    ok = thm1_admissible(t)
            rows.append((ir, irt, ok))
    return rows


def sample_propfix(n, gamma, denominator: int = 60):
    """All (r, r~) on the grid 1/r, 1/r~ in {j/denominator} accepted by propfix_admissible."""
    out = []
    for ir in _grid(denominator):
        for irt in _grid(denominator, hi=ir):
            r, rt = _from_inv(ir), _from_inv(irt)
            if propfix_admissible(n, gamma, r, rt):
                out.append((r, rt))
    return out


def kmax_curve(n, sigmas):
    """Rows (sigma, k_max) for the ill-posedness threshold curve."""
    return [(ExtendedRational(_fr(s)), k_max(n, s)) for s in sigmas]


def write_region_csv(path, rows, header=("inv_r", "inv_r_tilde", "admissible")):
    """Write region rows with exact rationals rendered as strings."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([str(v).lower() if isinstance(v, bool) else str(v) for v in row])
    return path
