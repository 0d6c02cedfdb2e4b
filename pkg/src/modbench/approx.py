"""Certified polynomial approximation of x^{it} and the sech power series.

Fits are Chebyshev interpolants converted to the monomial basis with
coefficients snapped to Gaussian rationals (denominators capped at 10^6);
the certified sup error is obtained from dense Chebyshev-distributed
sampling of the *rationalized* polynomial plus a Lipschitz fill-in term,
so the rationalization error is part of the certificate by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegreeExhausted

DENOMINATOR_CAP = 10**6
MIN_SAMPLES = 10_000
MAX_DEGREE = 200
INTERVAL_FLOOR = 1e-3  # fits live inside [1e-3, 2 - 1e-3]
HULL_MARGIN = 1e-6
SORT_GROWTH_PER_R = 6  # R = P + Q sends S_n into S_{6n}


@dataclass(frozen=True)
class PolyApprox:
    """Rational-coefficient polynomial approximation of x^{it} on an interval."""

    t: float
    degree: int
    coeffs: tuple  # ((re: Fraction, im: Fraction), ...) in the monomial basis
    interval: tuple[float, float]
    sup_error: float  # certified bound on |x^{it} - p(x)| over the interval
    sup_abs: float  # certified bound on |p(x)| over the interval

    @property
    def coeffs_complex(self) -> np.ndarray:
        return np.array([float(re) + 1j * float(im) for re, im in self.coeffs], dtype=complex)

    def eval(self, x) -> np.ndarray:
        """Horner evaluation at scalar or array arguments."""
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for c in self.coeffs_complex[::-1]:
            out = out * x + c
        return out

    def eval_operator(self, a: np.ndarray) -> np.ndarray:
        """Horner evaluation at a square complex matrix."""
        n = a.shape[0]
        out = np.zeros_like(a)
        eye = np.eye(n, dtype=complex)
        for c in self.coeffs_complex[::-1]:
            out = out @ a + c * eye
        return out

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "degree": self.degree,
            "coeffs": [
                [re.numerator, re.denominator, im.numerator, im.denominator]
                for re, im in self.coeffs
            ],
            "interval": [self.interval[0], self.interval[1]],
            "sup_error": self.sup_error,
        }


def _chebyshev_nodes(lo: float, hi: float, count: int) -> np.ndarray:
    k = np.arange(count)
    mid, rad = (hi + lo) / 2.0, (hi - lo) / 2.0
    return mid + rad * np.cos(np.pi * (2 * k + 1) / (2 * count))


def _power_it(t: float, x: np.ndarray) -> np.ndarray:
    return np.exp(1j * t * np.log(x))


def _monomial_from_chebyshev(t: float, degree: int, lo: float, hi: float) -> np.ndarray:
    """Interpolate x^{it} at Chebyshev nodes; return monomial coefficients in x."""
    nodes = _chebyshev_nodes(lo, hi, degree + 1)
    vals = _power_it(t, nodes)
    u = (2.0 * nodes - (hi + lo)) / (hi - lo)
    m = degree + 1
    cheb = np.zeros(m, dtype=complex)
    for j in range(m):
        cheb[j] = (2.0 / m) * np.sum(vals * np.cos(j * np.arccos(np.clip(u, -1, 1))))
    cheb[0] /= 2.0
    series = np.polynomial.chebyshev.Chebyshev(cheb, domain=[lo, hi])
    return series.convert(kind=np.polynomial.Polynomial, domain=[lo, hi]).coef.astype(complex)


def _rationalize(coeffs: np.ndarray) -> tuple:
    return tuple(
        (
            Fraction(float(c.real)).limit_denominator(DENOMINATOR_CAP),
            Fraction(float(c.imag)).limit_denominator(DENOMINATOR_CAP),
        )
        for c in coeffs
    )


def _certify(p: PolyApprox) -> tuple[float, float]:
    """Certified (sup_error, sup_abs) by dense sampling plus Lipschitz fill-in.

    |p'| is bounded from its own samples, closed off with the Markov
    brothers' inequality: ||p'|| <= max-sample(|p'|) / (1 - q) where
    q = gap * 2(d-1)^2 / (2(hi-lo)) accounts for the unsampled stretches.
    """
    lo, hi = p.interval
    d = max(p.degree, 1)
    coeffs = p.coeffs_complex
    dcoeffs = coeffs[1:] * np.arange(1, len(coeffs))

    def horner(cs, x):
        out = np.zeros_like(x, dtype=complex)
        for c in cs[::-1]:
            out = out * x + c
        return out

    count = max(MIN_SAMPLES, 20 * d * d)
    while True:
        xs = np.sort(np.concatenate([[lo, hi], _chebyshev_nodes(lo, hi, count)]))
        gap = float(np.max(np.diff(xs)))
        q = gap * (d - 1) ** 2 / (hi - lo) if d > 1 else 0.0
        if q < 0.5:
            break
        count *= 4
    px = horner(coeffs, xs.astype(complex))
    dpx = horner(dcoeffs, xs.astype(complex)) if len(dcoeffs) else np.zeros_like(xs, dtype=complex)
    dp_sup = float(np.max(np.abs(dpx))) / (1.0 - q)
    err = float(np.max(np.abs(_power_it(p.t, xs) - px)))
    sup = float(np.max(np.abs(px)))
    lip_err = abs(p.t) / lo + dp_sup
    return err + 0.5 * gap * lip_err, sup + 0.5 * gap * dp_sup


def fit_power_it(t: float, degree: int, interval) -> PolyApprox:
    """Chebyshev fit of x^{it} on the interval, rationalized and certified."""
    lo, hi = float(interval[0]), float(interval[1])
    if not (INTERVAL_FLOOR <= lo < hi <= 2.0 - INTERVAL_FLOOR):
        raise ValueError(f"interval [{lo}, {hi}] outside [{INTERVAL_FLOOR}, {2 - INTERVAL_FLOOR}]")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if t == 0.0:
        one = (Fraction(1), Fraction(0))
        return PolyApprox(0.0, 0, (one,), (lo, hi), 0.0, 1.0)
    coeffs = _monomial_from_chebyshev(t, degree, lo, hi)
    p = PolyApprox(float(t), degree, _rationalize(coeffs), (lo, hi), math.inf, math.inf)
    sup_error, sup_abs = _certify(p)
    return PolyApprox(float(t), degree, p.coeffs, (lo, hi), sup_error, sup_abs)


def fit_power_to_target(t: float, target: float, interval, max_degree: int = MAX_DEGREE) -> PolyApprox:
    """Escalate the degree until the certified error beats the target.

    Raises DegreeExhausted when no degree up to the cap reaches the target
    (x^{it} oscillates without bound toward 0, so intervals hugging 0 fail).
    """
    best = None
    degree = 2
    while degree <= max_degree:
        p = fit_power_it(t, degree, interval)
        if best is None or p.sup_error < best.sup_error:
            best = p
        if best.sup_error < target:
            return best
        degree = degree + 2 if degree < 16 else int(degree * 1.5)
    raise DegreeExhausted(
        f"could not certify error < {target} for t={t} on {tuple(interval)} within degree {max_degree}"
    )


def spectral_hull(eigenvalues, margin: float = HULL_MARGIN) -> tuple[float, float]:
    """Fit interval for spec(R): the numerical hull widened by a safety margin.

    The margin absorbs eigensolver roundoff so the true spectrum stays
    inside the certified interval; the result is clamped to the fit domain.
    """
    lo = max(float(np.min(eigenvalues)) - margin, INTERVAL_FLOOR)
    hi = min(float(np.max(eigenvalues)) + margin, 2.0 - INTERVAL_FLOOR)
    return lo, hi


def delta_bound(t: float, m: int, n: int, p_m: PolyApprox, p_n: PolyApprox) -> float:
    """delta_{t,m,n} = 1/m + (1/n) sup|p_m|; |x^{-it}| = 1 supplies the first factor.

    Requires that p_m certifies x^{it} to 1/m and p_n certifies x^{-it}
    to 1/n; the sup norm of p_m is taken over its fitted interval (recorded
    in the certificate).
    """
    if p_m.sup_error >= 1.0 / m:
        raise ValueError(f"p_m certifies only {p_m.sup_error}, needs < 1/{m}")
    if p_n.sup_error >= 1.0 / n:
        raise ValueError(f"p_n certifies only {p_n.sup_error}, needs < 1/{n}")
    if p_m.t != -p_n.t:
        raise ValueError("p_m and p_n must approximate mutually inverse powers")
    return 1.0 / m + p_m.sup_abs / n


def q_index(t: float, n: int, p_n: PolyApprox) -> int:
    """Sort index q with p_n(R)(S_1) inside S_q.

    Each application of R = P + Q multiplies the total bound by at most 6
    (both projections land in S_{3K}), so the monomial term c_k R^k costs
    |c_k| 6^k; the bound is summed exactly over the rational coefficients.
    """
    total = Fraction(0)
    for k, (re, im) in enumerate(p_n.coeffs):
        coeff_abs_sq = Fraction(re) ** 2 + Fraction(im) ** 2
        # exact ceil of sqrt via isqrt on a scaled integer
        num = coeff_abs_sq.numerator
        den = coeff_abs_sq.denominator
        mag_ceil = Fraction(math.isqrt(num * den) + (0 if math.isqrt(num * den) ** 2 == num * den else 1), den)
        total += mag_ceil * Fraction(SORT_GROWTH_PER_R) ** k
    return max(1, math.ceil(total))


@dataclass(frozen=True)
class SechSeries:
    """Coefficients a_n with e^{-|t|} = sum a_n sech(t)^{2n-1}, n >= 1."""

    coefficients: tuple  # exact Fractions, a_n = Catalan(n-1) / 2^(2n-1)

    def partial_sum(self) -> Fraction:
        return sum(self.coefficients, Fraction(0))

    def eval_partial(self, t: float) -> float:
        u = 1.0 / math.cosh(t)
        return float(sum(float(a) * u ** (2 * k - 1) for k, a in enumerate(self.coefficients, 1)))

    def truncation_bound(self) -> float:
        """|f_a tail| <= 1 - sum a_n on each eigencomponent, since |sech| <= 1."""
        return float(1 - self.partial_sum())


def sech_series(n_terms: int) -> SechSeries:
    """First n_terms coefficients of the sech expansion of e^{-|t|}.

    a_n = Catalan(n-1)/2^(2n-1): the generating identity
    (1 - sqrt(1-u^2))/u = sum Catalan(k-1) (u/2)^(2k-1) evaluated at
    u = sech(t); all a_n are positive and sum to 1.
    """
    if n_terms < 1:
        raise ValueError("need at least one term")
    coeffs = []
    for n in range(1, n_terms + 1):
        cat = math.comb(2 * (n - 1), n - 1) // n
        coeffs.append(Fraction(cat, 2 ** (2 * n - 1)))
    return SechSeries(tuple(coeffs))
