"""Predicted leading constants: local densities and regularized Euler products.

At a good prime (p not in {2, 3}) the local height transform of the trivial
character evaluates in closed form over the boundary strata:

    Hhat_p(s) = p^{-n} * sum_A #D_A^o(F_p) * prod_{alpha in A}
                (p - 1) / (p^{1 + s_alpha - rho_alpha} - 1),

the sum running over all subsets A of boundary components (A = {} is the
open orbit with p^n points).  At s = rho this is #X(F_p)/p^n, the expected
local density.  The product over all places diverges like zeta(1)^rank, so
each finite place is regularized by (1 - 1/p)^rank; the Tamagawa number is

    tau = arch_density * prod_p density_p * (1 - 1/p)^rank,

and the predicted leading constant of the point count is
tau * prod_alpha rho_alpha^{-1} / (rank - 1)!.

Writing u = 1/p, the regularized good factor is the polynomial

    g(u) = (sum_A #D_A^o as a polynomial in p) * u^n * (1 - u)^rank,

which this module peels into zeta factors: exponents e_k are chosen so that
g(u) = prod_k (1 - u^k)^{e_k} * (1 + h(u)) with h(u) = O(u^6).  For P^n the
peel is exact with g = 1 - u^{n+1} (the product telescopes to 1/zeta(n+1)),
for BlP2-1 it is (1 - u^2)^2, and for BlP2-2/3 the residual h is an explicit
rational function with |h(1/p)| <= C_h p^{-6} for p >= 5, where C_h is
computed rigorously from the coefficients of h's numerator.  The reported
Euler product multiplies the exact factors for p <= P_max by the
zeta-completion of the peeled shapes over p > P_max and bounds the omitted
prod (1 + h_p) by exp(sum |h_p|) - 1 <= exp(C_h P_max^{-5} / 5 * margin) - 1.

The primes 2 and 3 enter through brute-force p-adic integrals with explicit
truncation bounds (module fourier); the closed form appears to hold there
too for the catalog, but that is never assumed.

Per-prime factors are independent pure computations; this module evaluates
them serially in ascending order so reported floats are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import mpmath

from . import geometry
from ._util import primes_upto
from .geometry import VarietyModel

PEEL_ORDER = 5
# Depth cap for the brute small-prime integrals on the projective spaces; the
# blown-up models pick a shallower per-prime depth (see fourier.suggested_depth)
# because their undetermined-cube count grows geometrically with the depth.
SMALL_PRIME_DEPTH = 30
# Flat allowance (relative to the archimedean density) for assembling the
# product in floats; the true roundoff is ~1e-13 relative for any P_max.
FLOAT_ASSEMBLY_EPS = 1e-12


@dataclass(frozen=True)
class LocalFactor:
    """One local factor of a height transform or Euler product."""

    place: Union[int, str]  # a prime, or "infinity"
    value: Union[float, complex, Fraction]
    provenance: str  # "closed-form" | "brute-force" | "quadrature"
    error_bound: float

    def __post_init__(self):
        if self.provenance not in ("closed-form", "brute-force", "quadrature"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.provenance == "closed-form" and self.error_bound != 0:
            raise ValueError("closed-form factors must carry error_bound 0")
        if self.provenance != "closed-form" and not self.error_bound > 0:
            raise ValueError("non-closed-form factors need a positive error_bound")


@dataclass(frozen=True)
class EulerProductResult:
    """A regularized Euler product truncated at p_max with rigorous bounds."""

    model_id: str
    p_max: int
    rank: int
    arch_density: float
    partial_product: float  # prod_{p <= p_max} of regularized local factors
    zeta_completion: float  # prod_{p > p_max} of the peeled zeta shapes
    peeled: tuple  # ((k, e_k), ...): zeta(k)^{e_k} factors peeled off
    tamagawa: float  # arch_density * partial_product * zeta_completion
    tail_bound: float  # |error| from truncating p > p_max (plus float slack)
    small_prime_error: float  # |error| from the brute factors at p = 2, 3


def archimedean_density(model: VarietyModel) -> float:
    """The real density integral H_inf(x; rho)^{-1} dx over affine n-space.

    All values are exact piecewise integrals of products of max-functions;
    the cell decompositions are recorded below.

    P^n:  integrand max(1, |x_1|, ..., |x_n|)^{-(n+1)}.  The unit box gives
          2^n; the shell max = t > 1 has surface measure n 2^n t^{n-1}, so
          the outside gives n 2^n int t^{-2} dt = n 2^n.  Total 2^n (n + 1).
    BlP2-1: integrand max(1,|x|,|y|)^{-2} max(1,|y|)^{-1}.  By quadrant
          symmetry 4x the first quadrant, which splits into four cells each
          of mass 1: {x,y<=1} -> 1; {y<=1<=x}: int x^{-2} = 1; {1<=y, x<=y}:
          int y^{-3} * y dy = 1; {1<=y<=x}: int y^{-1} int_y x^{-2} = 1.
          Total 16.
    BlP2-2: integrand [max(1,|x|,|y|) max(1,|x|) max(1,|y|)]^{-1}.  First
          quadrant: {x,y<=1} -> 1; {x<=1<=y} and {y<=1<=x} -> 1 each;
          {x,y>=1} -> 2 (the two orderings each give int y^{-2} dy = 1).
          Total 4 * 5 = 20.
    BlP2-3: integrand [max(1,|x|) max(1,|y|) max(1,|x-y|)]^{-1}, invariant
          under the 12-element group generated by (x,y) -> (y,x), -> (-x,-y)
          and -> (x-y, -y).  On the fundamental domain {x > 0, x/2 <= y <= x}
          the integral evaluates to J = 1/4 + (ln 2 - 1/2) + pi^2/12 + ln 2,
          using int_1^2 ln(t)/(t(t-1))-type pieces that reduce to
          Li_2(1/2) = pi^2/12 - ln^2(2)/2.  Total 12 J = pi^2 + 24 ln 2 - 3.
    """
    if not model.centers:
        n = model.dim
        return float(2**n * (n + 1))
    r = len(model.centers)
    if r == 1:
        return 16.0
    if r == 2:
        return 20.0
    return math.pi**2 + 24.0 * math.log(2.0) - 3.0


def denef_local_factor(model: VarietyModel, p: int, s) -> Union[Fraction, float]:
    """Closed-form local factor of the height transform at a good prime.

    Args:
        model: catalog entry.
        p: prime outside {2, 3}.
        s: Picard vector with s_alpha > rho_alpha - 1 for every alpha.

    Returns:
        The stratum sum as an exact Fraction when every exponent
        1 + s_alpha - rho_alpha is an integer, else a float.
    """
    svec = geometry.coerce_picard(model, s)
    exps = [1 + sv - Fraction(r) for sv, r in zip(svec, model.rho)]
    if any(e <= 0 for e in exps):
        raise ValueError(
            f"s = {svec} outside the convergence domain: need s_a > rho_a - 1"
        )
    exact = all(e.denominator == 1 for e in exps)
    n = model.dim
    total = Fraction(0) if exact else 0.0
    for subset in model.stratum_polys:
        count = geometry.stratum_count(model, subset, p)  # validates p
        term = Fraction(count) if exact else float(count)
        for name, e in zip(model.components, exps):
            if name in subset:
                if exact:
                    term *= Fraction(p - 1, p ** int(e) - 1)
                else:
                    term *= (p - 1) / (float(p) ** float(e) - 1.0)
        total += term
    if exact:
        return total / Fraction(p) ** n
    return total / float(p) ** n


def local_density(
    model: VarietyModel, p: int, small_depth: Optional[int] = None
) -> Union[Fraction, float]:
    """Expected local density at p: #X(F_p)/p^n at good p, brute at 2 and 3.

    small_depth overrides the truncation depth of the brute integral at the
    small primes; None picks the per-model default.
    """
    if p in model.small_primes:
        from . import fourier

        if small_depth is None:
            small_depth = fourier.suggested_depth(model, p)
        zero = (0,) * model.dim
        return fourier.brute_padic_fourier(
            model, p, zero, geometry.rho_vector(model), depth=small_depth
        ).value.real
    return denef_local_factor(model, p, geometry.rho_vector(model))


def good_prime_factor(model: VarietyModel, p: int) -> Fraction:
    """Regularized factor local_density(p) * (1 - 1/p)^rank at a good prime."""
    dens = denef_local_factor(model, p, geometry.rho_vector(model))
    return dens * (1 - Fraction(1, p)) ** model.rank


def regularization_residual(model: VarietyModel, p: int, s) -> Union[Fraction, float]:
    """|Hhat_p(s) * prod_alpha (1 - p^{-(1+s_alpha-rho_alpha)}) - 1|.

    A diagnostic for the convergence rate of the regularized product; decays
    like p^{-2} on the catalog (exactly p^{-3} for P2 at s = rho).
    """
    svec = geometry.coerce_picard(model, s)
    exps = [1 + sv - Fraction(r) for sv, r in zip(svec, model.rho)]
    if any(e <= Fraction(1, 2) for e in exps):
        raise ValueError("need s_alpha > rho_alpha - 1/2 for the residual bound")
    value = denef_local_factor(model, p, s)
    if isinstance(value, Fraction):
        for e in exps:
            value *= 1 - Fraction(1, p ** int(e))
        return abs(value - 1)
    for e in exps:
        value *= 1.0 - float(p) ** (-float(e))
    return abs(value - 1.0)


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _series_log(a: Sequence[Fraction], order: int) -> list:
    """Coefficients 1..order of log of a power series with a[0] = 1."""
    out = [Fraction(0)] * (order + 1)
    for m in range(1, order + 1):
        am = a[m] if m < len(a) else Fraction(0)
        s = sum(
            (j * out[j] * (a[m - j] if m - j < len(a) else Fraction(0))
             for j in range(1, m)),
            Fraction(0),
        )
        out[m] = am - s / m
    return out


def regularized_factor_poly(model: VarietyModel) -> list:
    """g(u) with g(1/p) = local_density(p) * (1 - 1/p)^rank, exact."""
    n = model.dim
    total = [Fraction(0)] * (n + 1)
    for poly in model.stratum_polys.values():
        for k, c in enumerate(poly):
            total[k] += c
    g = list(reversed(total))  # * u^n turns p^k into u^{n-k}
    for _ in range(model.rank):
        g = _poly_mul(g, [Fraction(1), Fraction(-1)])
    return g


@lru_cache(maxsize=None)
def _peel_data(model_id: str):
    """Zeta-peel exponents and the rigorous residual constant for a model.

    Returns (peeled, C_h) with peeled = ((k, e_k), ...) such that
    g(u) = prod (1 - u^k)^{e_k} (1 + h(u)), h(u) = O(u^{PEEL_ORDER+1}), and
    |h(u)| <= C_h * u^{PEEL_ORDER+1} for 0 < u <= 1/5.
    """
    model = geometry.load_model(model_id)
    g = regularized_factor_poly(model)
    K = PEEL_ORDER
    c = _series_log(g, K)
    assert c[1] == 0, "regularized factor must be 1 + O(u^2)"
    e: dict = {}
    for k in range(2, K + 1):
        tot = c[k]
        for d in range(2, k):
            if k % d == 0 and d in e:
                tot += e[d] * Fraction(d, k)
        ek = -tot
        assert ek.denominator == 1, f"non-integer peel exponent at k={k}"
        if ek != 0:
            e[k] = int(ek)
    num = list(g)
    den = [Fraction(1)]
    for k, ek in e.items():
        base = [Fraction(1)] + [Fraction(0)] * (k - 1) + [Fraction(-1)]
        for _ in range(abs(ek)):
            if ek > 0:
                den = _poly_mul(den, base)
            else:
                num = _poly_mul(num, base)
    length = max(len(num), len(den))
    num += [Fraction(0)] * (length - len(num))
    den += [Fraction(0)] * (length - len(den))
    resid = [a - b for a, b in zip(num, den)]  # h = resid / den
    assert all(v == 0 for v in resid[: K + 1]), "peel left low-order terms"
    u5 = Fraction(1, 5)
    c_num = sum(
        (abs(v) * u5 ** (m - (K + 1)) for m, v in enumerate(resid) if m > K),
        Fraction(0),
    )
    den_at_u5 = Fraction(1)
    for k, ek in e.items():
        if ek > 0:
            den_at_u5 *= (1 - u5**k) ** ek
    return tuple(sorted(e.items())), c_num / den_at_u5


def _euler_tail_bound(model: VarietyModel, p_max: int) -> float:
    """Bound |prod_{p > p_max} (1 + h_p) - 1| via sum |h_p| <= C_h/(5 P^5)."""
    _, c_h = _peel_data(model.id)
    if c_h == 0:
        return 0.0
    K = PEEL_ORDER
    h_sum = float(c_h) * p_max ** (-K) / K
    h_max = float(c_h) * float(p_max + 1) ** (-(K + 1))
    assert h_max < 0.5
    return math.expm1(h_sum / (1.0 - h_max))


def tamagawa_number(
    model: VarietyModel,
    p_max: int = 10_000,
    small_depth: Optional[int] = None,
) -> EulerProductResult:
    """Regularized Euler product for tau = arch * prod_p density_p (1-1/p)^rank.

    Args:
        model: catalog entry.
        p_max: truncation point, at least 100; factors above it enter only
            through the peeled zeta completion.
        small_depth: truncation depth of the brute integrals at p = 2, 3;
            None picks the per-model default (deep for projective spaces,
            shallower for the blow-ups whose cube refinement branches).

    Returns:
        EulerProductResult; the tamagawa field approximates tau with
        |error| <= tail_bound + small_prime_error.
    """
    if p_max < 100:
        raise ValueError("p_max must be at least 100")
    from . import fourier

    arch = archimedean_density(model)
    rho = geometry.rho_vector(model)
    zero = (0,) * model.dim
    small_factors = []
    for p in sorted(model.small_primes):
        depth = small_depth if small_depth is not None else fourier.suggested_depth(model, p)
        brute = fourier.brute_padic_fourier(model, p, zero, rho, depth=depth)
        reg = (1.0 - 1.0 / p) ** model.rank
        small_factors.append((float(brute.value.real), brute.error_bound, reg))
    partial = 1.0
    for value, _, reg in small_factors:
        partial *= value * reg
    g = [float(c) for c in regularized_factor_poly(model)]
    primes = [p for p in primes_upto(p_max) if p >= 5]
    for p in primes:
        u = 1.0 / p
        acc = 0.0
        for c in reversed(g):
            acc = acc * u + c
        partial *= acc
    peeled, _ = _peel_data(model.id)
    completion = 1.0
    with mpmath.workdps(30):
        for k, ek in peeled:
            body = float(mpmath.zeta(k))
            for p in (2, 3, *primes):
                body *= 1.0 - float(p) ** (-k)
            completion *= body ** (-ek)
    tam = arch * partial * completion
    tail = abs(tam) * _euler_tail_bound(model, p_max) + FLOAT_ASSEMBLY_EPS * arch
    rel_small = 0.0
    for value, err, _ in small_factors:
        rel_small += err / (value - err)
    small_err = abs(tam) * rel_small * (1.0 + rel_small)
    return EulerProductResult(
        model_id=model.id,
        p_max=p_max,
        rank=model.rank,
        arch_density=arch,
        partial_product=partial,
        zeta_completion=completion,
        peeled=peeled,
        tamagawa=tam,
        tail_bound=tail,
        small_prime_error=small_err,
    )


def predicted_constant(
    model: VarietyModel,
    p_max: int = 10_000,
    small_depth: Optional[int] = None,
    result: Optional[EulerProductResult] = None,
) -> float:
    """Leading constant c * tau / (rank - 1)! with c = prod_alpha 1/rho_alpha."""
    if result is None:
        result = tamagawa_number(model, p_max=p_max, small_depth=small_depth)
    c = Fraction(1)
    for r in model.rho:
        c /= r
    return result.tamagawa * float(c) / math.factorial(model.rank - 1)
