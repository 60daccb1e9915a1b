"""Pointwise 2x2 analysis of the damped evolution matrix in Fourier space.

Each spectral mode of the linearized system evolves by exp(-t A(xi)) where

    A(xi) = [[nu_eta*alpha,            i*sgn(omega1)*xi*sigma],
             [i*sgn(omega2)*xi*sigma,  nu_u*epsilon          ]]

A splits into a nonnegative diagonal (the damping) plus a skew-Hermitian
coupling, so exp(-t A) is a contraction.  The exponential is evaluated in
closed form: for M = -t A write s = tr(M)/2 and q^2 = s^2 - det(M); then

    exp(M) = e^(s+q) (I/2 + (M - s I)/(2q)) + e^(s-q) (I/2 - (M - s I)/(2q))

with the confluent limit handled by the series of sinh(q)/q.  Both exponents
s +- q have nonpositive real part, so nothing overflows at large t*xi^2.

Scalar or ndarray ``xi``/``t`` are accepted (with broadcasting); scalar input
gives scalar output.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import systems
from .systems import Dissipation, SystemSpec

_EQ_EIGEN_REL = 1e-14            # |delta| below this (times max(tr^2, 1)) means a double eigenvalue
_SMALL_Q = 1e-4                  # switch to the sinh(q)/q series below this
_LOW_GRID = np.arange(1, 10001) * 1e-3          # low-frequency scan: 1e-3 .. 10
_HIGH_GRID = np.geomspace(0.2, 1.0e3, 4000)     # high-frequency scan grid
_NORM_FLOOR = 1e-300             # keeps log() finite when exp underflows


class Klass(Enum):
    KDV_BURGERS = "kdv-burgers"
    BBM_BURGERS = "bbm-burgers"
    SLOW_DECAY = "slow-decay"


class NoThresholdError(RuntimeError):
    """The low-frequency scan failed at its very first grid point."""


class UnclassifiableError(RuntimeError):
    """Order conditions were contradictory (unreachable for validated specs)."""


@dataclass(frozen=True)
class SymbolMatrix:
    """Entries of A(xi): diagonal damping and magnitudes of the i*... couplings."""

    xi: object
    d11: object     # nu_eta * alpha
    d22: object     # nu_u * epsilon
    off12: object   # sgn(omega1) * xi * sigma   (entry is i*off12)
    off21: object   # sgn(omega2) * xi * sigma   (entry is i*off21)


@dataclass(frozen=True)
class EigenData:
    tr: object
    det: object
    delta: object       # tr^2 - 4 det, computed in the cancellation-free form
    lambda1: object     # Re(lambda1) <= Re(lambda2)
    lambda2: object
    z_abs: object       # |z| of the Schur triangularization


@dataclass(frozen=True)
class Classification:
    klass: Klass
    delta_m: float
    delta_M: float
    resonance: float | None   # a**-0.5, present only under C2


def _maybe_scalar(value, scalar: bool):
    if scalar and np.ndim(value) == 0:
        return value.item() if hasattr(value, "item") else value
    return value


def symbol_matrix(spec: SystemSpec, xi) -> SymbolMatrix:
    scalar = np.isscalar(xi)
    m = systems.multipliers(spec, xi)
    xs = np.multiply(m.xi, m.sigma)
    out = SymbolMatrix(
        xi=m.xi,
        d11=spec.nu_eta * m.alpha,
        d22=spec.nu_u * m.epsilon,
        off12=m.sgn1 * xs,
        off21=m.sgn2 * xs,
    )
    if scalar:
        return SymbolMatrix(*(_maybe_scalar(v, True) for v in
                              (out.xi, out.d11, out.d22, out.off12, out.off21)))
    return out


def _eigen_arrays(spec: SystemSpec, xi):
    m = systems.multipliers(spec, xi)
    da = spec.nu_eta * m.alpha
    de = spec.nu_u * m.epsilon
    xs = np.multiply(m.xi, m.sigma)
    tr = da + de
    det = da * de + xs * xs
    delta = (da - de) ** 2 - 4.0 * xs * xs
    sq = np.sqrt(np.asarray(delta, dtype=complex))
    lam2 = 0.5 * (tr + sq)
    safe = np.where(np.abs(lam2) > 0.0, lam2, 1.0)
    lam1 = np.where(delta > 0.0, det / safe, 0.5 * (tr - sq))
    equal = np.abs(delta) < _EQ_EIGEN_REL * np.maximum(tr * tr, 1.0)
    half = np.asarray(0.5 * tr, dtype=complex)
    lam1 = np.where(equal, half, lam1)
    lam2 = np.where(equal, half, lam2)
    z_abs = np.where(delta <= 0.0, np.abs(da - de), 2.0 * np.abs(xs))
    return tr, det, delta, lam1, lam2, z_abs


def eigen(spec: SystemSpec, xi) -> EigenData:
    scalar = np.isscalar(xi)
    vals = _eigen_arrays(spec, xi)
    return EigenData(*(_maybe_scalar(v, scalar) for v in vals))


def _expm_entries(spec: SystemSpec, xi, t):
    """Entries of exp(-t A(xi)); xi and t broadcast."""
    m = systems.multipliers(spec, xi)
    t = np.asarray(t, dtype=float)
    xs = np.multiply(m.xi, m.sigma)
    m11 = -t * (spec.nu_eta * m.alpha)
    m22 = -t * (spec.nu_u * m.epsilon)
    m12 = -1j * t * (m.sgn1 * xs)
    m21 = -1j * t * (m.sgn2 * xs)
    s = 0.5 * (m11 + m22)
    # q^2 = s^2 - det(M); the off-diagonal product is real
    q2 = 0.25 * (m11 - m22) ** 2 + (m12 * m21).real
    q = np.sqrt(np.asarray(q2, dtype=complex))
    small = np.abs(q) < _SMALL_Q
    qs = np.where(small, 1.0, q)
    ep = np.exp(s + qs)
    em = np.exp(s - qs)
    es = np.exp(s)
    # q^2 is real (q real or purely imaginary), so both scalars below are
    # real; dropping the residual imaginary part keeps exp(-tA(-xi)) the
    # exact conjugate of exp(-tA(xi))
    cosh_t = np.where(small, es * (1.0 + q2 / 2.0 + q2 * q2 / 24.0),
                      (0.5 * (ep + em)).real)
    sinhc_t = np.where(small, es * (1.0 + q2 / 6.0 + q2 * q2 / 120.0),
                       (0.5 * (ep - em) / qs).real)
    e11 = cosh_t + sinhc_t * (m11 - s)
    e22 = cosh_t + sinhc_t * (m22 - s)
    e12 = sinhc_t * m12
    e21 = sinhc_t * m21
    return e11, e12, e21, e22


def propagator_entries(spec: SystemSpec, xi, t):
    """Public alias used by the exact linear evolution and the solver oracle."""
    return _expm_entries(spec, xi, t)


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def _opnorm2(e11, e12, e21, e22):
    frob2 = _abs2(e11) + _abs2(e12) + _abs2(e21) + _abs2(e22)
    det = np.abs(e11 * e22 - e12 * e21)
    disc = np.maximum(frob2 * frob2 - 4.0 * det * det, 0.0)
    return np.sqrt(0.5 * (frob2 + np.sqrt(disc)))


def semigroup_norm_exact(spec: SystemSpec, xi, t):
    """Operator norm of exp(-t A(xi)): largest singular value of the exact exponential."""
    scalar = np.isscalar(xi) and np.isscalar(t)
    out = _opnorm2(*_expm_entries(spec, xi, t))
    return _maybe_scalar(out, scalar)


def semigroup_norm_bound(spec: SystemSpec, xi, t):
    """Frobenius-type upper bound on ||exp(-t A)||.

    sqrt(e^{-2t Re l1} + e^{-2t Re l2} + |z|^2 |(e^{-t l1} - e^{-t l2})/(l1 - l2)|^2),
    the divided difference read as -t e^{-t l} at a double eigenvalue.  Always
    >= semigroup_norm_exact.
    """
    scalar = np.isscalar(xi) and np.isscalar(t)
    tr, det, delta, lam1, lam2, z_abs = _eigen_arrays(spec, xi)
    t = np.asarray(t, dtype=float)
    e1 = np.exp(-2.0 * t * lam1.real)
    e2 = np.exp(-2.0 * t * lam2.real)
    s = -0.5 * t * tr
    q2 = (0.25 * delta) * t * t
    q = np.sqrt(np.asarray(q2, dtype=complex))
    small = np.abs(q) < _SMALL_Q
    qs = np.where(small, 1.0, q)
    dd_small = np.exp(s) * (1.0 + q2 / 6.0 + q2 * q2 / 120.0)
    dd_big = 0.5 * (np.exp(s + qs) - np.exp(s - qs)) / qs
    dd = t * np.abs(np.where(small, dd_small, dd_big))
    out = np.sqrt(e1 + e2 + (z_abs * dd) ** 2)
    return _maybe_scalar(out, scalar)


def low_freq_threshold(spec: SystemSpec) -> float:
    """Largest grid delta such that for all 0 < xi <= delta the discriminant is
    nonpositive and tr(A)/((nu_eta+nu_u) xi^2) stays within [1/2, 2].

    Scan grid: xi = 1e-3, 2e-3, ..., 10.
    """
    xi = _LOW_GRID
    tr, det, delta, *_ = _eigen_arrays(spec, xi)
    ratio = tr / ((spec.nu_eta + spec.nu_u) * xi * xi)
    ok = (delta <= 0.0) & (ratio >= 0.5) & (ratio <= 2.0)
    if not ok[0]:
        raise NoThresholdError(
            f"low-frequency conditions fail at xi = {xi[0]} for {spec}")
    bad = np.flatnonzero(~ok)
    return float(xi[-1] if bad.size == 0 else xi[bad[0] - 1])


def _class_ratio(spec: SystemSpec, xi, klass: Klass):
    *_, lam1, _l2, _z = _eigen_arrays(spec, xi)
    re1 = lam1.real
    if klass is Klass.KDV_BURGERS:
        return re1 / (xi * xi)
    if klass is Klass.BBM_BURGERS:
        return re1
    return re1 * xi * xi


def _high_freq_threshold(spec: SystemSpec, klass: Klass) -> float:
    """Smallest grid xi beyond which sign(delta) is settled and the class ratio
    stays within a factor 2 of its value at the end of the scan (xi = 1e3)."""
    xi = _HIGH_GRID
    tr, det, delta, *_ = _eigen_arrays(spec, xi)
    ratio = _class_ratio(spec, xi, klass)
    ref = ratio[-1]
    tol = 1e-10 * np.maximum(tr * tr, 1.0)
    near_zero = np.abs(delta) <= tol
    sign_ok = near_zero | (np.sign(delta) == np.sign(delta[-1])) | near_zero[-1]
    band_ok = (ratio >= 0.5 * ref) & (ratio <= 2.0 * ref)
    ok = sign_ok & band_ok
    bad = np.flatnonzero(~ok)
    return float(xi[0] if bad.size == 0 else xi[bad[-1] + 1])


def classify(spec: SystemSpec) -> Classification:
    """Dichotomy class from the multiplier orders, plus scan-based thresholds.

    Complete damping: order(sigma) <= 0 puts the system in the BBM-Burgers
    class, order(sigma) >= 1 in the KdV-Burgers class.  With damping in one
    equation only, the strength order (epsilon when u is damped, alpha when
    eta is damped) enters: order(sigma) >= 2 - strength/2 gives KdV-Burgers,
    |order(sigma)| < 2 - strength/2 gives BBM-Burgers, and
    order(sigma) <= -2 + strength/2 leaves modes whose damping rate tends to
    zero (arbitrarily slow decay).
    """
    prof = systems.orders(spec)
    s = prof.order_sigma
    if spec.diss is Dissipation.COMPLETE:
        klass = Klass.BBM_BURGERS if s <= 0 else Klass.KDV_BURGERS
    else:
        strength = (prof.order_epsilon if spec.diss is Dissipation.PARTIAL_U
                    else prof.order_alpha)
        threshold = 2.0 - 0.5 * strength
        if s >= threshold:
            klass = Klass.KDV_BURGERS
        elif s <= -threshold:
            klass = Klass.SLOW_DECAY
        elif abs(s) < threshold:
            klass = Klass.BBM_BURGERS
        else:
            raise UnclassifiableError(f"contradictory order conditions for {spec}")
    delta_m = low_freq_threshold(spec)
    delta_M = _high_freq_threshold(spec, klass)
    resonance = None
    if spec.constraint == "C2":
        resonance = float(spec.a ** -0.5)
        delta_m = min(delta_m, resonance)
        delta_M = max(delta_M, resonance)
    delta_M = max(delta_M, delta_m)
    return Classification(klass=klass, delta_m=delta_m, delta_M=delta_M,
                          resonance=resonance)
