"""Coefficients and Fourier multipliers of the four-parameter two-way wave family.

A system is fixed by the dispersive coefficients (a, b, c, d) plus a tag saying
where the Laplacian damping acts (both equations, or only one of them).  Valid
coefficient sets satisfy the sum rule

    a + b + c + d = 1/3

together with one of the two sign patterns that make the linearized problem
well posed:

    C1:  b >= 0, d >= 0, a <= 0, c <= 0
    C2:  b >= 0, d >= 0, a = c > 0

Everything on the Fourier side derives from the multipliers

    omega1 = (1 - a xi^2)/(1 + b xi^2)    omega2 = (1 - c xi^2)/(1 + d xi^2)
    alpha  = xi^2/(1 + b xi^2)            epsilon = xi^2/(1 + d xi^2)

with sigma = sqrt(omega1 * omega2) and h_hat = sqrt(omega1/omega2), reading
0/0 as 1 at a common zero.  Under C2 both omegas vanish together at
xi = a**-0.5, so h_hat is evaluated in the cancelled form
sqrt((1 + d xi^2)/(1 + b xi^2)) there (equal everywhere, and finite).

All functions accept scalar or ndarray ``xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

COEFF_SUM = 1.0 / 3.0
SUM_TOL = 1e-12   # binary floats cannot represent 1/3 exactly
SIGN_TOL = 1e-12


class Dissipation(Enum):
    """Placement of the -xi^2 damping across the two equations."""

    COMPLETE = "complete"
    PARTIAL_U = "partial-u"
    PARTIAL_ETA = "partial-eta"

    @property
    def nu_eta(self) -> int:
        return 0 if self is Dissipation.PARTIAL_U else 1

    @property
    def nu_u(self) -> int:
        return 0 if self is Dissipation.PARTIAL_ETA else 1

    @classmethod
    def parse(cls, value) -> "Dissipation":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown dissipation tag {value!r} "
                         f"(expected one of {[m.value for m in cls]})")


class ConstraintViolation(ValueError):
    """Raised when (a, b, c, d) fail the sum rule or the C1/C2 sign patterns."""

    def __init__(self, constraint: str, detail: str):
        self.constraint = constraint
        self.detail = detail
        super().__init__(f"({constraint}) violated: {detail}")


@dataclass(frozen=True)
class SystemSpec:
    """A validated coefficient set plus its dissipation tag."""

    a: float
    b: float
    c: float
    d: float
    diss: Dissipation
    constraint: str        # "C1" or "C2"
    theta_sq: float        # 1 - 2(c + d); informational only
    physical_theta: bool   # c + d >= 0, i.e. theta_sq <= 1

    @property
    def nu_eta(self) -> int:
        return self.diss.nu_eta

    @property
    def nu_u(self) -> int:
        return self.diss.nu_u

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


def make_spec(a, b, c, d, diss=Dissipation.COMPLETE) -> SystemSpec:
    """Validate coefficients and return a SystemSpec.

    Raises ConstraintViolation naming the failed inequality.  The theta-range
    inequality c + d >= 0 is recorded in ``physical_theta`` rather than
    enforced: sign patterns like (a = d = 0, b > 0, c < 0) are classifiable
    and appear in the classification table even though they sit outside the
    physical velocity-height range.
    """
    a, b, c, d = float(a), float(b), float(c), float(d)
    diss = Dissipation.parse(diss)
    if not all(math.isfinite(v) for v in (a, b, c, d)):
        raise ConstraintViolation("C0", "coefficients must be finite")
    total = a + b + c + d
    if abs(total - COEFF_SUM) > SUM_TOL:
        raise ConstraintViolation("C0", f"a+b+c+d = {total!r}, expected 1/3")
    if b < -SIGN_TOL:
        raise ConstraintViolation("C1C2", f"b = {b!r} < 0")
    if d < -SIGN_TOL:
        raise ConstraintViolation("C1C2", f"d = {d!r} < 0")
    if a > SIGN_TOL:
        if abs(a - c) > SIGN_TOL:
            raise ConstraintViolation(
                "C1C2", f"a = {a!r} > 0 requires c = a, got c = {c!r}")
        constraint = "C2"
    else:
        if c > SIGN_TOL:
            raise ConstraintViolation(
                "C1C2", f"c = {c!r} > 0 requires a = c > 0, got a = {a!r}")
        constraint = "C1"
    return SystemSpec(a, b, c, d, diss, constraint,
                      theta_sq=1.0 - 2.0 * (c + d),
                      physical_theta=bool(c + d >= -SIGN_TOL))


@dataclass(frozen=True)
class MultiplierValues:
    """All Fourier-side scalars of one system at one (or many) wavenumbers."""

    xi: object
    omega1: object
    omega2: object
    sigma: object      # sqrt(omega1*omega2) >= 0
    alpha: object      # xi^2/(1 + b xi^2) >= 0
    epsilon: object    # xi^2/(1 + d xi^2) >= 0
    h_hat: object

    @property
    def sgn1(self):
        return np.sign(self.omega1)

    @property
    def sgn2(self):
        return np.sign(self.omega2)


def multipliers(spec: SystemSpec, xi) -> MultiplierValues:
    """Evaluate omega1, omega2, sigma, alpha, epsilon, h_hat at ``xi``."""
    xi = np.asarray(xi, dtype=float) if not np.isscalar(xi) else float(xi)
    xi2 = np.multiply(xi, xi)
    den_b = 1.0 + spec.b * xi2
    den_d = 1.0 + spec.d * xi2
    om1 = (1.0 - spec.a * xi2) / den_b
    om2 = (1.0 - spec.c * xi2) / den_d
    # the product is >= 0 under C1/C2; clamp roundoff at the C2 common zero
    sigma = np.sqrt(np.maximum(om1 * om2, 0.0))
    alpha = xi2 / den_b
    epsilon = xi2 / den_d
    if spec.constraint == "C2":
        h_hat = np.sqrt(den_d / den_b)
    else:
        h_hat = np.sqrt(om1 / om2)
    return MultiplierValues(xi=xi, omega1=om1, omega2=om2, sigma=sigma,
                            alpha=alpha, epsilon=epsilon, h_hat=h_hat)


@dataclass(frozen=True)
class OrderProfile:
    """Asymptotic growth exponents of the multipliers as |xi| -> infinity."""

    order_sigma: int
    order_epsilon: int
    order_alpha: int
    order_h: int


def _indicator(r: float) -> int:
    return 1 if r != 0.0 else 0


def orders(spec: SystemSpec) -> OrderProfile:
    ia, ib, ic, id_ = (_indicator(v) for v in spec.coefficients)
    return OrderProfile(
        order_sigma=ia + ic - ib - id_,
        order_epsilon=2 - 2 * id_,
        order_alpha=2 - 2 * ib,
        order_h=ia + id_ - ic - ib,
    )


# Named presets.  bbm-bbm, bona-smith, kdv-kdv and classical-boussinesq carry
# their standard coefficients.  The kdv-bbm / bbm-kdv families are pinned only
# by their sign patterns (a<0 or c<0 with the complementary regularization);
# the values below are this package's documented defaults, chosen so the sum
# rule holds exactly.  bbm-kdv necessarily has c + d < 0 (theta_sq > 1) and is
# flagged unphysical but remains classifiable.
PRESETS: dict[str, tuple[float, float, float, float]] = {
    "bbm-bbm": (0.0, 1.0 / 6.0, 0.0, 1.0 / 6.0),
    "bona-smith": (0.0, 1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0),
    "kdv-kdv": (1.0 / 6.0, 0.0, 1.0 / 6.0, 0.0),
    "classical-boussinesq": (0.0, 0.0, 0.0, 1.0 / 3.0),
    "kdv-bbm": (-1.0 / 6.0, 0.0, 0.0, 0.5),
    "bbm-kdv": (0.0, 0.5, -1.0 / 6.0, 0.0),
}


def preset(name: str, diss=Dissipation.COMPLETE) -> SystemSpec:
    """Build a SystemSpec from a named preset."""
    try:
        coeffs = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: "
                       f"{', '.join(sorted(PRESETS))}") from None
    return make_spec(*coeffs, diss=diss)
