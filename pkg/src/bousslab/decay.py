"""Discrete norms of field states and power-law fits ||v|| ~ C t^-r.

The estimator follows the sampled-ratio recipe: local exponents

    r_n = -log(||v||(t_n)/||v||(t_n-1)) / log(t_n/t_n-1)

are averaged over the last five samples to give r, and C is the mean of the
last five ||v||(t_n) t_n^r.  A plateau flag (relative spread of the last five
r_n below 5%) reports whether the sequence actually settled; an exponential
decay, for instance, never does.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import systems
from .systems import SystemSpec

FIT_WINDOW = 5
PLATEAU_RSD = 0.05

NORM_KEYS = ("l2_uv", "linf_uv", "h1_uv", "l2_etaw", "linf_sum")


class DegenerateSeriesError(ValueError):
    """Not enough usable (t > 0, norm > 0) records to fit."""


@dataclass(frozen=True)
class NormRecord:
    t: float
    l2_uv: float      # sqrt(||eta||^2 + ||u||^2), discrete L2 = sqrt(dx * sum)
    linf_uv: float    # max(||eta||_inf, ||u||_inf) on the grid
    h1_uv: float      # adds the first-derivative energy of both fields
    l2_etaw: float    # h_hat-weighted pair: sqrt(||eta||^2 + ||Hu||^2)
    linf_sum: float   # ||eta||_inf + ||u||_inf (companion convention)


def norms(state, spec: SystemSpec) -> NormRecord:
    """All recorded norms of one field state (duck-typed: grid/eta/u/u_hat)."""
    g = state.grid
    dx = g.dx
    eta, u = state.eta, state.u
    l2e2 = dx * float(np.sum(eta * eta))
    l2u2 = dx * float(np.sum(u * u))
    deta = np.fft.ifft(1j * g.xi_odd * state.eta_hat).real
    du = np.fft.ifft(1j * g.xi_odd * state.u_hat).real
    h1 = np.sqrt(l2e2 + l2u2 + dx * float(np.sum(deta * deta))
                 + dx * float(np.sum(du * du)))
    hu = np.fft.ifft(systems.multipliers(spec, g.xi).h_hat * state.u_hat).real
    l2w2 = dx * float(np.sum(hu * hu))
    eta_inf = float(np.abs(eta).max())
    u_inf = float(np.abs(u).max())
    return NormRecord(
        t=float(state.t),
        l2_uv=float(np.sqrt(l2e2 + l2u2)),
        linf_uv=max(eta_inf, u_inf),
        h1_uv=float(h1),
        l2_etaw=float(np.sqrt(l2e2 + l2w2)),
        linf_sum=eta_inf + u_inf,
    )


@dataclass
class NormSeries:
    """Sampled norms over a run, plus run-level diagnostics."""

    t: np.ndarray
    l2_uv: np.ndarray
    linf_uv: np.ndarray
    h1_uv: np.ndarray
    l2_etaw: np.ndarray
    linf_sum: np.ndarray
    boundary: np.ndarray
    boundary_max: float = 0.0
    imag_max: float = 0.0
    symmetry_max: float = 0.0

    @classmethod
    def from_records(cls, records, boundary_max=0.0, imag_max=0.0,
                     symmetry_max=0.0) -> "NormSeries":
        """records: iterable of (t, NormRecord, boundary_value)."""
        ts = np.array([r[0] for r in records], dtype=float)
        cols = {key: np.array([getattr(r[1], key) for r in records], dtype=float)
                for key in NORM_KEYS}
        boundary = np.array([r[2] for r in records], dtype=float)
        return cls(t=ts, boundary=boundary, boundary_max=boundary_max,
                   imag_max=imag_max, symmetry_max=symmetry_max, **cols)

    def column(self, which: str) -> np.ndarray:
        if which not in NORM_KEYS:
            raise KeyError(f"unknown norm {which!r}; expected one of {NORM_KEYS}")
        return getattr(self, which)

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class RateSequence:
    t: np.ndarray
    r: np.ndarray
    skipped: int


@dataclass(frozen=True)
class DecayFit:
    r: float
    C: float
    r_sequence: RateSequence
    window: int = FIT_WINDOW
    plateau: bool = field(default=False)


def rate_sequence(series: NormSeries, which: str = "l2_uv") -> RateSequence:
    """Local exponents r_n over consecutive usable samples.

    Records with t <= 0 or vanishing norm are skipped (counted in ``skipped``).
    """
    t = series.t
    v = series.column(which)
    usable = (t > 0.0) & (v > 0.0)
    tu, vu = t[usable], v[usable]
    if tu.size < 2:
        raise DegenerateSeriesError(
            f"need at least 2 usable records, have {tu.size}")
    r = -np.log(vu[1:] / vu[:-1]) / np.log(tu[1:] / tu[:-1])
    return RateSequence(t=tu[1:], r=r, skipped=int(np.count_nonzero(~usable)))


def fit(series: NormSeries, which: str = "l2_uv") -> DecayFit:
    """Power-law fit from the last FIT_WINDOW samples."""
    t = series.t
    v = series.column(which)
    usable = (t > 0.0) & (v > 0.0)
    tu, vu = t[usable], v[usable]
    if tu.size < FIT_WINDOW + 1:
        raise DegenerateSeriesError(
            f"need at least {FIT_WINDOW + 1} usable records, have {tu.size}")
    rs = rate_sequence(series, which)
    tail = rs.r[-FIT_WINDOW:]
    r = float(np.mean(tail))
    c = float(np.mean(vu[-FIT_WINDOW:] * tu[-FIT_WINDOW:] ** r))
    # converged means both small spread and small drift across the window;
    # spread alone would pass a steadily climbing exponent (e.g. exponential
    # decay, whose local exponent grows like t)
    spread_ok = abs(r) > 0.0 and float(np.std(tail)) / abs(r) < PLATEAU_RSD
    drift_ok = abs(r) > 0.0 and abs(tail[-1] - tail[0]) / abs(r) < PLATEAU_RSD
    return DecayFit(r=r, C=c, r_sequence=rs, window=FIT_WINDOW,
                    plateau=bool(spread_ok and drift_ok))
