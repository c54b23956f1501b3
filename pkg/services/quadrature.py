"""Quadrature service: single entry point around scipy.integrate.quad.

Rules enforced here:
- Every call runs with ``full_output`` so scipy never emits warnings.
- A non-converged segment is accepted when its error estimate stays within
  100× the requested budget; otherwise QuadratureError is raised.
- Integrals along the shifted line Im κ = m are folded onto [0, ∞) with the
  strip symmetry g(−k + im)* = g(k + im).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from physics.errors import ConfigError, QuadratureError

log = logging.getLogger(__name__)

BUDGET_SLACK = 100.0


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    k_max: float | None = None
    max_refinements: int = 500

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0):
            raise ConfigError(f"rel_tol must be positive, got {self.rel_tol}")
        if not (self.abs_tol > 0):
            raise ConfigError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.k_max is not None and not (self.k_max > 0):
            raise ConfigError(f"k_max must be positive, got {self.k_max}")
        if self.max_refinements < 1:
            raise ConfigError("max_refinements must be at least 1")

    def resolve_k_max(self, default: float) -> float:
        return self.k_max if self.k_max is not None else default


@dataclass(frozen=True)
class QuadResult:
    """Outcome of a folded line integral.

    value: real value of the full-line integral
    error: summed scipy error estimates
    imag_residual: integral of the imaginary parts that the folding cancels
    """

    value: float
    error: float
    imag_residual: float = 0.0


def integrate_segment(
    func: Callable[[float], float],
    a: float,
    b: float,
    quad: QuadratureConfig,
    scale: float = 0.0,
    weight: str | None = None,
    wvar: float | None = None,
) -> tuple[float, float]:
    """Integrate *func* over [a, b] (b may be +inf) and police the error budget.

    Returns (value, abserr).
    """
    kwargs = {}
    if weight is not None:
        kwargs = {"weight": weight, "wvar": wvar}
    res = integrate.quad(
        func, a, b,
        epsabs=quad.abs_tol, epsrel=quad.rel_tol,
        limit=quad.max_refinements, full_output=1, **kwargs,
    )
    value, err = float(res[0]), float(res[1])
    if not math.isfinite(value):
        raise QuadratureError(f"non-finite integral on [{a}, {b}]")
    if len(res) > 3:
        budget = BUDGET_SLACK * max(quad.abs_tol, quad.rel_tol * max(abs(value), scale))
        if err > budget:
            raise QuadratureError(
                f"tolerance not reached on [{a}, {b}] (err={err:.3e} > {budget:.3e}): {res[3]}"
            )
        log.debug("quad on [%g, %g] flagged but within budget: %s", a, b, res[3])
    return value, err


def oscillatory_segment(
    re_part: Callable[[float], float],
    im_part: Callable[[float], float] | None,
    a: float,
    b: float,
    length: float,
    quad: QuadratureConfig,
    scale: float = 0.0,
) -> tuple[float, float]:
    """∫_a^b [re(k)·cos(kL) − im(k)·sin(kL)] dk, using scipy's Fourier weights."""
    if length == 0.0:
        return integrate_segment(re_part, a, b, quad, scale)
    v_cos, e_cos = integrate_segment(re_part, a, b, quad, scale, weight="cos", wvar=length)
    if im_part is None:
        return v_cos, e_cos
    v_sin, e_sin = integrate_segment(im_part, a, b, quad, scale, weight="sin", wvar=length)
    return v_cos - v_sin, e_cos + e_sin


def shifted_line_integral(
    g: Callable[[float], complex],
    length: float,
    k_c: float,
    k_max: float,
    quad: QuadratureConfig,
    scale: float = 0.0,
) -> QuadResult:
    """∫_ℝ g(k) e^{ikL} dk for a kernel evaluated on the line κ = k + im.

    g(k) has an integrable k^{-1/2} (or milder) singularity at k = 0, removed
    by k = t² on [0, k_c]. Beyond k_c the integral is split at k_max into a
    finite oscillatory piece and a semi-infinite Fourier tail.
    """
    if not (0.0 < k_c < k_max):
        raise QuadratureError(f"need 0 < k_c < k_max, got k_c={k_c}, k_max={k_max}")

    def head(t: float) -> float:
        k = t * t
        return 2.0 * t * (g(k) * complex(math.cos(k * length), math.sin(k * length))).real

    def head_imag(t: float) -> float:
        k = t * t
        phase = complex(math.cos(k * length), math.sin(k * length))
        return 2.0 * t * ((g(k) * phase).imag + (g(-k) * phase.conjugate()).imag)

    def re_g(k: float) -> float:
        return g(k).real

    def im_g(k: float) -> float:
        return g(k).imag

    root = math.sqrt(k_c)
    v_head, e_head = integrate_segment(head, 0.0, root, quad, scale)
    v_mid, e_mid = oscillatory_segment(re_g, im_g, k_c, k_max, length, quad, scale)
    v_tail, e_tail = oscillatory_segment(re_g, im_g, k_max, np.inf, length, quad, scale)
    def mid_imag(k: float) -> float:
        phase = complex(math.cos(k * length), math.sin(k * length))
        return (g(k) * phase).imag + (g(-k) * phase.conjugate()).imag

    imag_head, _ = integrate_segment(head_imag, 0.0, root, quad, scale)
    imag_mid, _ = integrate_segment(mid_imag, k_c, k_max, quad, scale)
    imag = imag_head + imag_mid

    value = 2.0 * (v_head + v_mid + v_tail)
    error = 2.0 * (e_head + e_mid + e_tail)
    return QuadResult(value=value, error=error, imag_residual=abs(imag))
