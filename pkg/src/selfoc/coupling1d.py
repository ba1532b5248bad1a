"""Planar (1D) mode-connection coefficients between two quadratic channels.

Two independent routes to every amplitude <n|n'>:

* ``overlap_closed`` -- prefactor times a scaled two-index Hermite table
  entry (closed form);
* ``overlap_quad``   -- Gauss-Hermite quadrature of the product of the
  two eigenfunctions after completing the square of the combined
  Gaussian (the oracle).

Spectra, the coupling matrix, and the semiclassical vertical-transition
estimate build on the closed-form route.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PartialSpectrumError
from .hermite import (
    MODE_INDEX_CAP,
    OscillatorFrame,
    _TableBuilder,
    build_kernel,
    check_mode_index,
    hermite_scaled,
)
from .quadrature import gauss_hermite, integrate


@dataclass(frozen=True)
class Transition1D:
    """A fixed initial mode crossing from one channel into another.

    The source is conventionally the reference frame; displacement is
    ``target.center - source.center``.
    """

    source: OscillatorFrame
    target: OscillatorFrame
    n: int

    def __post_init__(self):
        check_mode_index(self.n)

    @property
    def d(self) -> float:
        return self.target.center - self.source.center


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Transition amplitudes/probabilities over final mode indices.

    Entries run over n' = 0..cutoff in order; ``probability`` is the
    square of ``amplitude`` elementwise and ``captured_mass`` their sum.
    """

    n_prime: np.ndarray
    amplitude: np.ndarray
    probability: np.ndarray
    captured_mass: float
    cutoff: int
    epsilon: float

    def __post_init__(self):
        self.n_prime.setflags(write=False)
        self.amplitude.setflags(write=False)
        self.probability.setflags(write=False)

    def __len__(self) -> int:
        return len(self.n_prime)

    @property
    def argmax(self) -> int:
        """Most probable final index (smallest index wins ties)."""
        return int(np.argmax(self.probability))


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Amplitudes <n|n'> for initial modes 0..n_max, final 0..n_prime_max."""

    values: np.ndarray
    gram_defect: float

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n_max(self) -> int:
        return self.values.shape[0] - 1

    @property
    def n_prime_max(self) -> int:
        return self.values.shape[1] - 1


def overlap_closed(t: Transition1D, n_prime: int) -> float:
    """Closed-form amplitude <n|n'> for the transition."""
    n_prime = check_mode_index(n_prime, "n_prime")
    kernel = build_kernel(t.source, t.target)
    builder = _TableBuilder(kernel._dd_coeffs(), t.n)
    builder.extend(n_prime)
    return float(kernel.prefactor * builder.row(t.n)[n_prime])


def quad_order_for(n: int, n_prime: int) -> int:
    """Oracle node count: the integrand is a degree-(n+n') polynomial
    times a standard Gaussian after the change of variables, so
    ceil((n+n')/2) nodes are exact; +8 is margin for the substitution."""
    return (n + n_prime + 1) // 2 + 8


def overlap_quad(t: Transition1D, n_prime: int) -> float:
    """Quadrature amplitude <n|n'>: the independent oracle route.

    Completes the square of the product Gaussian (center
    ``d l^2/(l^2+l'^2)`` past the source center, sigma
    ``l l'/sqrt(l^2+l'^2)``) and integrates the remaining polynomial
    against the rule's own Gaussian weight.
    """
    n_prime = check_mode_index(n_prime, "n_prime")
    l = t.source.omega ** -0.5
    lp = t.target.omega ** -0.5
    big_l = l * l + lp * lp
    d = t.d
    shift = t.source.center + d * l * l / big_l
    scale = math.sqrt(2.0) * l * lp / math.sqrt(big_l)
    const = (
        math.pi ** -0.5
        * (l * lp) ** -0.5
        * math.exp(-d * d / (2.0 * big_l))
    )
    rule = gauss_hermite(quad_order_for(t.n, n_prime))

    def poly_part(x):
        xi_s = (x - t.source.center) / l
        xi_t = (x - t.target.center) / lp
        return const * hermite_scaled(t.n, xi_s) * hermite_scaled(n_prime, xi_t)

    return integrate(rule, poly_part, shift=shift, scale=scale)


def spectrum1d(t: Transition1D, epsilon: float = 1e-8, cap: int = MODE_INDEX_CAP) -> Spectrum:
    """Transition probabilities P_n^{n'} until the captured mass reaches
    1 - epsilon.

    One table pass: the final-index cutoff is grown in blocks and the
    closed-form row is reused, never recomputed per n'.

    Raises
    ------
    PartialSpectrumError
        The cap was hit first; the partial spectrum rides on the error.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    cap = check_mode_index(cap, "cap")
    kernel = build_kernel(t.source, t.target)
    builder = _TableBuilder(kernel._dd_coeffs(), t.n)
    target_mass = 1.0 - epsilon

    chunk = 64
    while True:
        m_new = min(builder.m + chunk, cap)
        builder.extend(m_new)
        amplitude = kernel.prefactor * builder.row(t.n)
        cumulative = np.cumsum(amplitude * amplitude)
        hit = int(np.searchsorted(cumulative, target_mass))
        if hit < len(cumulative):
            cutoff = hit
            break
        if m_new == cap:
            probability = amplitude * amplitude
            partial = Spectrum(
                n_prime=np.arange(cap + 1),
                amplitude=amplitude,
                probability=probability,
                captured_mass=float(cumulative[-1]),
                cutoff=cap,
                epsilon=epsilon,
            )
            raise PartialSpectrumError(
                f"captured mass {cumulative[-1]:.12g} < {target_mass:.12g} "
                f"at the hard cap {cap}",
                spectrum=partial,
            )
        chunk = min(2 * chunk, 1024)

    amplitude = amplitude[: cutoff + 1]
    probability = amplitude * amplitude
    return Spectrum(
        n_prime=np.arange(cutoff + 1),
        amplitude=amplitude,
        probability=probability,
        captured_mass=float(cumulative[cutoff]),
        cutoff=cutoff,
        epsilon=epsilon,
    )


def coupling_matrix(
    source: OscillatorFrame,
    target: OscillatorFrame,
    n_max: int,
    n_prime_max: int,
) -> CouplingMatrix:
    """All amplitudes for initial modes 0..n_max into final 0..n_prime_max.

    Cut from a single table; the reported Gram defect
    ``max |V V^T - I|`` measures how much final-mode completeness is lost
    to the n' truncation.
    """
    n_max = check_mode_index(n_max, "n_max")
    n_prime_max = check_mode_index(n_prime_max, "n_prime_max")
    if n_max > n_prime_max:
        warnings.warn(
            f"n_max={n_max} > n_prime_max={n_prime_max}: rows will be badly "
            "truncated and the Gram defect large",
            RuntimeWarning,
            stacklevel=2,
        )
    kernel = build_kernel(source, target)
    builder = _TableBuilder(kernel._dd_coeffs(), n_max)
    builder.extend(n_prime_max)
    values = kernel.prefactor * builder.table()
    gram = values @ values.T
    defect = float(np.abs(gram - np.eye(n_max + 1)).max())
    return CouplingMatrix(values=values, gram_defect=defect)


def fc_candidates(t: Transition1D) -> dict:
    """Vertical-transition candidates for the semiclassical estimate.

    For n = 0 the transition point is the density maximum (the source
    center); for excited modes the two classical turning points are the
    candidates and the one nearer the target center is used.
    """
    w, wp = t.source.omega, t.target.omega

    def level(x_star: float) -> int:
        u = 0.5 * wp * wp * (x_star - t.target.center) ** 2
        value = u / wp - 0.5
        return max(0, math.floor(value + 0.5))  # half-integers round up

    if t.n == 0:
        x_near = x_far = t.source.center
    else:
        turn = math.sqrt((2.0 * t.n + 1.0) / w)
        lo, hi = t.source.center - turn, t.source.center + turn
        if abs(hi - t.target.center) <= abs(lo - t.target.center):
            x_near, x_far = hi, lo
        else:
            x_near, x_far = lo, hi
    return {
        "near": level(x_near),
        "far": level(x_far),
        "x_near": x_near,
        "x_far": x_far,
    }


def fc_estimate(t: Transition1D) -> int:
    """Semiclassical estimate of the most probable final mode index.

    Vertical transition at the near-side point: the final potential energy
    there is matched to the final ladder E' = omega' (n' + 1/2).
    """
    return fc_candidates(t)["near"]
