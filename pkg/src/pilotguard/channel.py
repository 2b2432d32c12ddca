"""Joint channel statistics, sampling, and two-phase estimation.

The scenario has three N x N narrowband MIMO channels: H between the two
legitimate terminals (Alice and Bob), G1 between Alice and the adversary,
and G2 between Bob and the adversary. Reciprocity is taken literally: the
same matrix describes a link in both directions, with no transposition.

Channel estimation is not simulated symbol by symbol. Each training phase
yields the effective channel plus additive estimation noise of per-entry
power ``gamma``; pilot length and SNR fold into that single parameter.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, ParameterError
from .numerics import cholesky
from .rng import RngStream

__all__ = [
    "INDEPENDENT",
    "SCALAR_DIAGONAL",
    "ChannelStatistics",
    "ChannelSet",
    "EstimatePair",
    "build_joint_covariance",
    "sample_channel_set",
    "observe_estimates",
    "rho_no_attack",
    "rho_random_q",
    "sk_capacity",
]

INDEPENDENT = "independent"
SCALAR_DIAGONAL = "scalar-diagonal"
_MODES = (INDEPENDENT, SCALAR_DIAGONAL)


@dataclass(frozen=True)
class ChannelStatistics:
    """Parameters of the joint law of (H, G1, G2).

    ``zeta`` is the scalar correlation factor of scalar-diagonal mode: the
    cross-covariance between corresponding entries of H and either G is
    ``sigma_g2 * zeta``, and the G1/G2 cross-covariance is its square.
    ``gamma`` is the per-entry estimation-noise power.
    """

    n: int
    sigma_h2: float
    sigma_g2: float
    zeta: float = 0.0
    gamma: float = 0.0
    correlation: str = INDEPENDENT

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if self.sigma_h2 <= 0 or self.sigma_g2 <= 0:
            raise ParameterError("channel variances must be > 0")
        if self.zeta < 0:
            raise ParameterError(f"zeta must be >= 0, got {self.zeta}")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {self.gamma}")
        if self.correlation not in _MODES:
            raise ParameterError(
                f"correlation must be one of {_MODES}, got {self.correlation!r}"
            )


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the three channels."""

    h: np.ndarray
    g1: np.ndarray
    g2: np.ndarray

    def __post_init__(self):
        shapes = {m.shape for m in (self.h, self.g1, self.g2)}
        if len(shapes) != 1:
            raise ParameterError(f"channel matrices differ in shape: {shapes}")
        shape = self.h.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ParameterError(f"channels must be square, got {shape}")
        for name, m in (("h", self.h), ("g1", self.g1), ("g2", self.g2)):
            if not np.all(np.isfinite(m.view(float))):
                raise ParameterError(f"{name} has non-finite entries")

    @property
    def n(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class EstimatePair:
    """Alice's and Bob's channel estimates after the two training phases."""

    h_a: np.ndarray
    h_b: np.ndarray


def build_joint_covariance(stats: ChannelStatistics) -> np.ndarray:
    """Per-entry 3x3 covariance block of (h, g1, g2).

    In scalar-diagonal mode all cross-covariance matrices are multiples of
    the identity, so the full joint covariance of the vectorized channels
    is this block Kronecker the identity; sampling and estimation reduce to
    per-entry operations. The block is

        [[sh,  k,   k ],
         [k,   sg,  k^2],
         [k,   k^2, sg ]]    with k = sigma_g2 * zeta,

    which is verified positive semidefinite by Cholesky before use.
    """
    sh, sg = stats.sigma_h2, stats.sigma_g2
    if stats.correlation == INDEPENDENT:
        block = np.diag([sh, sg, sg]).astype(float)
    else:
        k = sg * stats.zeta
        block = np.array(
            [
                [sh, k, k],
                [k, sg, k * k],
                [k, k * k, sg],
            ]
        )
    try:
        cholesky(block)
    except NotPSDError as exc:
        raise NotPSDError(
            f"joint channel covariance is not PSD at zeta={stats.zeta} "
            f"(pivot {exc.pivot_index})",
            pivot_index=exc.pivot_index,
        ) from exc
    return block


def sample_channel_set(stats: ChannelStatistics, rng: RngStream) -> ChannelSet:
    """Draw (H, G1, G2) jointly from the per-entry covariance block.

    Entries are independent across matrix positions; each position mixes
    three unit circular Gaussians through the Cholesky factor of the block.
    """
    block = build_joint_covariance(stats)
    low = cholesky(block).real
    n = stats.n
    gen = rng.generator()
    re = gen.standard_normal((3, n, n))
    im = gen.standard_normal((3, n, n))
    z = (re + 1j * im) / np.sqrt(2.0)
    mixed = np.einsum("ab,bij->aij", low, z)
    return ChannelSet(h=mixed[0], g1=mixed[1], g2=mixed[2])


def observe_estimates(cset: ChannelSet, plan, gamma: float,
                      rng: RngStream) -> EstimatePair:
    """Run both training phases under an attack plan.

    Phase 1: Alice sends pilots, Bob estimates; the adversary's injection
    reaches Bob through G2 shaped by precoder ``plan.p1``. Phase 2 is the
    mirror image through G1 and ``plan.p2``. Estimation noise with
    per-entry power ``gamma`` is added to each estimate (Bob's noise is
    drawn first, matching the phase order).
    """
    if gamma < 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    n = cset.n
    for name, p in (("p1", plan.p1), ("p2", plan.p2)):
        if p is not None and p.shape != (n, n):
            raise ParameterError(
                f"precoder {name} has shape {p.shape}, expected {(n, n)}"
            )
    h_b = cset.h.copy()
    if plan.p1 is not None:
        h_b += cset.g2 @ plan.p1
    h_a = cset.h.copy()
    if plan.p2 is not None:
        h_a += cset.g1 @ plan.p2
    if gamma > 0:
        gen = rng.generator()
        scale = np.sqrt(gamma / 2.0)
        h_b += scale * (gen.standard_normal((n, n))
                        + 1j * gen.standard_normal((n, n)))
        h_a += scale * (gen.standard_normal((n, n))
                        + 1j * gen.standard_normal((n, n)))
    return EstimatePair(h_a=h_a, h_b=h_b)


def rho_no_attack(sigma_h2: float, gamma: float) -> float:
    """Correlation of the two estimates when the adversary stays silent."""
    if sigma_h2 <= 0:
        raise ParameterError(f"sigma_h2 must be > 0, got {sigma_h2}")
    if gamma < 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    return sigma_h2 / (sigma_h2 + gamma)


def rho_random_q(sigma_h2: float, sigma_q2: float, gamma: float) -> float:
    """Estimate correlation under a random common-injection attack.

    The injected perturbation adds power sigma_q2 that is common to both
    estimates, so the correlation exceeds the no-attack value whenever
    sigma_q2 > 0 and gamma > 0.
    """
    if sigma_h2 <= 0:
        raise ParameterError(f"sigma_h2 must be > 0, got {sigma_h2}")
    if sigma_q2 < 0 or gamma < 0:
        raise ParameterError("sigma_q2 and gamma must be >= 0")
    return (sigma_h2 + sigma_q2) / (sigma_h2 + sigma_q2 + gamma)


def sk_capacity(rho: float) -> float:
    """Secret-key capacity log2(1/(1 - rho^2)) in bits per observation."""
    if not 0.0 <= rho < 1.0:
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    return math.log2(1.0 / (1.0 - rho * rho))
