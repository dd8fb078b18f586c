"""Full-state Glauber dynamics for the mean-field Ising model.

The model lives on the complete graph with n vertices, uniform coupling J >= 0
and uniform external field H.  A configuration assigns +-1 to every vertex;
the Gibbs measure is

    pi(sigma) ~ exp( J * sum_{x<y} sigma_x sigma_y + H * sum_x sigma_x ),

with the pair sum over unordered pairs, each counted once.  That convention is
what makes the Gibbs measure reversible for the heat-bath transition rule used
here (an ordered-pair reading would rescale J by 2 and break detailed
balance); the flip-ratio identity pinning it down is exercised in the tests.

Everything in this module enumerates the full 2^n state space and therefore
serves as the brute-force oracle for the lumped magnetization chain.  Builds
are refused above ``N_MAX_FULL`` vertices rather than silently degraded.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

# Full-chain constructions hold a dense 2^n x 2^n matrix; 12 keeps that at
# 4096^2 doubles (~134 MB) which is the largest desk-scale size we accept.
N_MAX_FULL = 12


def logistic(a):
    """Numerically stable logistic 1/(1 + e^-a), elementwise.

    Evaluated as e^a/(1 + e^a) for negative arguments so that no exp ever
    overflows, whatever n*J the caller feeds in.
    """
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the mean-field model: vertex count n, coupling J, field H.

    J = 0 is admitted as a degenerate reference point (the chain becomes the
    lazy Ehrenfest urn with known spectrum).
    """

    n: int
    J: float
    H: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not np.isfinite(self.J) or self.J < 0:
            raise ValueError(f"J must be finite and >= 0, got {self.J!r}")
        if not np.isfinite(self.H):
            raise ValueError(f"H must be finite, got {self.H!r}")


@dataclass(frozen=True)
class SpinConfiguration:
    """One +-1 assignment to n vertices, identified with an integer index.

    Bit i of ``index`` is set exactly when spin i is +1, so index <-> spins is
    a bijection on [0, 2^n).
    """

    n: int
    index: int

    def __post_init__(self):
        if not 0 <= self.index < (1 << self.n):
            raise ValueError(f"index {self.index} out of range for n={self.n}")

    @classmethod
    def from_spins(cls, spins):
        spins = np.asarray(spins)
        if not np.all(np.abs(spins) == 1):
            raise ValueError("spins must be +-1")
        index = int(sum(1 << i for i, s in enumerate(spins) if s > 0))
        return cls(n=len(spins), index=index)

    @property
    def spins(self) -> np.ndarray:
        bits = (self.index >> np.arange(self.n)) & 1
        return 2 * bits - 1

    @property
    def plus_count(self) -> int:
        return bin(int(self.index)).count("1")


def all_plus_counts(n: int) -> np.ndarray:
    """Number of +1 spins for every configuration index 0..2^n-1."""
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    return bits.sum(axis=1)


@dataclass(frozen=True)
class Distribution:
    """A probability vector kept alongside its defining log-weights.

    Probabilities are exp(log_weights) normalized through log-sum-exp, so they
    stay strictly positive and sum to 1 for any finite parameters.
    """

    log_weights: np.ndarray
    probabilities: np.ndarray

    @classmethod
    def from_log_weights(cls, log_weights) -> "Distribution":
        lw = np.asarray(log_weights, dtype=float)
        p = np.exp(lw - logsumexp(lw))
        return cls(log_weights=lw, probabilities=p)

    def __len__(self) -> int:
        return len(self.probabilities)


def gibbs_log_weight(params: ModelParams, sigma: SpinConfiguration) -> float:
    """Unnormalized log Gibbs weight J*sum_{x<y} s_x s_y + H*sum_x s_x.

    With k spins up the pair sum collapses to ((2k-n)^2 - n)/2, which is exact
    integer arithmetic before the float multiplies; the global flip symmetry
    at H=0 therefore holds exactly in the log-weights.
    """
    n = params.n
    m = 2 * sigma.plus_count - n  # total magnetization, integer
    return params.J * ((m * m - n) / 2.0) + params.H * m


def log_weights_full(params: ModelParams) -> np.ndarray:
    """gibbs_log_weight for every index of the 2^n state space, vectorized."""
    n = params.n
    m = 2 * all_plus_counts(n) - n
    return params.J * ((m * m - n) / 2.0) + params.H * m


def full_transition_matrix(params: ModelParams, n_max_full: int = N_MAX_FULL) -> np.ndarray:
    """Dense 2^n x 2^n heat-bath transition matrix.

    A step picks a vertex x uniformly and resets its spin from the conditional
    Gibbs law given the others:

        P(sigma -> sigma^x) = (1/n) * logistic(2 s'_x (J * S_x + H)),

    with S_x the sum of the other spins and s'_x the flipped value; the
    diagonal absorbs the remaining mass.  Rows sum to 1 by construction and
    entries vanish whenever configurations differ in >= 2 coordinates.
    """
    n = params.n
    if n > n_max_full:
        raise ValueError(
            f"full chain for n={n} refused: exceeds n_max_full={n_max_full} "
            f"(2^n state space)")
    m = 1 << n
    idx = np.arange(m)
    bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    spins = 2 * bits - 1
    others = spins.sum(axis=1)[:, None] - spins  # S_x for every (sigma, x)
    p_flip = logistic(2.0 * (-spins) * (params.J * others + params.H)) / n
    P = np.zeros((m, m))
    cols = idx[:, None] ^ (1 << np.arange(n))[None, :]
    P[idx[:, None], cols] = p_flip
    P[idx, idx] = 1.0 - p_flip.sum(axis=1)
    return P


def stationary_full(params: ModelParams, n_max_full: int = N_MAX_FULL) -> Distribution:
    """Gibbs measure on the full 2^n state space."""
    if params.n > n_max_full:
        raise ValueError(
            f"stationary distribution for n={params.n} refused: exceeds "
            f"n_max_full={n_max_full}")
    return Distribution.from_log_weights(log_weights_full(params))


def check_detailed_balance(chain: np.ndarray, pi: Distribution) -> float:
    """Largest detailed-balance violation max_ij |pi_i P_ij - pi_j P_ji|.

    Returned on the probability scale; the caller compares against its own
    tolerance.  Zero exactly for a symmetric chain with uniform pi.
    """
    P = np.asarray(chain, dtype=float)
    p = pi.probabilities
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] != len(p):
        raise ValueError(
            f"dimension mismatch: chain {P.shape}, distribution {len(p)}")
    flux = p[:, None] * P
    return float(np.abs(flux - flux.T).max())
