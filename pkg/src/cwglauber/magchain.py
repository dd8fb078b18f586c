"""The lumped magnetization chain and its coupling derivative.

Permutation symmetry of the mean-field model lets the 2^n Glauber chain be
lumped onto the number k of +1 spins.  The lumped chain is tridiagonal on
{0..n}:

    up_k   = P(k -> k+1) = ((n-k)/n) * 1/(1 + e^{(n-2k-1)2J - 2H})
    down_k = P(k -> k-1) = (k/n)     * 1/(1 + e^{-(n-2k+1)2J + 2H})

with the boundary convention P(0 -> -1) = P(n -> n+1) = 0.  It shares its
second-largest eigenvalue with the full chain, which is what makes it the
workhorse of every spectral computation here.

The derivative of the chain with respect to J is also tridiagonal and is
expressible through

    s_k = (k(n-2k+1)/n) * 1/(1 + cosh[(n-2k+1)2J - 2H]),

but the s-based form of the upper diagonal is valid only at H = 0: under the
reflection k -> n-k the cosh argument flips the sign of its J part and not of
its -2H part.  ``derivative_matrix`` therefore offers the closed-form
``analytic`` mode (correct for all H, finite-difference validated in tests)
and the ``s_form`` mode; at H = 0 they coincide bitwise.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .ising import Distribution, ModelParams, all_plus_counts, logistic


def inv_one_plus_cosh(x):
    """Stable 1/(1 + cosh x) = 2 e^{-|x|} / (1 + e^{-|x|})^2, elementwise."""
    e = np.exp(-np.abs(np.asarray(x, dtype=float)))
    return 2.0 * e / (1.0 + e) ** 2


@dataclass(frozen=True)
class ReducedChain:
    """Tridiagonal transition data on magnetization levels 0..n.

    up[k] = P(k -> k+1) for k = 0..n-1; down[k] = P(k+1 -> k) stored at slot
    k; diag has length n+1.  All up/down entries are strictly positive for
    finite parameters.
    """

    n: int
    up: np.ndarray
    down: np.ndarray
    diag: np.ndarray

    def as_dense(self) -> np.ndarray:
        P = np.diag(self.diag)
        P += np.diag(self.up, k=1)
        P += np.diag(self.down, k=-1)
        return P


@dataclass(frozen=True)
class DerivativeMatrix:
    """Entrywise d/dJ of the reduced chain; rows sum to zero."""

    n: int
    d_up: np.ndarray
    d_down: np.ndarray
    d_diag: np.ndarray
    mode: str

    def as_dense(self) -> np.ndarray:
        M = np.diag(self.d_diag)
        M += np.diag(self.d_up, k=1)
        M += np.diag(self.d_down, k=-1)
        return M

    def apply(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        out = self.d_diag * f
        out[:-1] += self.d_up * f[1:]
        out[1:] += self.d_down * f[:-1]
        return out


def build_reduced_chain(params: ModelParams) -> ReducedChain:
    """Magnetization chain entries from the closed-form heat-bath rates."""
    n, J, H = params.n, params.J, params.H
    k = np.arange(n + 1, dtype=float)
    ku = k[:-1]  # rows 0..n-1 have an up move
    kd = k[1:]   # rows 1..n have a down move
    up = ((n - ku) / n) * logistic(-((n - 2 * ku - 1) * 2 * J - 2 * H))
    down = (kd / n) * logistic((n - 2 * kd + 1) * 2 * J - 2 * H)
    up_full = np.concatenate([up, [0.0]])
    down_full = np.concatenate([[0.0], down])
    # 1 - (a + b) rather than 1 - a - b: IEEE addition commutes, so the
    # H -> -H mirror symmetry of the diagonal is exact to the last bit.
    diag = 1.0 - (up_full + down_full)
    return ReducedChain(n=n, up=up, down=down, diag=diag)


def reduced_stationary(params: ModelParams) -> Distribution:
    """Stationary law of the magnetization chain.

    pi_k ~ C(n,k) * exp(J (2k-n)^2 / 2 + H (2k-n)); the binomial factor counts
    the configurations lumped into level k.  Computed in log space.
    """
    n, J, H = params.n, params.J, params.H
    k = np.arange(n + 1, dtype=float)
    m = 2 * k - n
    lw = (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
          + J * m * m / 2.0 + H * m)
    return Distribution.from_log_weights(lw)


def s_values(params: ModelParams) -> np.ndarray:
    """The quantities s_k = (k(n-2k+1)/n) / (1 + cosh[(n-2k+1)2J - 2H]).

    s_0 = 0 for all parameters, and the sign of s_k equals the sign of
    n-2k+1: nonnegative for k <= (n+1)/2 and nonpositive for k >= (n+1)/2.
    """
    n, J, H = params.n, params.J, params.H
    k = np.arange(n + 1, dtype=float)
    return (k * (n - 2 * k + 1) / n) * inv_one_plus_cosh((n - 2 * k + 1) * 2 * J - 2 * H)


def derivative_matrix(params: ModelParams, mode: str = "analytic") -> DerivativeMatrix:
    """Tridiagonal d/dJ of the reduced chain.

    mode="analytic": direct closed-form differentiation of the chain entries,
        d_down[k] = s_k (always), d_up at row k =
        ((n-k)(2k-n+1)/n) / (1 + cosh[(n-2k-1)2J - 2H]).
    mode="s_form": the s-based entries d_up = s_{n-k}, d_down = s_k,
        d_diag = -s_k - s_{n-k}; agrees with analytic exactly when H = 0.

    The diagonal is assembled so every row sums to zero to rounding.
    """
    n, J, H = params.n, params.J, params.H
    s = s_values(params)
    d_down = s[1:]
    if mode == "analytic":
        ku = np.arange(n, dtype=float)
        d_up = (((n - ku) * (2 * ku - n + 1) / n)
                * inv_one_plus_cosh((n - 2 * ku - 1) * 2 * J - 2 * H))
    elif mode == "s_form":
        d_up = s[::-1][:n]  # s_{n-k} for k = 0..n-1
    else:
        raise ValueError(f"unknown derivative mode {mode!r}")
    up_full = np.concatenate([d_up, [0.0]])
    down_full = np.concatenate([[0.0], d_down])
    d_diag = -(up_full + down_full)
    return DerivativeMatrix(n=n, d_up=d_up, d_down=d_down, d_diag=d_diag, mode=mode)


def lump_vector(f_levels, n: int) -> np.ndarray:
    """Lift a level function (f_0..f_n) to the 2^n configuration space.

    Every configuration with k spins up receives f_levels[k]; this transports
    reduced-chain eigenvectors into the full space, where they remain
    eigenvectors of the full transition matrix.
    """
    f_levels = np.asarray(f_levels, dtype=float)
    if len(f_levels) != n + 1:
        raise ValueError(f"expected {n + 1} level values, got {len(f_levels)}")
    return f_levels[all_plus_counts(n)]
