"""Channel-weight solvers: TEA, RCB, EISRCB, DAX-RCB and RLPB.

The ``*_batch`` functions operate on stacks of pixels along a leading axis
and are what the reconstruction loop calls; the single-pixel functions wrap
them so both paths share one arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ..errors import ConfigError, InfeasibleEpsilonError, InfeasibleError
from .types import BeamformParams, CovMatrix, DelayedStack, Method, Weights

COND_LIMIT = 1e12
LOADING = 1e-8
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 200
LP_FEASIBILITY_TOL = 1e-6
# dual simplex can stall on degenerate pixels; the cap is an iteration count,
# not a time, so the fallback choice is the same on every machine
SIMPLEX_MAX_ITER = 5000


def tea_weights(n: int) -> Weights:
    if n < 1:
        raise ConfigError(f"need at least one channel, got {n}")
    return Weights(np.full(n, 1.0 / n), Method.TEA)


def normalized_steering(params: BeamformParams, n: int) -> np.ndarray:
    """Assumed steering vector rescaled to ``||a||^2 = n``."""
    a = params.steering_vector(n)
    norm = np.linalg.norm(a)
    if norm == 0:
        return a
    return a * (math.sqrt(n) / norm)


@dataclass(frozen=True, eq=False)
class EigenRCB:
    """RCB solution of a batch of pixels, kept in eigen-coordinates.

    Attributes:
        U: Eigenvectors ``(B, N, N)``, ascending eigenvalue order.
        gamma: Eigenvalues of the covariance (unloaded, clipped at 0).
        coords: RCB weights expressed in the eigenbasis, ``w = U @ coords``.
        a_hat: Optimal steering vector before rescaling, ``(B, N)``.
        lam: Lagrange multipliers ``(B,)``.
        zero: Pixels whose covariance vanished (uniform weights, zero power).
    """

    U: np.ndarray
    gamma: np.ndarray
    coords: np.ndarray
    a_hat: np.ndarray
    lam: np.ndarray
    zero: np.ndarray

    @property
    def w(self) -> np.ndarray:
        return np.einsum("bij,bj->bi", self.U, self.coords)

    def power(self, mask=None) -> np.ndarray:
        """``w^T R w`` for the (optionally subspace-projected) weights."""
        c2 = self.coords * self.coords
        if mask is not None:
            c2 = c2 * mask
        return np.sum(self.gamma * c2, axis=-1)


def solve_multiplier(z2, gamma, eps, n_norm2):
    """Safeguarded Newton on ``sum z^2 / (1 + lam gamma)^2 = eps``.

    Args:
        z2: Squared steering components in the eigenbasis ``(B, N)``.
        gamma: Positive eigenvalues ``(B, N)``.
        eps: Uncertainty radius (squared).
        n_norm2: ``||a||^2``.

    Returns:
        Multipliers ``(B,)``; each pixel iterates independently.
    """
    root = math.sqrt(n_norm2 / eps) - 1.0
    lo = root / gamma[:, -1]
    hi = root / gamma[:, 0]
    lam = lo.copy()
    active = np.ones(lam.shape, dtype=bool)
    for _ in range(NEWTON_MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        l = lam[idx][:, None]
        g = gamma[idx]
        q = 1.0 / (1.0 + l * g)
        f = np.sum(z2[idx] * q * q, axis=-1) - eps
        fp = -2.0 * np.sum(z2[idx] * g * q * q * q, axis=-1)
        # f is convex and decreasing: f > 0 means the root lies to the right
        pos = f > 0
        lo[idx] = np.where(pos, lam[idx], lo[idx])
        hi[idx] = np.where(pos, hi[idx], lam[idx])
        done = np.abs(f) <= NEWTON_TOL * eps
        step = np.where(fp < 0, lam[idx] - f / np.where(fp < 0, fp, -1.0), np.nan)
        inside = (step > lo[idx]) & (step < hi[idx])
        nxt = np.where(inside, step, 0.5 * (lo[idx] + hi[idx]))
        lam[idx] = np.where(done, lam[idx], nxt)
        active[idx] = ~done
    return lam


def rcb_batch(R, abar, eps) -> EigenRCB:
    """Robust Capon weights for a batch of covariances ``(B, N, N)``."""
    n_norm2 = float(abar @ abar)
    n = abar.size
    if not 0 < eps < n_norm2:
        raise InfeasibleEpsilonError(f"eps={eps} must lie in (0, ||a||^2={n_norm2:g})")
    gamma_raw, U = np.linalg.eigh(R)
    top = gamma_raw[:, -1]
    zero = ~(top > 0)
    gamma = gamma_raw.copy()
    # Adding a multiple of I shifts eigenvalues and keeps eigenvectors.
    ill = (~zero) & (gamma[:, 0] * COND_LIMIT < top)
    if np.any(ill):
        trace = np.trace(R, axis1=1, axis2=2)
        gamma[ill] += (LOADING * trace[ill] / n)[:, None]
    gamma[zero] = 1.0
    z = np.einsum("bji,j->bi", U, abar)
    z2 = z * z
    lam = solve_multiplier(z2, gamma, eps, n_norm2)
    lg = lam[:, None] * gamma
    p = z * lg / (1.0 + lg)
    q = z * lam[:, None] / (1.0 + lg)
    denom = np.sum(p * q, axis=-1)
    scale = np.sqrt(n) / np.linalg.norm(p, axis=-1)
    coords = q / (denom * scale)[:, None]
    if np.any(zero):
        coords[zero] = z[zero] / n_norm2
        p[zero] = z[zero]
    a_hat = np.einsum("bij,bj->bi", U, p)
    return EigenRCB(U, np.clip(gamma_raw, 0.0, None), coords, a_hat, lam, zero)


def eisrcb_mask(sol: EigenRCB, delta: float) -> np.ndarray:
    """Signal-subspace indicator: eigenvalues at least ``delta`` times the largest."""
    return (sol.gamma >= delta * sol.gamma[:, -1:]).astype(np.float64)


def eisrcb_project(w, U, mask) -> np.ndarray:
    """``U_s U_s^T w`` for each pixel, the subspace given by a 0/1 ``mask``."""
    inner = np.einsum("bji,bj->bi", U, w) * mask
    return np.einsum("bij,bj->bi", U, inner)


@dataclass(frozen=True, eq=False)
class RCBSolution:
    weights: Weights
    a_hat: np.ndarray
    lam: float


def rcb_solve(cov: CovMatrix, params: BeamformParams) -> RCBSolution:
    """Robust Capon beamformer with its optimal steering vector and multiplier."""
    n = cov.R.shape[0]
    abar = normalized_steering(params, n)
    sol = rcb_batch(cov.R[None], abar, params.eps)
    return RCBSolution(Weights(sol.w[0], Method.RCB), sol.a_hat[0], float(sol.lam[0]))


def rcb_weights(cov: CovMatrix, params: BeamformParams) -> Weights:
    return rcb_solve(cov, params).weights


def eisrcb_weights(cov: CovMatrix, w_rcb: Weights, params: BeamformParams) -> Weights:
    """Project RCB weights onto the dominant eigen-subspace of ``R``."""
    R = cov.R
    gamma, U = np.linalg.eigh(R)
    keep = gamma >= params.delta * gamma[-1]
    w = np.asarray(w_rcb.w, dtype=np.float64)
    if np.all(keep):
        return Weights(w.copy(), Method.EISRCB)
    Us = U[:, keep]
    return Weights(Us @ (Us.T @ w), Method.EISRCB)


def correlation_coefficient(x, y, floor: float) -> float:
    """Pearson correlation of two sequences, clamped to ``[floor, 1]``."""
    x = np.asarray(x, dtype=np.float64) - np.mean(x)
    y = np.asarray(y, dtype=np.float64) - np.mean(y)
    dx, dy = float(x @ x), float(y @ y)
    if dx == 0 or dy == 0:
        return floor
    return float(np.clip((x @ y) / math.sqrt(dx * dy), floor, 1.0))


def split_apertures(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Complementary alternating apodizations (even and odd elements)."""
    idx = np.arange(n)
    return idx[0::2], idx[1::2]


def dax_batch(R, sums, n_window, dt, abar, params: BeamformParams) -> np.ndarray:
    """Clamped correlation between the two sub-aperture RCB beams.

    Works from the covariance and per-channel sums alone, so samples beyond
    the stored stack count as zeros of the full ``n_window``-sample window.
    """
    even, odd = split_apertures(abar.size)
    n_norm2 = float(abar @ abar)
    beams = []
    for idx in (even, odd):
        sub = abar[idx]
        eps = params.eps * float(sub @ sub) / n_norm2
        beams.append((idx, rcb_batch(R[:, idx][:, :, idx], sub, eps).w))
    (ie, w1), (io, w2) = beams
    inv = 1.0 / (dt * n_window)
    m1 = np.einsum("bi,bi->b", w1, sums[:, ie]) / n_window
    m2 = np.einsum("bi,bi->b", w2, sums[:, io]) / n_window

    def cov(ia, wa, ib, wb, ma, mb):
        block = R[:, ia][:, :, ib]
        return np.einsum("bi,bij,bj->b", wa, block, wb) * inv - ma * mb

    c12 = cov(ie, w1, io, w2, m1, m2)
    d1 = cov(ie, w1, ie, w1, m1, m1)
    d2 = cov(io, w2, io, w2, m2, m2)
    ok = (d1 > 0) & (d2 > 0)
    rho = np.where(ok, c12 / np.sqrt(np.where(ok, d1 * d2, 1.0)), params.dax_floor)
    return np.clip(rho, params.dax_floor, 1.0)


def dax_factor(stack: DelayedStack, params: BeamformParams) -> float:
    """Coherence factor of the two complementary sub-aperture RCB beams."""
    s = stack.s
    n = s.shape[0]
    R = stack.dt * (s @ s.T)
    out = dax_batch(R[None], s.sum(axis=1)[None], s.shape[1], stack.dt,
                    normalized_steering(params, n), params)
    return float(out[0])


def snapshot_step(n_window: int, max_snapshots: int) -> int:
    return max(1, -(-n_window // max_snapshots))


def _distinct_rows(St) -> np.ndarray:
    """Nonzero rows of ``St`` up to sign, each kept once.

    The LP bounds ``|s^T w|``, so zero snapshots and repeats of ``+-s`` add
    no constraint; left in, they make HiGHS return infeasible points.
    """
    St = St[np.any(St != 0, axis=1)]
    if not St.size:
        return St
    lead = St[np.arange(St.shape[0]), np.argmax(St != 0, axis=1)]
    return np.unique(St * np.sign(lead)[:, None], axis=0)


def rlpb_solve(S, abar, tau) -> tuple[np.ndarray, float]:
    """``min ||S^T w||_inf  s.t.  abar^T w - tau ||w||_inf >= 1``.

    Args:
        S: Snapshots as columns ``(N, K)``.
        abar: Assumed steering vector.
        tau: Weight-norm penalty.

    Returns:
        Weights and the LP objective value.
    """
    S = np.asarray(S, dtype=np.float64)
    n, k = S.shape
    peak = float(np.max(np.abs(S))) if S.size else 0.0
    St = _distinct_rows(S.T / peak if peak > 0 else S.T)
    k = St.shape[0]
    eye = np.eye(n)
    col = lambda v: np.full((v, 1), -1.0)  # noqa: E731
    zk, zn = np.zeros((k, 1)), np.zeros((n, 1))
    A = np.block(
        [
            [St, col(k), zk],
            [-St, col(k), zk],
            [eye, zn, col(n)],
            [-eye, zn, col(n)],
            [-abar[None, :], np.zeros((1, 1)), np.full((1, 1), tau)],
        ]
    )
    b = np.zeros(A.shape[0])
    b[-1] = -1.0
    cost = np.zeros(n + 2)
    cost[n] = 1.0
    bounds = [(None, None)] * n + [(0, None), (0, None)]
    res = linprog(cost, A_ub=A, b_ub=b, bounds=bounds, method="highs-ds",
                  options={"maxiter": SIMPLEX_MAX_ITER})
    if res.status in (1, 4):
        # iteration cap or numerical trouble in simplex: interior point copes
        # with the rank-deficient snapshot sets that cause both
        res = linprog(cost, A_ub=A, b_ub=b, bounds=bounds, method="highs-ipm")
    if res.status == 2:
        raise InfeasibleError("steering constraint cannot be satisfied")
    if res.status != 0:
        raise InfeasibleError(f"linear program failed: {res.message}")
    w = res.x[:n]
    margin = float(abar @ w - tau * np.max(np.abs(w)))
    if 0.0 < margin < 1.0:
        # the constraint is positively homogeneous in w, so rescaling removes
        # the solver's tolerance-level shortfall and scales the objective alike
        w = w / margin
        margin = float(abar @ w - tau * np.max(np.abs(w)))
    if margin < 1.0 - LP_FEASIBILITY_TOL:
        raise InfeasibleError(f"LP solution violates the steering constraint (margin 1 - {1.0 - margin:.3e})")
    return w, float(np.max(np.abs(S.T @ w))) if k else 0.0


def rlpb_snapshots(s, n_window: int, max_snapshots: int) -> np.ndarray:
    """Uniformly decimated snapshot columns of a (possibly trimmed) stack."""
    return s[:, :: snapshot_step(n_window, max_snapshots)]


def rlpb_weights(stack: DelayedStack, params: BeamformParams) -> Weights:
    n = stack.n_channels
    abar = normalized_steering(params, n)
    if not np.any(abar):
        raise InfeasibleError("steering vector is zero")
    S = rlpb_snapshots(stack.s, stack.s.shape[1], params.rlpb_max_snapshots)
    w, _ = rlpb_solve(S, abar, params.tau)
    return Weights(w, Method.RLPB)
