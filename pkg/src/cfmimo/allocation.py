"""User-AP association and power control.

Downlink policies (per AP, over its served users):
  PPA  - budget split proportionally to the estimated channel strengths gamma
  WFPC - waterfilling against noise levels L = sigma_z^2 / gamma

Uplink: fractional power control from the slow-fading statistics.
Powers here are actual transmit powers P (mW); the normalized coefficients
used by the SE formulas are eta_{k,a}^DL = P_{k,a} / gamma_{k,a}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass
class AssociationMap:
    """serving[k, a] is True when AP a serves user k. A_k are the rows,
    K_a the columns."""
    serving: np.ndarray

    def serving_aps(self, k):
        return np.nonzero(self.serving[k])[0]

    def served_users(self, a):
        return np.nonzero(self.serving[:, a])[0]


def associate(mode: str, beta, cluster_size=None) -> AssociationMap:
    """CF: every AP serves every user. UC: user k keeps its cluster_size
    APs with the largest slow-fading coefficients (ties to lower AP index).
    """
    beta = np.asarray(beta, dtype=float)
    n_users, n_aps = beta.shape
    if mode == "CF":
        return AssociationMap(np.ones((n_users, n_aps), dtype=bool))
    if mode != "UC":
        raise ConfigurationError(f"unknown association mode {mode!r}")
    if cluster_size is None or not 1 <= cluster_size <= n_aps:
        raise ConfigurationError("UC cluster size must be in [1, n_aps]")
    serving = np.zeros((n_users, n_aps), dtype=bool)
    # stable sort on -beta: equal coefficients keep ascending AP index
    order = np.argsort(-beta, axis=1, kind="stable")
    rows = np.repeat(np.arange(n_users), cluster_size)
    cols = order[:, :cluster_size].ravel()
    serving[rows, cols] = True
    return AssociationMap(serving)


def ppa(gamma_a, served, budget):
    """Proportional split of one AP's budget: P_k = budget * gamma_k / sum.

    gamma_a : (K,) gammas at this AP; served : (K,) bool. An AP whose
    served users all have gamma 0 transmits nothing.
    """
    gamma_a = np.asarray(gamma_a, dtype=float)
    if budget <= 0:
        raise ConfigurationError("DL budget must be positive")
    p = np.zeros_like(gamma_a)
    tot = gamma_a[served].sum()
    if tot > 0:
        p[served] = budget * gamma_a[served] / tot
    return p


def waterfill_level(levels, budget):
    """Water level nu with sum (nu - L)^+ = budget, by exact solution of
    the piecewise-linear equation on sorted levels."""
    L = np.sort(np.asarray(levels, dtype=float))
    n = len(L)
    csum = np.cumsum(L)
    # With m lowest levels active: nu = (budget + sum_{i<m} L_i) / m.
    # Pick the largest m for which nu still exceeds L_{m-1}.
    for m in range(n, 0, -1):
        nu = (budget + csum[m - 1]) / m
        if nu > L[m - 1]:
            return nu
    raise ConfigurationError("waterfilling needs a positive budget")


def wfpc(gamma_a, served, sigma_z2, budget):
    """Waterfilling over one AP's served users: P_k = (nu - sigma_z^2/gamma_k)^+
    with nu matching the budget exactly. Users with gamma 0 sit at infinite
    noise level and get nothing."""
    gamma_a = np.asarray(gamma_a, dtype=float)
    if budget <= 0:
        raise ConfigurationError("DL budget must be positive")
    p = np.zeros_like(gamma_a)
    active = served & (gamma_a > 0)
    if not np.any(active):
        return p
    L = sigma_z2 / gamma_a[active]
    nu = waterfill_level(L, budget)
    p[active] = np.maximum(nu - L, 0.0)
    return p


def dl_power_allocation(policy, gamma, assoc: AssociationMap, sigma_z2, budget):
    """Per-AP downlink powers P (K, A) under PPA or WFPC, plus the
    normalized coefficients eta_dl = P / gamma (zero where gamma is zero)."""
    gamma = np.asarray(gamma, dtype=float)
    n_users, n_aps = gamma.shape
    P = np.zeros((n_users, n_aps))
    for a in range(n_aps):
        served = assoc.serving[:, a]
        if not np.any(served):
            continue
        if policy == "PPA":
            P[:, a] = ppa(gamma[:, a], served, budget)
        elif policy == "WFPC":
            P[:, a] = wfpc(gamma[:, a], served, sigma_z2, budget)
        else:
            raise ConfigurationError(f"unknown DL policy {policy!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        eta_dl = np.where(gamma > 0, P / np.where(gamma > 0, gamma, 1.0), 0.0)
    return P, eta_dl


def fpc(trace_G, serving_mask, p0_mw, alpha, p_max):
    """Fractional uplink power control for every user:

        zeta_k = sqrt(sum_{a in A_k} tr^2(G_{k,a}))
        eta_k  = min(P_max, P0 * zeta_k^{-alpha})

    trace_G : (K, A) real traces of the channel covariances.
    """
    zeta = np.sqrt(np.einsum("ka,ka->k", serving_mask,
                             np.asarray(trace_G, dtype=float) ** 2))
    eta = np.full_like(zeta, float(p_max))
    ok = zeta > 0
    eta[ok] = np.minimum(p_max, p0_mw * zeta[ok] ** (-alpha))
    return eta


@dataclass
class PowerAllocation:
    """Downlink powers P (mW) with normalized eta_dl, and uplink powers."""
    dl_power: np.ndarray    # (K, A)
    eta_dl: np.ndarray      # (K, A)
    eta_ul: np.ndarray      # (K,)
