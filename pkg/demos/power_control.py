"""How the three power-control policies split power, on a toy AP serving a
mix of strong and weak users.

Run: python3 demos/power_control.py
"""
import numpy as np

from cfmimo.allocation import associate, fpc, ppa, waterfill_level, wfpc

# One AP, five served users with very different channel qualities.
gamma = np.array([2.0e-9, 1.5e-9, 4.0e-10, 5.0e-11, 2.0e-12])  # mW scale
served = np.ones(5, bool)
sigma_z2 = 6.3e-10
budget = 200.0

# PPA hands out power proportionally to gamma, so the strongest user gets
# the lion's share no matter what.
p_ppa = ppa(gamma, served, budget)

# WFPC fills power up to a common water level nu over the per-user "noise"
# levels L = sigma^2/gamma; users whose L sits above the water get nothing.
p_wf = wfpc(gamma, served, sigma_z2, budget)
L = sigma_z2 / gamma
nu = waterfill_level(L, budget)

print(f"water level nu = {nu:.2f} mW")
print(" user   gamma      L (mW)    PPA (mW)  WFPC (mW)")
for k in range(5):
    print(f"  {k}   {gamma[k]:.2e}  {L[k]:9.2f}  {p_ppa[k]:9.2f}"
          f"  {p_wf[k]:9.2f}")
print(f"budget check: PPA {p_ppa.sum():.1f}, WFPC {p_wf.sum():.1f}")
# Note the two opposite behaviors: PPA is proportional all the way down,
# WFPC equalizes the users above water and drops the ones below.

# Uplink FPC: eta = min(P_max, P0 * zeta^-alpha) with zeta built from the
# channel traces over the serving set. Weak users transmit at full power,
# strong ones back off.
rng = np.random.default_rng(0)
trace_G = rng.uniform(1e-13, 1e-8, (6, 10))   # 6 users x 10 APs, tr(G)=beta*N
assoc = associate("UC", trace_G, 4)
eta_ul = fpc(trace_G, assoc.serving, 10 ** -3.5, 0.5, 100.0)
zeta = np.sqrt(np.sum((trace_G * assoc.serving) ** 2, axis=1))
print("\nFPC uplink powers:")
for k in range(6):
    print(f"  user {k}: zeta = {zeta[k]:.2e}  ->  eta = {eta_ul[k]:7.2f} mW")
