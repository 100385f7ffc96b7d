"""Scenario configuration and unit helpers.

All powers are kept in mW internally; dB/dBm quantities are converted at the
boundary (config ingestion) and never mixed into the linear-domain code paths.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

SPEED_OF_LIGHT = 299792458.0
THERMAL_NOISE_DBM_PER_HZ = -174.0


def db_to_lin(x_db):
    return 10.0 ** (x_db / 10.0)


def lin_to_db(x):
    import numpy as np
    return 10.0 * np.log10(x)


def dbm_to_mw(x_dbm):
    return 10.0 ** (x_dbm / 10.0)


def mw_to_dbm(x_mw):
    import numpy as np
    return 10.0 * np.log10(x_mw)


@dataclass
class SystemConfig:
    """All scenario constants for one simulation campaign.

    Defaults reproduce the reference urban scenario: 1 km^2 wrap-around
    square, 100 four-antenna APs, 48 ground users, 12 UAVs.
    """

    area_side: float = 1000.0            # m
    n_aps: int = 100
    n_gues: int = 48
    n_uavs: int = 12
    n_ap_antennas: int = 4
    antenna_spacing: float = 0.5         # carrier wavelengths
    ap_height: float = 15.0              # m
    gue_height: float = 1.65             # m
    uav_height_range: tuple = (22.5, 300.0)
    carrier_freq: float = 1.9e9          # Hz
    bandwidth: float = 20e6              # Hz
    tau_c: int = 200
    tau_p: int = 32
    noise_figure: float = 9.0            # dB
    train_power_per_sample: float = 100.0  # mW, per-sample training power
    dl_power_budget: float = 200.0       # mW per AP
    ul_max_power: float = 100.0          # mW
    fpc_p0: float = -35.0                # dBm
    fpc_alpha: float = 0.5
    association_mode: str = "CF"         # "CF" or "UC"
    uc_cluster_size: int = 10            # A_k, used only in UC mode
    dl_policy: str = "PPA"               # "PPA" or "WFPC"
    shadowing_std: float = 8.0           # dB; 0 disables shadowing
    rng_seed: int = 0

    # Three-slope path-loss breakpoints (m) for ground links.
    three_slope_d0: float = 10.0
    three_slope_d1: float = 50.0

    # Correlated-shadowing model: z = sqrt(delta)*a_ap + sqrt(1-delta)*b_user,
    # with a/b fields correlated as exp(-d/decorr).
    shadow_delta: float = 0.5
    shadow_decorr: float = 100.0         # m

    # Reproduce the printed pilot-gram formula (extra slow-fading factor)
    # instead of the derivation-consistent one. Off by default.
    beta_weighted_pilot_gram: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        from .errors import ConfigurationError

        if self.area_side <= 0:
            raise ConfigurationError("area_side must be positive")
        if self.n_aps <= 0 or self.n_ap_antennas <= 0:
            raise ConfigurationError("need at least one AP with one antenna")
        if self.n_gues < 0 or self.n_uavs < 0 or self.n_gues + self.n_uavs == 0:
            raise ConfigurationError("need at least one user")
        if self.tau_p < 1:
            raise ConfigurationError("tau_p must be >= 1")
        if not self.tau_p < self.tau_c:
            raise ConfigurationError("tau_p must be < tau_c")
        if (self.tau_c - self.tau_p) % 2 != 0:
            raise ConfigurationError(
                "tau_c - tau_p must be even (equal downlink/uplink split)")
        if self.uav_height_range[0] <= 0 or self.uav_height_range[1] < self.uav_height_range[0]:
            raise ConfigurationError("invalid uav_height_range")
        for name in ("carrier_freq", "bandwidth", "train_power_per_sample",
                     "dl_power_budget", "ul_max_power", "ap_height",
                     "gue_height", "antenna_spacing"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.association_mode not in ("CF", "UC"):
            raise ConfigurationError("association_mode must be 'CF' or 'UC'")
        if self.association_mode == "UC":
            if not 1 <= self.uc_cluster_size <= self.n_aps:
                raise ConfigurationError("uc_cluster_size must be in [1, n_aps]")
        if self.dl_policy not in ("PPA", "WFPC"):
            raise ConfigurationError("dl_policy must be 'PPA' or 'WFPC'")
        if self.shadowing_std < 0:
            raise ConfigurationError("shadowing_std must be >= 0")

    # -- derived quantities -------------------------------------------------

    @property
    def n_users(self):
        return self.n_gues + self.n_uavs

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def tau_d(self):
        return (self.tau_c - self.tau_p) // 2

    @property
    def tau_u(self):
        return (self.tau_c - self.tau_p) // 2

    @property
    def train_power(self):
        """Total training energy per user over the pilot phase (mW)."""
        return self.tau_p * self.train_power_per_sample

    @property
    def noise_power_mw(self):
        """Thermal noise power over the system bandwidth, incl. noise figure."""
        import numpy as np
        noise_dbm = (THERMAL_NOISE_DBM_PER_HZ
                     + 10.0 * np.log10(self.bandwidth)
                     + self.noise_figure)
        return float(dbm_to_mw(noise_dbm))

    @property
    def fpc_p0_mw(self):
        return float(dbm_to_mw(self.fpc_p0))

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        d = asdict(self)
        d["uav_height_range"] = list(self.uav_height_range)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        from .errors import ConfigurationError

        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if "uav_height_range" in data:
            data = dict(data)
            data["uav_height_range"] = tuple(data["uav_height_range"])
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "SystemConfig":
        from .errors import ConfigurationError

        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigurationError(f"malformed config file {path}: {e}")
        if not isinstance(data, dict):
            raise ConfigurationError("config file must contain a JSON object")
        return cls.from_dict(data)

    def to_json(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
