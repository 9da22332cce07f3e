"""Weber-Fechner QoE of a rendering-capacity allocation.

QoE is a sum over scene objects of a connection coefficient (attention times
downlink rate times one minus the uplink bit-error probability) multiplied by
the natural log of the object's rendered resolution in K units (1 K =
960x480). Capacities must exceed 1 K so every log term is positive.

The channel-to-link mapping is a deliberately simple convention (SISO-style
SINR with a min-antenna gain factor and a Gaussian-tail BER); the allocation
itself is provably invariant to the resulting per-user scale factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LinkParams:
    downlink_rate: float  # bits/second
    uplink_ber: float     # probability

    def __post_init__(self):
        if self.downlink_rate <= 0:
            raise ValueError("downlink_rate must be positive")
        if not (0.0 <= self.uplink_ber < 1.0):
            raise ValueError("uplink_ber must lie in [0, 1)")

    @property
    def factor(self) -> float:
        return self.downlink_rate * (1.0 - self.uplink_ber)


def dbw_to_watts(dbw: float) -> float:
    return 10.0 ** (dbw / 10.0)


@dataclass(frozen=True)
class ChannelConfig:
    """Simple downlink channel; defaults mirror a 6x7-antenna MIMO setup
    with 1 dBW total co-channel interference, 10 m range, and path loss
    exponent 2."""

    bandwidth: float = 10e6            # Hz
    tx_power: float = 1.0              # W
    distance: float = 10.0             # m
    path_loss_exponent: float = 2.0
    interference_power: float = dbw_to_watts(1.0)  # W, total over paths
    noise_psd: float = 3.98e-21        # W/Hz, thermal at ~ -174 dBm/Hz
    tx_antennas: int = 6
    rx_antennas: int = 7
    uplink_sinr: float | None = None   # defaults to the downlink SINR

    def __post_init__(self):
        positives = {
            "bandwidth": self.bandwidth, "tx_power": self.tx_power,
            "distance": self.distance, "interference_power": self.interference_power,
            "noise_psd": self.noise_psd,
        }
        for name, value in positives.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive")
        if self.path_loss_exponent < 1:
            raise ValueError("path_loss_exponent must be >= 1")
        if self.tx_antennas < 1 or self.rx_antennas < 1:
            raise ValueError("antenna counts must be >= 1")

    def sinr(self) -> float:
        received = (
            self.tx_power * self.distance ** (-self.path_loss_exponent)
            * min(self.tx_antennas, self.rx_antennas)
        )
        return received / (self.interference_power + self.noise_psd * self.bandwidth)


def q_function(x: float) -> float:
    """Standard Gaussian tail probability."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def link_from_channel(cfg: ChannelConfig) -> LinkParams:
    sinr = cfg.sinr()
    rate = cfg.bandwidth * math.log2(1.0 + sinr)
    uplink_sinr = cfg.uplink_sinr if cfg.uplink_sinr is not None else sinr
    ber = q_function(math.sqrt(2.0 * uplink_sinr))
    return LinkParams(downlink_rate=rate, uplink_ber=ber)


def connection_coefficient(attention: float, link: LinkParams) -> float:
    if attention <= 0:
        raise ValueError("attention must be positive")
    return attention * link.factor


@dataclass(frozen=True)
class QoETerms:
    weights: np.ndarray     # per-object attention values, positive
    capacities: np.ndarray  # per-object rendering capacity, K units, each > 1
    link: LinkParams

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        capacities = np.asarray(self.capacities, dtype=np.float64)
        if weights.shape != capacities.shape or weights.ndim != 1 or weights.size < 1:
            raise ValueError("weights and capacities must be equal-length 1-D vectors")
        if (weights <= 0).any():
            raise ValueError("attention weights must be positive")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "capacities", capacities)


def qoe(terms: QoETerms) -> float:
    """Sum over objects of connection coefficient times ln(capacity in K)."""
    if (terms.capacities <= 1.0).any():
        raise ValueError("every capacity must exceed 1 K for a positive log term")
    return float(terms.link.factor * np.sum(terms.weights * np.log(terms.capacities)))
