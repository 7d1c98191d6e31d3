"""Equilibria of speculation in procurement auctions."""

from ._core import (
    AuctionEnv,
    ConfigError,
    NumericalError,
    Tolerances,
    ValueDistribution,
    ext,
    fpa,
    simulate,
    spa,
)

__all__ = [
    "AuctionEnv",
    "ConfigError",
    "NumericalError",
    "Tolerances",
    "ValueDistribution",
    "ext",
    "fpa",
    "simulate",
    "spa",
]
