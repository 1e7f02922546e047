"""Capacity-region bounds for the interference channel with a cognitive relay.

Gaussian closed forms and regime classification live in :mod:`ifccr.gaussian`,
finite-alphabet bound evaluation in :mod:`ifccr.discrete`, pentagon geometry
in :mod:`ifccr.geometry`.  Hot loops run in a compiled extension when it is
built; ``ifccr.BACKEND`` says which implementation is active.
"""
from ._backend import BACKEND
from .model import (
    BetaSplit,
    ChannelError,
    DiscreteChannel,
    GaussianChannel,
    Pentagon,
    ProductInputDistribution,
    RawGaussianChannel,
    Regime,
    RegimeLabel,
    RegionFamily,
    Th1Distribution,
    log_base,
    set_log_base,
    swap_roles,
)

__all__ = [
    "BACKEND",
    "BetaSplit",
    "ChannelError",
    "DiscreteChannel",
    "GaussianChannel",
    "Pentagon",
    "ProductInputDistribution",
    "RawGaussianChannel",
    "Regime",
    "RegimeLabel",
    "RegionFamily",
    "Th1Distribution",
    "log_base",
    "set_log_base",
    "swap_roles",
]
