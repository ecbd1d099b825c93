"""Category coding: compact minimal-collision codes for huge categorical ID spaces."""

from .codes import (
    Codebook,
    RHotVector,
    SiteTuple,
    build_coo,
    build_ecoc,
    build_gauss_cc,
    build_polynomial_cc,
    build_remainder_cc,
    build_rmp,
    encode,
    encode_many,
    theoretical_min_collision,
    to_rhot,
    with_anti,
)
from .gauss_arith import GaussInt
from .presets import build_preset, preset_names

__version__ = "0.1.0"
