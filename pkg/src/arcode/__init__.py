"""Arithmetic coding: exact reference coder, fixed-precision integer engine,
adaptive models, decoder search strategies and a small container format."""

from .coder import CoderConfig, Decoder, Encoder
from .container import compress, decompress
from .exact import Interval, encode_sequence, select_code_value
from .model import (
    FrequencyModel,
    ScaledDistribution,
    StaticDistribution,
    TreeModel,
    entropy,
)

__version__ = "0.1.0"
