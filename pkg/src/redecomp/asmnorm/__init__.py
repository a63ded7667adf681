"""Normalization of assembly listings and C sources into canonical form."""

from .asm import (
    NormalizedAsm,
    OptLevel,
    RawAssemblyUnit,
    instruction_lines,
    normalize_asm,
    slice_functions,
)
from .csource import CanonicalSource, canonicalize_source, tokenize

__all__ = [
    "CanonicalSource",
    "NormalizedAsm",
    "OptLevel",
    "RawAssemblyUnit",
    "canonicalize_source",
    "instruction_lines",
    "normalize_asm",
    "slice_functions",
    "tokenize",
]
