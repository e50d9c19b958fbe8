"""Signal unfolding: recover the full-band frame from the folded one."""

from __future__ import annotations

import numpy as np

from snsofdm.channel import Band, FreqFrame
from snsofdm.waveform import SymbolMatrix

MIN_SYMBOL_MAGNITUDE = 1e-12


def _ratio(z, symbols: SymbolMatrix) -> int:
    z = np.asarray(z)
    nc, ns = symbols.shape
    rows = z.shape[0]
    if z.shape[1] != ns or rows == 0 or nc % rows:
        raise ValueError(f"folded frame {z.shape} incompatible with symbol matrix {symbols.shape}")
    return nc // rows


def _check_symbols(c: np.ndarray):
    if np.min(np.abs(c)) < MIN_SYMBOL_MAGNITUDE:
        raise ZeroDivisionError("symbol magnitude below 1e-12; element-wise unfolding undefined")


def demod_subband(z, symbols: SymbolMatrix, i: int) -> np.ndarray:
    """D_i = Z / C_i for sub-band ``i`` (1-based)."""
    ell = _ratio(z, symbols)
    c_i = symbols.block(i, ell)
    _check_symbols(c_i)
    return np.asarray(z) / c_i


def unfold_full(z, symbols: SymbolMatrix) -> FreqFrame:
    """Stack D_1..D_L into the Nc-row unfolded frame D = X + Y + W_F."""
    ell = _ratio(z, symbols)
    blocks = symbols.blocks(ell)
    _check_symbols(blocks)
    d = (np.asarray(z)[None, :, :] / blocks).reshape(symbols.shape)
    return FreqFrame(d, Band.FULL)
