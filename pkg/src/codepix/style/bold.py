from __future__ import annotations

import numpy as np

BOLD_OFFSETS = ((0, 0), (1, 0), (0, 1), (1, 1))


def bold_overdraw(coverage: np.ndarray, offsets=BOLD_OFFSETS) -> np.ndarray:
    """Synthesize bold by drawing a glyph's ink at several ``(dx, dy)`` offsets.

    ``coverage`` holds ink (0 = no ink). The result is the pixelwise maximum of
    the shifted copies, enlarged so no shifted ink is cropped.
    """
    cov = np.asarray(coverage)
    if cov.ndim != 2:
        raise ValueError("glyph coverage must be 2-D")
    dx_max = max(dx for dx, _ in offsets)
    dy_max = max(dy for _, dy in offsets)
    h, w = cov.shape
    out = np.zeros((h + dy_max, w + dx_max), dtype=cov.dtype)
    for dx, dy in offsets:
        view = out[dy : dy + h, dx : dx + w]
        np.maximum(view, cov, out=view)
    return out
