from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

ASPECT_MIN = Fraction(1, 2)
ASPECT_MAX = Fraction(2)


class PlanError(ValueError):
    pass


class InfeasiblePlanError(PlanError):
    pass


@dataclass(frozen=True)
class PatchSpec:
    patch_size: int = 14

    def __post_init__(self):
        if int(self.patch_size) != self.patch_size or self.patch_size <= 0:
            raise PlanError(f"patch size must be a positive integer, got {self.patch_size!r}")


def _patch(p) -> int:
    return p.patch_size if isinstance(p, PatchSpec) else PatchSpec(int(p)).patch_size


def visual_token_count(width: int, height: int, patch: PatchSpec | int) -> int:
    """Number of ``p x p`` patches tiling a ``width x height`` image."""
    p = _patch(patch)
    if width <= 0 or height <= 0:
        raise PlanError("image dimensions must be positive")
    if width % p or height % p:
        raise PlanError(f"{width}x{height} is not divisible by patch size {p}")
    return (width // p) * (height // p)


@dataclass(frozen=True)
class CompressionPlan:
    text_tokens: int
    ratio: float
    patch: PatchSpec
    pages: int
    grid: tuple[int, int]
    per_page_targets: tuple[tuple[int, int], ...]
    achieved_visual_tokens: int

    @property
    def requested_visual_tokens(self) -> float:
        return self.text_tokens / self.ratio

    def to_dict(self) -> dict:
        ratio = int(self.ratio) if float(self.ratio).is_integer() else self.ratio
        return {
            "text_tokens": self.text_tokens,
            "ratio": ratio,
            "patch": self.patch.patch_size,
            "pages": self.pages,
            "grid": list(self.grid),
            "targets": [list(t) for t in self.per_page_targets],
            "achieved_visual_tokens": self.achieved_visual_tokens,
            "requested_visual_tokens": self.requested_visual_tokens,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "CompressionPlan":
        return cls(
            text_tokens=int(d["text_tokens"]),
            ratio=d["ratio"],
            patch=PatchSpec(int(d["patch"])),
            pages=int(d["pages"]),
            grid=tuple(d.get("grid") or (d["targets"][0][0] // d["patch"], d["targets"][0][1] // d["patch"])),
            per_page_targets=tuple(tuple(t) for t in d["targets"]),
            achieved_visual_tokens=int(d["achieved_visual_tokens"]),
        )


def _in_band(w: int, h: int) -> bool:
    return ASPECT_MIN <= Fraction(w, h) <= ASPECT_MAX


def choose_grid(
    per_page_target: Fraction,
    source_aspect: float = 1.0,
    max_grid: tuple[int, int] | None = None,
) -> tuple[int, int]:
    """Patch grid ``(cols, rows)`` whose area is nearest ``per_page_target``.

    Only grids with ``0.5 <= cols/rows <= 2`` qualify. Ties go to the smaller
    area, then to ``rows >= cols``, then to the aspect closest to
    ``source_aspect``, then to fewer columns.
    """
    t = Fraction(per_page_target)
    num, den = t.numerator, t.denominator
    max_w, max_h = max_grid or (None, None)
    if max_grid is None:
        # in-band grids with w < sqrt(t/2) have area <= 2w^2 < t and those with
        # w > sqrt(2t) have area > t, both strictly worse than the window edge
        w_start = max(1, math.isqrt(num // (2 * den)) - 1)
        w_stop = math.isqrt(2 * num // den + 1) + 2
    else:
        w_start = 1
        w_stop = min(math.isqrt(2 * math.ceil(t)) + 2, max_w)
    log_src = math.log(source_aspect)
    best = None
    best_key = (math.inf, math.inf)
    for w in range(w_start, w_stop + 1):
        h_lo = (w + 1) // 2
        h_hi = 2 * w if max_h is None else min(2 * w, max_h)
        if h_lo > h_hi:
            continue
        dw = den * w
        q = num // dw
        # area is linear in h, so the best rows are t/w rounded either way, clipped to the band
        for h in (q, q + 1):
            h = h_lo if h < h_lo else h_hi if h > h_hi else h
            d = abs(h * dw - num)  # |area - t| scaled by den
            if d > best_key[0] or (d == best_key[0] and w * h > best_key[1]):
                continue
            key = (d, w * h, h < w, abs(math.log(w / h) - log_src), w)
            if key < best_key:
                best, best_key = (w, h), key
    if best is None:
        raise InfeasiblePlanError("no patch grid satisfies the size limits")
    return best


def plan_compression(
    text_tokens: int,
    ratio: float,
    patch: PatchSpec | int = 14,
    pages: int = 1,
    source_aspect: float = 1.0,
    max_grid: tuple[int, int] | None = None,
) -> CompressionPlan:
    """Solve per-page target resolutions so the image costs ``text_tokens / ratio`` visual tokens.

    The same grid is used on every page. ``max_grid`` caps the grid (in
    patches), e.g. to stay within the rendered base resolution.
    """
    p = _patch(patch)
    if text_tokens <= 0:
        raise PlanError("text_tokens must be positive")
    if not ratio >= 1:
        raise PlanError("compression ratio must be >= 1")
    if pages < 1:
        raise PlanError("pages must be >= 1")
    if source_aspect <= 0:
        raise PlanError("source_aspect must be positive")
    budget = Fraction(text_tokens) / Fraction(ratio)
    if budget < pages:
        raise InfeasiblePlanError(
            f"{text_tokens} tokens at {ratio}x leaves {float(budget):.3g} patches for {pages} pages"
        )
    w, h = choose_grid(budget / pages, source_aspect, max_grid)
    targets = tuple((w * p, h * p) for _ in range(pages))
    return CompressionPlan(
        text_tokens=int(text_tokens),
        ratio=ratio,
        patch=PatchSpec(p),
        pages=pages,
        grid=(w, h),
        per_page_targets=targets,
        achieved_visual_tokens=pages * w * h,
    )
