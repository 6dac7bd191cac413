from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

PRICING_FILE = Path(__file__).resolve().parent.parent / "assets" / "data" / "pricing.json"
PER_TOKENS = Decimal(1_000_000)


class UnknownModelError(LookupError):
    pass


@dataclass(frozen=True)
class ModelRates:
    input_rate_low: Decimal
    output_rate_low: Decimal
    input_rate_high: Decimal
    output_rate_high: Decimal

    def __post_init__(self):
        rates = (self.input_rate_low, self.output_rate_low, self.input_rate_high, self.output_rate_high)
        if any(r < 0 for r in rates):
            raise ValueError("rates must be non-negative")
        if self.input_rate_high < self.input_rate_low or self.output_rate_high < self.output_rate_low:
            raise ValueError("long-context rates must not undercut short-context rates")


@dataclass(frozen=True)
class PricingTable:
    """Per-model USD rates per million tokens, split at ``tier_boundary`` input tokens."""

    models: dict[str, ModelRates]
    tier_boundary: int = 200_000

    @classmethod
    def load(cls, path: str | Path = PRICING_FILE) -> "PricingTable":
        data = json.loads(Path(path).read_text("utf-8"))
        models = {
            name: ModelRates(**{k: Decimal(str(v)) for k, v in rates.items()})
            for name, rates in data["models"].items()
        }
        return cls(models, int(data.get("tier_boundary", 200_000)))

    def rates(self, model: str) -> ModelRates:
        try:
            return self.models[model]
        except KeyError:
            known = ", ".join(sorted(self.models))
            raise UnknownModelError(f"no pricing for {model!r}; known models: {known}") from None


@dataclass(frozen=True)
class CostEstimate:
    input_tokens: int
    output_tokens: int
    total_cost: Decimal
    tier: str

    def to_dict(self) -> dict:
        return {
            "input_tokens": self.input_tokens,
            "output_tokens": self.output_tokens,
            "total_cost": str(self.total_cost),
            "tier": self.tier,
        }


def estimate_cost(input_tokens: int, output_tokens: int, model: str, table: PricingTable | None = None) -> CostEstimate:
    """Exact-decimal request cost; the tier is set by ``input_tokens`` (high only above the boundary)."""
    if input_tokens < 0 or output_tokens < 0:
        raise ValueError("token counts must be non-negative")
    table = table or PricingTable.load()
    r = table.rates(model)
    high = input_tokens > table.tier_boundary
    rate_in = r.input_rate_high if high else r.input_rate_low
    rate_out = r.output_rate_high if high else r.output_rate_low
    total = (Decimal(input_tokens) * rate_in + Decimal(output_tokens) * rate_out) / PER_TOKENS
    return CostEstimate(input_tokens, output_tokens, total, "high" if high else "low")
