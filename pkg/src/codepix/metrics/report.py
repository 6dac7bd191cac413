from __future__ import annotations

import json
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

from ..budget.tokenizer import BUILTIN, TokenizerSpec
from .edit import Normalization, char_error_rate, edit_similarity, exact_match
from .ngram import ngram_match
from .stats import prevalence, summarize_runs
from .taxonomy import ErrorTaxonomy, classify_errors


@dataclass(frozen=True)
class ReconstructionRecord:
    sample_id: str
    ground_truth: str
    reconstruction: str
    compression_ratio: float
    run_index: int = 0

    def __post_init__(self):
        if not self.ground_truth:
            raise ValueError(f"record {self.sample_id!r} has an empty ground truth")
        if self.run_index < 0:
            raise ValueError("run_index must be non-negative")

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "ground_truth": self.ground_truth,
            "reconstruction": self.reconstruction,
            "compression_ratio": self.compression_ratio,
            "run_index": self.run_index,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ReconstructionRecord":
        return cls(
            str(d["sample_id"]),
            d["ground_truth"],
            d["reconstruction"],
            d["compression_ratio"],
            int(d.get("run_index", 0)),
        )


@dataclass(frozen=True)
class MetricReport:
    sample_id: str
    compression_ratio: float
    run_index: int
    cer: float
    edit_similarity: float
    exact_match: bool
    ngram_score: float
    taxonomy: ErrorTaxonomy

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "compression_ratio": self.compression_ratio,
            "run_index": self.run_index,
            "cer": self.cer,
            "edit_similarity": self.edit_similarity,
            "exact_match": self.exact_match,
            "ngram_score": self.ngram_score,
            "taxonomy": self.taxonomy.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MetricReport":
        return cls(
            str(d["sample_id"]),
            d["compression_ratio"],
            int(d["run_index"]),
            float(d["cer"]),
            float(d["edit_similarity"]),
            bool(d["exact_match"]),
            float(d["ngram_score"]),
            ErrorTaxonomy.from_dict(d["taxonomy"]),
        )


def score_record(
    record: ReconstructionRecord,
    tokenizer: TokenizerSpec = BUILTIN,
    keyword_weights: Mapping[str, float] | None = None,
    normalization: Normalization = Normalization.TRIM_TRAILING,
) -> MetricReport:
    truth, hyp = record.ground_truth, record.reconstruction
    em = exact_match(truth, hyp, normalization)
    if em:
        # normalized-equal transcriptions are scored as perfect
        hyp = truth
    return MetricReport(
        sample_id=record.sample_id,
        compression_ratio=record.compression_ratio,
        run_index=record.run_index,
        cer=char_error_rate(truth, hyp),
        edit_similarity=edit_similarity(truth, hyp, tokenizer),
        exact_match=em,
        ngram_score=ngram_match(truth, hyp, 4, keyword_weights, tokenizer=tokenizer),
        taxonomy=classify_errors(truth, hyp, tokenizer),
    )


def _ratio_key(r) -> str:
    r = float(r)
    return str(int(r)) if r.is_integer() else repr(r)


def summarize_reports(reports: Iterable[MetricReport]) -> dict:
    """Aggregate per compression ratio.

    Each metric is first averaged over samples within a run, then the run
    means are summarized (mean and sample standard deviation across runs).
    ``em_rate`` is the mean per-run exact-match percentage. Prevalence is
    computed over every report at that ratio.
    """
    by_ratio: dict[str, dict[int, list[MetricReport]]] = defaultdict(lambda: defaultdict(list))
    for rep in reports:
        by_ratio[_ratio_key(rep.compression_ratio)][rep.run_index].append(rep)

    per_ratio = {}
    for key in sorted(by_ratio, key=float):
        runs = by_ratio[key]
        run_ids = sorted(runs)

        def run_means(field):
            return [
                sum(float(getattr(r, field)) for r in runs[i]) / len(runs[i]) for i in run_ids
            ]

        cer_mean, cer_std = summarize_runs(run_means("cer"))
        es_mean, es_std = summarize_runs(run_means("edit_similarity"))
        em_mean, _ = summarize_runs([100.0 * m for m in run_means("exact_match")])
        ng_mean, ng_std = summarize_runs(run_means("ngram_score"))
        all_reports = [r for i in run_ids for r in runs[i]]
        per_ratio[key] = {
            "runs": len(run_ids),
            "samples": len({r.sample_id for r in all_reports}),
            "cer_mean": cer_mean,
            "cer_std": cer_std,
            "es_mean": es_mean,
            "es_std": es_std,
            "em_rate": em_mean,
            "ngram_mean": ng_mean,
            "ngram_std": ng_std,
            "prevalence": prevalence(r.taxonomy for r in all_reports),
        }
    return {"per_ratio": per_ratio}


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def write_jsonl(path: str | Path, rows: Iterable[Mapping]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")
