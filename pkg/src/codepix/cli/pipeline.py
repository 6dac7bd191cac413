"""End-to-end job: render, plan, compress and optionally transcribe and score.

Artifacts land under one output root::

    manifest.json          job, per-file render info, failures
    plans/*.json           one compression plan per (file, style, ratio)
    pages/*.png            compressed pages
    runs/*.jsonl           transcription log per (file, style, ratio)
    reports/*.jsonl        metric reports per (file, style, ratio)
    summary.json           per-ratio aggregates

File names derive from the file digest, style and ratio only, so parallel
execution order cannot change any artifact.
"""

from __future__ import annotations

import hashlib
import json
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..budget.plan import CompressionPlan, PlanError, plan_compression
from ..budget.resample import downsample_bilinear
from ..budget.tokenizer import BUILTIN, TokenizerSpec, count_text_tokens
from ..gateway.client import Gateway, RunLogEntry, transcribe_images
from ..gateway.transport import EndpointConfig, GatewayError
from ..metrics.ngram import keyword_weights
from ..metrics.report import ReconstructionRecord, score_record, summarize_reports, write_jsonl
from ..render.config import RenderConfig, Style
from ..render.document import render_document
from ..render.layout import LayoutOverflowError, normalize_source
from ..render.png import encode_png
from ..style.lexer import default_registry
from .corpus import iter_source_files


@dataclass
class JobSpec:
    inputs: list[str]
    output_dir: str
    style: str = "plain"
    ratios: list[float] = field(default_factory=lambda: [1, 2, 4, 8])
    patch_size: int = 14
    tokenizer: TokenizerSpec = BUILTIN
    repeats: int = 5
    transcribe: bool = False
    endpoint: EndpointConfig | None = None
    language: str | None = None
    jobs: int = 1
    render: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.ratios or any(not r >= 1 for r in self.ratios):
            raise ValueError("ratios must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        Style(self.style)

    def render_config(self) -> RenderConfig:
        return RenderConfig(style=self.style, **self.render)

    def to_dict(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "output_dir": self.output_dir,
            "style": self.style,
            "ratios": list(self.ratios),
            "patch_size": self.patch_size,
            "tokenizer": self.tokenizer.to_dict(),
            "repeats": self.repeats,
            "transcribe": self.transcribe,
            "endpoint": self.endpoint.to_dict() if self.endpoint else None,
            "language": self.language,
            "render": dict(self.render),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JobSpec":
        d = dict(d)
        d["tokenizer"] = TokenizerSpec.from_dict(d.get("tokenizer"))
        if d.get("endpoint"):
            d["endpoint"] = EndpointConfig.from_dict(d["endpoint"])
        return cls(**d)


@dataclass
class PipelineResult:
    output_dir: Path
    files: list[dict]
    failures: list[dict]
    summary: dict

    @property
    def ok(self) -> bool:
        return not self.failures


def _ratio_tag(r: float) -> str:
    r = float(r)
    return f"k{int(r)}" if r.is_integer() else f"k{r:g}".replace(".", "_")


def _process_file(path: Path, job: JobSpec, gateway: Gateway | None) -> dict:
    raw = path.read_bytes()
    source = raw.decode("utf-8")  # UnicodeDecodeError marks the file as failed
    digest = hashlib.sha256(raw).hexdigest()
    registry = default_registry()
    language = job.language or registry.language_for_path(path)
    config = job.render_config()
    text_tokens = count_text_tokens(source, job.tokenizer)
    if text_tokens == 0:
        raise PlanError("file is empty")

    pages, manifest = render_document(source, config, language, registry=registry)
    width, height = config.base_width, config.base_height
    p = job.patch_size
    stem = f"{digest[:16]}_{job.style}"
    out = Path(job.output_dir)
    truth = normalize_source(source)
    weights = keyword_weights(manifest.language)

    info = {
        "path": path.as_posix(),
        "sha256": digest,
        "language": manifest.language,
        "text_tokens": text_tokens,
        "render": manifest.to_dict(),
        "ratios": {},
        "failures": [],
    }
    for ratio in job.ratios:
        tag = _ratio_tag(ratio)
        try:
            plan = plan_compression(
                text_tokens, ratio, p, len(pages), width / height, (width // p, height // p)
            )
        except PlanError as exc:
            info["failures"].append({"path": path.as_posix(), "ratio": ratio, "error": str(exc)})
            continue
        png_names, png_bytes = [], []
        for page, (tw, th) in zip(pages, plan.per_page_targets):
            small = downsample_bilinear(page, tw, th)
            name = f"{stem}_{tag}_p{page.layout.page_index:03d}.png"
            data = encode_png(small)
            (out / "pages" / name).write_bytes(data)
            png_names.append(name)
            png_bytes.append(data)
        plan_doc = plan.to_dict()
        plan_doc.update(source=path.as_posix(), sha256=digest, style=job.style, images=png_names)
        (out / "plans" / f"{stem}_{tag}.json").write_text(
            json.dumps(plan_doc, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        entry = {"plan": f"plans/{stem}_{tag}.json", "achieved_visual_tokens": plan.achieved_visual_tokens}

        if job.transcribe and gateway is not None:
            sample_id = f"{digest[:16]}"
            records, logs = [], []
            for run in range(job.repeats):
                try:
                    text = transcribe_images(png_bytes, gateway, sample_id=f"{sample_id}@{tag}", run_index=run)
                except GatewayError as exc:
                    info["failures"].append(
                        {"path": path.as_posix(), "ratio": ratio, "run_index": run, "error": str(exc)}
                    )
                    continue
                records.append(ReconstructionRecord(sample_id, truth, text, ratio, run))
            logs = [e for e in gateway.sorted_log() if e.sample_id == f"{sample_id}@{tag}"]
            run_rows = _run_rows(records, logs)
            write_jsonl(out / "runs" / f"{stem}_{tag}.jsonl", run_rows)
            reports = [score_record(r, job.tokenizer, weights or None) for r in records]
            write_jsonl(out / "reports" / f"{stem}_{tag}.jsonl", [r.to_dict() for r in reports])
            entry["reports"] = f"reports/{stem}_{tag}.jsonl"
            entry["_reports"] = reports
        info["ratios"][_ratio_tag(ratio)] = entry
    return info


def _run_rows(records: list[ReconstructionRecord], logs: list[RunLogEntry]) -> list[dict]:
    by_run = {e.run_index: e for e in logs}
    rows = []
    for rec in sorted(records, key=lambda r: r.run_index):
        row = rec.to_dict()
        log = by_run.get(rec.run_index)
        if log is not None:
            row.update(
                request_digest=log.request_digest,
                response_text=log.response_text,
                latency_ms=log.latency_ms,
                attempts=log.attempts,
                prompt_version=log.prompt_version,
            )
        rows.append(row)
    return rows


def collect_inputs(inputs: list[str]) -> list[Path]:
    files: list[Path] = []
    seen = set()
    for item in inputs:
        for p in iter_source_files(item):
            key = p.resolve()
            if key not in seen:
                seen.add(key)
                files.append(p)
    return files


def run_pipeline(job: JobSpec, gateway: Gateway | None = None) -> PipelineResult:
    """Run ``job`` and write every artifact under ``job.output_dir``.

    Per-file failures (undecodable input, layout overflow, infeasible plans,
    transport errors) are recorded and skipped; ``PipelineResult.ok`` is False
    if any occurred.
    """
    out = Path(job.output_dir)
    for sub in ("plans", "pages", "runs", "reports"):
        d = out / sub
        if d.exists():
            shutil.rmtree(d)
        d.mkdir(parents=True)
    if job.transcribe and gateway is None:
        if job.endpoint is None:
            raise ValueError("transcription requested but no endpoint configured")
        gateway = Gateway(job.endpoint)

    files = collect_inputs(job.inputs)

    def work(path: Path):
        try:
            return _process_file(path, job, gateway)
        except (UnicodeDecodeError, LayoutOverflowError, PlanError, OSError) as exc:
            return {"path": path.as_posix(), "error": f"{type(exc).__name__}: {exc}"}

    if job.jobs > 1:
        with ThreadPoolExecutor(max_workers=job.jobs) as pool:
            results = list(pool.map(work, files))
    else:
        results = [work(f) for f in files]

    failures: list[dict] = []
    done: list[dict] = []
    all_reports = []
    for res in results:
        if "error" in res:
            failures.append(res)
            continue
        failures.extend(res.pop("failures"))
        for entry in res["ratios"].values():
            all_reports.extend(entry.pop("_reports", []))
        done.append(res)

    summary = _summary(job, done, failures, all_reports)
    manifest = {"job": job.to_dict(), "files": done, "failures": failures}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", "utf-8")
    return PipelineResult(out, done, failures, summary)


def _summary(job: JobSpec, done: list[dict], failures: list[dict], reports) -> dict:
    per_ratio: dict[str, dict] = {}
    for ratio in job.ratios:
        tag = _ratio_tag(ratio)
        entries = [f for f in done if tag in f["ratios"]]
        per_ratio[tag] = {
            "ratio": ratio,
            "files": len(entries),
            "text_tokens": sum(f["text_tokens"] for f in entries),
            "achieved_visual_tokens": sum(f["ratios"][tag]["achieved_visual_tokens"] for f in entries),
        }
    summary = {
        "files_ok": len(done),
        "failures": failures,
        "failure_count": len(failures),
        "per_ratio": per_ratio,
        "achieved_visual_tokens_total": sum(v["achieved_visual_tokens"] for v in per_ratio.values()),
    }
    if reports:
        metrics = summarize_reports(reports)["per_ratio"]
        for key, value in metrics.items():
            tag = _ratio_tag(float(key))
            per_ratio.setdefault(tag, {}).update(value)
    return summary
