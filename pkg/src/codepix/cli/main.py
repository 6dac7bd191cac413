from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from ..budget.plan import PlanError, plan_compression
from ..budget.tokenizer import TokenizerSpec, count_text_tokens
from ..gateway.client import Gateway, transcribe_images
from ..gateway.pricing import PricingTable, UnknownModelError, estimate_cost
from ..gateway.transport import EndpointConfig, GatewayError
from ..metrics.ngram import keyword_weights
from ..metrics.report import (
    MetricReport,
    ReconstructionRecord,
    read_jsonl,
    score_record,
    summarize_reports,
    write_jsonl,
)
from ..render.config import RenderConfig
from ..render.document import render_document
from ..render.layout import LayoutOverflowError
from ..render.png import encode_png
from ..style.lexer import default_registry
from .corpus import EmptyCorpusError, ingest_corpus
from .pipeline import JobSpec, collect_inputs, run_pipeline


def _ratios(text: str) -> list[float]:
    out = []
    for part in text.split(","):
        v = float(part)
        out.append(int(v) if v.is_integer() else v)
    return out


def _tokenizer(args) -> TokenizerSpec:
    if getattr(args, "vocab", None):
        return TokenizerSpec("external-vocab", args.vocab)
    return TokenizerSpec()


def _render_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--style", choices=["plain", "bold", "highlight"], default="plain")
    p.add_argument("--font-size", type=int, default=40)
    p.add_argument("--line-height", type=float, default=1.0)
    p.add_argument("--margin", type=float, default=0.01, help="margin as a fraction of page width")
    p.add_argument("--base", type=int, nargs=2, metavar=("W", "H"), default=(2240, 2240))
    p.add_argument("--no-wrap", action="store_true", help="clip long lines instead of wrapping")
    p.add_argument("--theme", default="default_light")
    p.add_argument("--language", help="override extension-based language detection")


def _config(args) -> RenderConfig:
    return RenderConfig(
        base_width=args.base[0],
        base_height=args.base[1],
        font_size=args.font_size,
        line_height_multiplier=args.line_height,
        margin_fraction=args.margin,
        style=args.style,
        wrap_long_lines=not args.no_wrap,
        theme=args.theme,
    )


def _endpoint_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--base-url", default="https://openrouter.ai/api/v1")
    p.add_argument("--model", required=False)
    p.add_argument("--api-key-env", default="OPENAI_API_KEY")
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--max-retries", type=int, default=3)


def _endpoint(args) -> EndpointConfig:
    if not args.model:
        raise SystemExit("--model is required")
    return EndpointConfig(args.base_url, args.model, args.api_key_env, args.timeout, args.max_retries)


def cmd_ingest(args) -> int:
    manifest = ingest_corpus(args.root, args.min_lines, args.max_lines, _tokenizer(args))
    _emit(manifest.to_json(), args.out)
    return 0


def cmd_render(args) -> int:
    config = _config(args)
    registry = default_registry()
    files = collect_inputs(args.inputs)
    if args.bench:
        return _bench(files, config, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    status = 0
    for path in files:
        language = args.language or registry.language_for_path(path)
        try:
            pages, manifest = render_document(path.read_text("utf-8"), config, language, jobs=args.jobs)
        except (UnicodeDecodeError, LayoutOverflowError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = 1
            continue
        for page in pages:
            (out / f"{path.stem}_p{page.layout.page_index:03d}.png").write_bytes(encode_png(page))
        (out / f"{path.stem}.manifest.json").write_text(manifest.to_json() + "\n", "utf-8")
        print(f"{path}: {len(pages)} page(s)")
    return status


def _bench(files, config, args) -> int:
    registry = default_registry()
    tokens = 0
    render_s = encode_s = 0.0
    for path in files:
        try:
            source = path.read_text("utf-8")
        except UnicodeDecodeError:
            continue
        lang = args.language or registry.language_for_path(path)
        t0 = time.perf_counter()
        try:
            pages, _ = render_document(source, config, lang)
        except LayoutOverflowError:
            continue
        t1 = time.perf_counter()
        if args.bench_encode:
            for page in pages:
                encode_png(page)
        t2 = time.perf_counter()
        tokens += count_text_tokens(source)
        render_s += t1 - t0
        encode_s += t2 - t1
    result = {
        "files": len(files),
        "text_tokens": tokens,
        "render_seconds": round(render_s, 4),
        "tokens_per_second": round(tokens / render_s, 1) if render_s else None,
    }
    if args.bench_encode:
        result["encode_seconds"] = round(encode_s, 4)
        total = render_s + encode_s
        result["tokens_per_second_with_encode"] = round(tokens / total, 1) if total else None
    print(json.dumps(result, indent=2))
    return 0


def cmd_plan(args) -> int:
    if args.tokens is not None:
        tokens = args.tokens
    elif args.file:
        tokens = count_text_tokens(Path(args.file).read_text("utf-8"), _tokenizer(args))
    else:
        raise SystemExit("give --tokens or a FILE")
    plans = [plan_compression(tokens, r, args.patch, args.pages).to_dict() for r in args.ratios]
    _emit(json.dumps(plans if len(plans) > 1 else plans[0], indent=2, sort_keys=True), args.out)
    return 0


def cmd_compress(args) -> int:
    job = JobSpec(
        inputs=args.inputs,
        output_dir=args.out,
        style=args.style,
        ratios=args.ratios,
        patch_size=args.patch,
        tokenizer=_tokenizer(args),
        language=args.language,
        jobs=args.jobs,
        render=_render_overrides(args),
    )
    result = run_pipeline(job)
    print(json.dumps(result.summary["per_ratio"], indent=2, sort_keys=True))
    for f in result.failures:
        print(f"failed: {f}", file=sys.stderr)
    return 0 if result.ok else 1


def _render_overrides(args) -> dict:
    return {
        "base_width": args.base[0],
        "base_height": args.base[1],
        "font_size": args.font_size,
        "line_height_multiplier": args.line_height,
        "margin_fraction": args.margin,
        "wrap_long_lines": not args.no_wrap,
        "theme": args.theme,
    }


def cmd_run(args) -> int:
    data = json.loads(Path(args.job).read_text("utf-8"))
    for key in ("output_dir", "style", "repeats", "jobs", "language"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.ratios is not None:
        data["ratios"] = args.ratios
    if args.transcribe:
        data["transcribe"] = True
    job = JobSpec.from_dict(data)
    result = run_pipeline(job)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return 0 if result.ok else 1


def cmd_transcribe(args) -> int:
    gw = Gateway(_endpoint(args))
    images = [Path(p).read_bytes() for p in args.images]
    prompt = Path(args.prompt).read_text("utf-8") if args.prompt else None
    text = transcribe_images(images, gw, prompt=prompt, sample_id=args.sample_id)
    _emit(text, args.out)
    if args.log:
        write_jsonl(args.log, [e.to_dict() for e in gw.sorted_log()])
    return 0


def cmd_score(args) -> int:
    records = [ReconstructionRecord.from_dict(d) for d in read_jsonl(args.records)]
    weights = keyword_weights(args.language) if args.language else None
    reports = [score_record(r, _tokenizer(args), weights or None) for r in records]
    if args.out:
        write_jsonl(args.out, [r.to_dict() for r in reports])
    summary = summarize_reports(reports)
    _emit(json.dumps(summary, indent=2, sort_keys=True), args.summary)
    return 0


def cmd_report(args) -> int:
    reports = [MetricReport.from_dict(d) for path in args.reports for d in read_jsonl(path)]
    _emit(json.dumps(summarize_reports(reports), indent=2, sort_keys=True), args.out)
    return 0


def cmd_cost(args) -> int:
    table = PricingTable.load(args.pricing) if args.pricing else PricingTable.load()
    models = [args.model] if args.model else sorted(table.models)
    rows = [
        {"model": m, **estimate_cost(args.input_tokens, args.output_tokens, m, table).to_dict()}
        for m in models
    ]
    print(json.dumps(rows if len(rows) > 1 else rows[0], indent=2))
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", "utf-8")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codepix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="collect a corpus filtered by line count")
    p.add_argument("root")
    p.add_argument("--min-lines", type=int, default=50)
    p.add_argument("--max-lines", type=int, default=120)
    p.add_argument("--vocab", help="external vocabulary for token counts")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("render", help="render source files to full-resolution pages")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default="pages")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--bench", action="store_true", help="report text tokens rendered per second")
    p.add_argument("--bench-encode", action="store_true", help="include PNG encoding in --bench")
    _render_args(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("plan", help="solve target resolutions for a token budget")
    p.add_argument("file", nargs="?")
    p.add_argument("--tokens", type=int)
    p.add_argument("--ratios", type=_ratios, default=[1, 2, 4, 8])
    p.add_argument("--patch", type=int, default=14)
    p.add_argument("--pages", type=int, default=1)
    p.add_argument("--vocab")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("compress", help="render, plan and downsample into an artifact directory")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--ratios", type=_ratios, default=[1, 2, 4, 8])
    p.add_argument("--patch", type=int, default=14)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--vocab")
    _render_args(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("run", help="run a JSON job file; flags override its fields")
    p.add_argument("job")
    p.add_argument("--output-dir")
    p.add_argument("--style", choices=["plain", "bold", "highlight"])
    p.add_argument("--ratios", type=_ratios)
    p.add_argument("--repeats", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--language")
    p.add_argument("--transcribe", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("transcribe", help="send page images to a model for OCR")
    p.add_argument("images", nargs="+")
    p.add_argument("--prompt", help="prompt file (default: bundled OCR prompt)")
    p.add_argument("--sample-id", default="")
    p.add_argument("--log", help="append-ordered run log (JSONL)")
    p.add_argument("--out")
    _endpoint_args(p)
    p.set_defaults(func=cmd_transcribe)

    p = sub.add_parser("score", help="score reconstruction records (JSONL)")
    p.add_argument("records")
    p.add_argument("--out", help="metric reports JSONL")
    p.add_argument("--summary", help="summary JSON (default: stdout)")
    p.add_argument("--language", help="keyword weights for the n-gram score")
    p.add_argument("--vocab")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("report", help="aggregate metric reports per ratio")
    p.add_argument("reports", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("cost", help="estimate API cost from token counts")
    p.add_argument("--input-tokens", type=int, required=True)
    p.add_argument("--output-tokens", type=int, default=0)
    p.add_argument("--model")
    p.add_argument("--pricing", help="pricing JSON (default: bundled table)")
    p.set_defaults(func=cmd_cost)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Render code to token-budgeted images and score OCR reconstructions."""
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EmptyCorpusError, PlanError, UnknownModelError, GatewayError, FileNotFoundError, ValueError) as exc:
        print(f"codepix {args.command}: {exc}", file=sys.stderr)
        return 2
