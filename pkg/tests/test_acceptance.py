"""Acceptance suite: one test per criterion, with the stated tolerances.

Each test records a short ``detail`` string; the terminal summary prints one
PASS/FAIL line per criterion.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import time
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import pytest

from codepix.budget import count_text_tokens, plan_compression, visual_token_count
from codepix.cli import JobSpec, main, run_pipeline
from codepix.gateway import Gateway, estimate_cost
from codepix.metrics import (
    MetricReport,
    char_error_rate,
    classify_errors,
    edit_similarity,
    exact_match,
    levenshtein,
    read_jsonl,
    summarize_runs,
    wilcoxon_signed_rank,
)
from codepix.render import RenderConfig, layout_document, render_document
from conftest import MockTransport
from synth import all_strings, brute_levenshtein, enumerate_wilcoxon, perturbation


def snippet_110() -> str:
    return (
        "def moving_average(values, window):\n"
        "    if window <= 0:\n"
        "        raise ValueError(window)\n"
        "    total = sum(values[:window])\n"
        "    out = [total / float(window)]\n"
        "    for i in range(window, len(values)):\n"
        "        total += values[i] - values[i - window]\n"
        "        out.append(total / window)\n"
        "    return out\n"
    )


def synthetic_module(seed: int, n_funcs: int) -> str:
    rng = random.Random(seed)
    out = [f'"""Generated module {seed}."""\n', "import math\n", "\n"]
    for f in range(n_funcs):
        a, b = rng.randint(1, 99), rng.randint(1, 99)
        out += [
            f"def func_{seed}_{f}(x, y={a}):\n",
            f"    # scale then shift by {b}\n",
            f"    value = math.sqrt(x * x + y * {b})\n",
            f"    if value > {a}:\n",
            f"        return value - {b}\n",
            f"    return [value, x, y, {a} % {b}]\n",
            "\n",
        ]
    return "".join(out)


def oracle_grid(target: Fraction) -> tuple[int, int]:
    """Exhaustive grid search with the documented ordering."""
    num, den = target.numerator, target.denominator
    best = None
    bound = 2 * math.isqrt(2 * math.ceil(target)) + 8
    for w in range(1, bound):
        for h in range((w + 1) // 2, 2 * w + 1):
            a = w * h
            key = (abs(a * den - num), a, h < w, abs(math.log(w / h)), w)
            if best is None or key < best[0]:
                best = (key, (w, h))
    return best[1]


def test_criterion_01_patch_formula(record_property):
    t0 = time.perf_counter()
    assert visual_token_count(2240, 2240, 14) == 25600
    assert visual_token_count(2240, 2240, 16) == 19600
    rng = random.Random(2024)
    for _ in range(1000):
        t, k, p = rng.randint(1, 2_000_000), rng.choice([1, 2, 3, 4, 8, 16]), rng.choice([14, 16])
        plan = plan_compression(t, k, p)
        for w, h in plan.per_page_targets:
            assert w % p == 0 and h % p == 0
            assert visual_token_count(w, h, p) * plan.pages == plan.achieved_visual_tokens
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    record_property("detail", f"1000 random plans patch-divisible in {elapsed:.2f}s")


def test_criterion_02_budget_accuracy(record_property):
    t0 = time.perf_counter()
    worst = 0.0
    for t in (110, 440, 6400, 25600):
        for k in (1, 2, 4, 8):
            for p in (14, 16):
                plan = plan_compression(t, k, p)
                target = Fraction(t) / k
                assert plan.grid == oracle_grid(target)
                w, h = plan.grid
                err = abs(plan.achieved_visual_tokens - target)
                assert err <= max(w, h)
                worst = max(worst, float(err / max(w, h)))
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    record_property("detail", f"32 plans equal the oracle, worst error {worst:.2f} of a patch row, {elapsed:.2f}s")


def test_criterion_03_snippet_110_tokens(record_property):
    src = snippet_110()
    assert count_text_tokens(src) == 110
    pages, _ = render_document(src, RenderConfig(), "python")
    plan = plan_compression(110, 4, 14, len(pages))
    achieved = plan.achieved_visual_tokens
    assert achieved <= 31
    assert abs(achieved - 27) <= 0.15 * 27
    record_property("detail", f"110 text tokens -> {achieved} visual tokens at k=4 ({plan.per_page_targets[0]} px)")


def _snapshot(root: Path) -> dict[str, str]:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file() and p.suffix in (".png", ".json") and p.name != "manifest.json":
            out[p.relative_to(root).as_posix()] = hashlib.sha256(p.read_bytes()).hexdigest()
    summary = json.loads((root / "summary.json").read_text())
    out["tokens"] = json.dumps(summary["per_ratio"], sort_keys=True)
    return out


@pytest.mark.slow
def test_criterion_04_determinism(tmp_path, record_property):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for i in range(10):
        (corpus / f"mod_{i}.py").write_text(synthetic_module(i, 2 + i % 4), "utf-8")
    t0 = time.perf_counter()
    reference = None
    runs = 0
    for jobs in (1, 8):
        for r in range(20):
            out = tmp_path / f"run_{jobs}_{r}"
            res = run_pipeline(JobSpec(inputs=[str(corpus)], output_dir=str(out), ratios=[1, 2, 4, 8], jobs=jobs))
            assert res.ok
            snap = _snapshot(out)
            if reference is None:
                reference = snap
                assert sum(k.endswith(".png") for k in snap) >= 40
            assert snap == reference
            runs += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 120
    record_property("detail", f"{runs} runs x {len(reference) - 1} artifacts byte-identical, {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_05_throughput(tmp_path, capsys, record_property):
    corpus = tmp_path / "bench"
    corpus.mkdir()
    total = 0
    i = 0
    while total < 100_000:
        src = synthetic_module(1000 + i, 6)
        (corpus / f"bench_{i:04d}.py").write_text(src, "utf-8")
        total += count_text_tokens(src)
        i += 1
    t0 = time.perf_counter()
    assert main(["render", str(corpus), "--bench", "--bench-encode"]) == 0
    elapsed = time.perf_counter() - t0
    result = json.loads(capsys.readouterr().out)
    assert result["text_tokens"] >= 100_000
    assert result["tokens_per_second"] >= 1000
    assert elapsed < 300
    record_property(
        "detail",
        f"{result['text_tokens']} tokens, {result['tokens_per_second']:.0f} tok/s render, "
        f"{result['tokens_per_second_with_encode']:.0f} tok/s with PNG encode",
    )


def test_criterion_06_metric_oracles(record_property):
    t0 = time.perf_counter()
    words = all_strings("abc", 6)
    pairs = 0
    for a in words:
        for b in words:
            assert levenshtein(a, b) == brute_levenshtein(a, b)
            pairs += 1
    brute_levenshtein.cache_clear()
    for x in ("", "a", "def f(x):\n    return x\n"):
        if x:
            assert char_error_rate(x, x) == 0.0
        assert edit_similarity(x, x) == 100.0
        assert exact_match(x, x)
    assert levenshtein("kitten", "sitting") == 3
    assert char_error_rate("abcd", "abce") == 0.25
    assert char_error_rate("ab", "abcdef") == 2.0
    assert edit_similarity("a b c d", "a b x d") == 75.0
    assert edit_similarity("a b c d", "e f g h") == 0.0
    assert exact_match("a\n", "a") and not exact_match("a", "b")
    elapsed = time.perf_counter() - t0
    assert elapsed < 60
    record_property("detail", f"{pairs} string pairs match brute force; fixtures exact; {elapsed:.1f}s")


def test_criterion_07_taxonomy(record_property):
    t0 = time.perf_counter()
    seen = {"token": 0, "line": 0, "block": 0}
    for seed in range(200):
        truth, hyp, expected = perturbation(seed)
        got = classify_errors(truth, hyp)
        assert got == expected, seed
        seen["token"] += got.has_token_error
        seen["line"] += got.has_line_error
        seen["block"] += got.has_block_error
    rng = random.Random(7)
    alphabet = "ab (),.\n"
    for _ in range(2000):
        truth = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 60))) or "a"
        hyp = "".join(rng.choice(alphabet + "xy") for _ in range(rng.randint(0, 60)))
        t = classify_errors(truth, hyp)
        assert (not t.has_block_error or t.has_line_error) and (not t.has_line_error or t.has_token_error)
    # every constructed family is represented
    assert min(seen.values()) > 0
    elapsed = time.perf_counter() - t0
    assert elapsed < 60
    record_property("detail", f"200 constructions exact {seen}, hierarchy holds on 2000 fuzzed pairs, {elapsed:.1f}s")


def test_criterion_08_wilcoxon_exact(record_property):
    t0 = time.perf_counter()
    rng = random.Random(8)
    worst = 0.0
    samples = 0
    while samples < 100:
        n = rng.randint(1, 10)
        a = [rng.randint(0, 20) / 2 for _ in range(n)]
        b = [rng.randint(0, 20) / 2 for _ in range(n)]
        nonzero = sum(x != y for x, y in zip(a, b))
        if nonzero == 0:
            continue
        stat, p = wilcoxon_signed_rank(a, b, min_n=1)
        ref_stat, ref_p = enumerate_wilcoxon(a, b)
        assert stat == ref_stat
        assert abs(p - ref_p) <= 1e-12
        worst = max(worst, abs(p - ref_p))
        if nonzero >= 5:
            assert wilcoxon_signed_rank(a, b) == (stat, p)
        samples += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 30
    record_property("detail", f"100 samples n<=10 (with ties), max |dp| {worst:.1e}, {elapsed:.2f}s")


def test_criterion_09_cost(record_property):
    assert estimate_cost(1_000_000, 0, "GPT-5-mini").total_cost == Decimal("0.25")
    assert estimate_cost(25_600, 0, "Gemini-3-Pro").total_cost == Decimal("0.0512")
    assert estimate_cost(25_600, 0, "Gemini-3-Pro").tier == "low"
    at = estimate_cost(200_000, 0, "Gemini-2.5-Pro")
    over = estimate_cost(200_001, 0, "Gemini-2.5-Pro")
    assert at.total_cost == Decimal("200000") * Decimal("1.25") / 10**6
    assert over.total_cost == Decimal("200001") * Decimal("2.50") / 10**6
    record_property("detail", f"0.25 / 0.0512 exact; tier switch {at.total_cost} -> {over.total_cost}")


def test_criterion_10_pagination(record_property):
    t0 = time.perf_counter()
    cfg = RenderConfig()
    rng = random.Random(10)
    for _ in range(1000):
        n = rng.randint(0, 400)
        lens = [rng.choice([0, 5, 40, 90, 91, 92, 200, 500]) for _ in range(n)]
        src = "".join("c" * k + "\n" for k in lens)
        pages = layout_document(src, cfg)
        covered = [i for p in pages for i in p.line_range]
        assert covered == list(range(n))  # partition, in order, no line split
        assert all(p.rows <= cfg.lines_per_page for p in pages)
    pages = layout_document("".join(f"x{i}\n" for i in range(55)), cfg)
    assert [(p.line_start, p.line_end) for p in pages] == [(0, 54), (54, 55)]
    elapsed = time.perf_counter() - t0
    assert elapsed < 60
    record_property("detail", f"1000 random sources partition cleanly; 55 lines -> 2 pages; {elapsed:.1f}s")


@pytest.fixture
def mock_gateway(endpoint, no_sleep):
    rng = random.Random(11)

    def reply(doc):
        # drop or corrupt a character now and then, like a noisy OCR model
        text = _TRUTH[0]
        chars = list(text)
        for _ in range(rng.randint(0, 6)):
            j = rng.randrange(len(chars))
            chars[j] = rng.choice(["", "0", "l", " "])
        return "```\n" + "".join(chars) + "\n```"

    return Gateway(endpoint, MockTransport(default=reply), no_sleep[0])


_TRUTH = [""]


def test_criterion_11_end_to_end(tmp_path, mock_gateway, record_property):
    src = tmp_path / "src" / "sample.py"
    src.parent.mkdir()
    src.write_text(synthetic_module(77, 3), "utf-8")
    _TRUTH[0] = src.read_text("utf-8")
    t0 = time.perf_counter()
    job = JobSpec(inputs=[str(src)], output_dir=str(tmp_path / "out"), ratios=[1, 2, 4, 8], repeats=5, transcribe=True)
    res = run_pipeline(job, mock_gateway)
    assert res.ok
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    checked = 0
    for path in sorted((tmp_path / "out" / "reports").glob("*.jsonl")):
        reports = [MetricReport.from_dict(d) for d in read_jsonl(path)]
        assert len(reports) == 5
        ratio = reports[0].compression_ratio
        row = summary["per_ratio"][f"k{ratio}"]
        for metric, field in (("cer", "cer"), ("es", "edit_similarity"), ("ngram", "ngram_score")):
            per_run = [getattr(r, field) for r in sorted(reports, key=lambda r: r.run_index)]
            mean, std = summarize_runs(per_run)
            assert row[f"{metric}_mean"] == mean and row[f"{metric}_std"] == std
            checked += 1
    assert checked == 12
    elapsed = time.perf_counter() - t0
    assert elapsed < 120
    record_property("detail", f"4 ratios x 5 repeats; {checked} mean/std pairs equal summarize_runs on raw JSONL; {elapsed:.1f}s")
