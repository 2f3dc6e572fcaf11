import math

import pytest

from arcode import bench
from arcode.bench import COLUMNS, Source, efficiency_sweep, format_table, format_tsv, min_precision_for_ratio, run_cell, run_matrix
from arcode.cli import main
from arcode.coder import CoderConfig
from arcode.container import compress, info
from arcode.model import StaticDistribution, entropy

FOUR = ["0.2", "0.5", "0.2", "0.1"]


@pytest.fixture(scope="module")
def matrix_reports():
    src = Source.from_probs("four", FOUR, 5000, seed=1)
    return run_matrix([src], configs=[CoderConfig(256, 4)], repeats=1, threads=1)


def test_matrix_shape_and_checks(matrix_reports):
    assert [r.strategy for r in matrix_reports] == list(bench.DEFAULT_STRATEGIES)
    for r in matrix_reports:
        assert r.checks and all(r.checks.values()), r.strategy
        assert r.entropy == pytest.approx(1.76096, abs=1e-5)


def test_static_payloads_identical_across_searches(matrix_reports):
    sizes = {r.payload_digits for r in matrix_reports if r.strategy.startswith("static/")}
    assert len(sizes) == 1


def test_bisection_probes_m256():
    src = Source("uniform256", tuple([1 / 256] * 256), 3000, seed=2)
    r = run_cell(src, "static/bisection", CoderConfig(256, 4), repeats=1)
    assert r.probes_per_symbol == 8


def test_adaptive_additions_about_half_m():
    M = 64
    src = Source("uniform64", tuple([1 / M] * M), 20000, seed=3)
    r = run_cell(src, "adaptive/bisection", CoderConfig(256, 4), repeats=1)
    # counting s bumps C(s+1)..C(M): M - s additions, mean (M + 1) / 2
    assert r.additions_per_symbol == pytest.approx((M + 1) / 2, rel=0.03)


def test_periodic_divisions_per_symbol():
    M = 16
    src = Source("uniform16", tuple([1 / M] * M), 8000, seed=4)
    r = run_cell(src, "periodic/bisection", CoderConfig(256, 4), repeats=1)
    R = 4 * M
    assert r.divisions_per_symbol <= 1 + 2 / R * M
    assert r.divisions_per_symbol == pytest.approx(M / R, abs=0.01)


def test_tree_operation_counts():
    M = 256
    src = Source("uniform256", tuple([1 / M] * M), 4000, seed=5)
    r = run_cell(src, "tree", CoderConfig(256, 4), repeats=1)
    assert r.divisions_per_symbol == 1
    assert r.additions_per_symbol <= math.log2(M) + 2


def test_efficiency_near_entropy_at_scale():
    pts = efficiency_sweep(FOUR, 100_000, [CoderConfig(256, 4)], seed=0)
    assert pts[0].bits_per_symbol - entropy(StaticDistribution(FOUR)) <= 0.01


def test_efficiency_monotone_in_precision():
    configs = [CoderConfig(2, P) for P in (8, 10, 12, 16, 24, 32)]
    pts = efficiency_sweep(FOUR, 20000, configs, seed=6)
    leak = [p.leakage for p in pts]
    bits = [p.bits_per_symbol for p in pts]
    for a, b in zip(bits, bits[1:]):
        assert b <= a + 1e-9
    assert leak[-1] < leak[0]


def test_leakage_at_minimum_precision():
    dist = StaticDistribution(FOUR)
    for D in (2, 16, 256):
        P = min_precision_for_ratio(dist, D, 1.001)
        f = dist.scaled(P, D).frequencies()
        assert min(f) * (1.001 - 1) >= D * 1.001
        (pt,) = efficiency_sweep(dist, 50_000, [CoderConfig(D, max(P, 2))], seed=7)
        assert pt.leakage <= 0.0015


def test_small_n_dominated_by_header():
    data = b"abcdefghij"
    blob = compress(data, mode="static")
    r = info(blob)
    assert r["header_bytes"] == 19 + 4 + 4 * 256
    assert r["total_bits_per_symbol"] == 8 * (r["header_bytes"] + r["payload_bytes"]) / 10
    assert r["total_bits_per_symbol"] > 100 * r["payload_bits_per_symbol"]


def test_tsv_and_table(matrix_reports):
    tsv = format_tsv(matrix_reports).splitlines()
    assert tsv[0].split("\t") == list(COLUMNS)
    assert len(tsv) == 1 + len(matrix_reports)
    assert all(len(line.split("\t")) == len(COLUMNS) for line in tsv)
    table = format_table(matrix_reports)
    assert "static/lookup" in table


def test_acs_threads_caps_workers(monkeypatch):
    monkeypatch.setenv("ACS_THREADS", "1")
    assert bench._threads() == 1
    monkeypatch.setenv("ACS_THREADS", "junk")
    assert bench._threads() >= 1


def test_cli_bench(capsys, monkeypatch):
    monkeypatch.setenv("ACS_THREADS", "1")
    assert main(["bench", "-N", "2000", "--repeats", "1", "--strategy", "static/lookup", "--strategy", "tree", "-D", "16", "256"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("source\tstrategy")
    assert len(lines) == 5


def test_sweep_needs_enough_symbols():
    with pytest.raises(ValueError):
        efficiency_sweep(FOUR, 10, [CoderConfig()])
