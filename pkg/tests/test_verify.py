import json

import numpy as np
import pytest

from matrel.matcalc import min_eigenvalue, op_norm
from matrel.relations import check_all, parse_relations
from matrel.verify import (
    DEFAULT_POSITIVITY_RELATIONS,
    Ensemble,
    ExperimentReport,
    clock_shift_pair,
    commutator_ratio,
    commutator_sqrt_search,
    exp_norm_experiment,
    heinz_experiment,
    monotone_experiment,
    positivity_transfer_check,
    soft_torus_relations,
    stream,
    write_reports,
)


def _strip_runtime(report):
    data = json.loads(report.to_json())
    data.pop("runtime_ms")
    return data


def test_stream_is_keyed_by_seed_index_role():
    a = stream(5, 0, 0).standard_normal(4)
    b = stream(5, 0, 0).standard_normal(4)
    c = stream(5, 1, 0).standard_normal(4)
    d = stream(5, 0, 1).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_ensemble_kinds_have_declared_shape():
    for kind, check in (
        ("hermitian", lambda m: np.allclose(m, m.conj().T)),
        ("positive", lambda m: min_eigenvalue(m) >= -1e-10),
        ("contraction", lambda m: op_norm(m) <= 1.0 + 1e-12),
        ("unitary", lambda m: np.allclose(m @ m.conj().T, np.eye(5), atol=1e-10)),
    ):
        e = Ensemble(kind, 5, seed=7, count=4)
        for m in e:
            assert m.shape == (5, 5)
            assert check(m), kind


def test_order_pair_ensemble():
    e = Ensemble("order-pair", 4, seed=9, count=6)
    for x, y in e:
        assert min_eigenvalue(y - x) >= -1e-10
        assert np.allclose(x, x.conj().T)


def test_ensemble_draw_is_replayable():
    e = Ensemble("general", 4, seed=11, count=3)
    m0 = e.draw(2)
    m1 = e.draw(2)
    assert np.array_equal(m0, m1)
    with pytest.raises(ValueError):
        Ensemble("squirrel", 4, seed=1, count=1)


def test_exp_norm_experiment_passes_and_is_deterministic():
    e = Ensemble("general", 5, seed=42, count=50)
    rep = exp_norm_experiment(e)
    again = exp_norm_experiment(e)
    assert rep.passed
    assert rep.max_violation <= 1e-9
    assert rep.samples == 50
    assert _strip_runtime(rep) == _strip_runtime(again)
    assert rep.worst_seed["seed"] == 42


def test_heinz_experiment_endpoints_exact():
    e = Ensemble("general", 4, seed=8, count=25)
    rep = heinz_experiment(e)
    assert rep.passed
    assert rep.max_violation <= 1e-8
    assert rep.stats["endpoint_gap"] <= 1e-10
    assert len(rep.stats["grid"]) == 11
    assert rep.stats["grid"][0] == 0.0 and rep.stats["grid"][-1] == 1.0


def test_monotone_experiment_split_by_power():
    e = Ensemble("order-pair", 3, seed=13, count=120)
    half = monotone_experiment(0.5, e)
    assert half.passed and half.max_violation <= 1e-8
    full = monotone_experiment(1.0, e)
    assert full.passed
    square = monotone_experiment(2.0, Ensemble("order-pair", 2, seed=14, count=150))
    assert square.threshold is None  # exploratory, squaring is not monotone
    assert square.max_violation > 1e-3


def test_squaring_refutation_pair():
    x = np.array([[1.0, 1.0], [1.0, 1.0]])
    y = np.array([[2.0, 1.0], [1.0, 1.0]])
    assert min_eigenvalue(y - x) >= -1e-15
    gap = min_eigenvalue(y @ y - x @ x)
    assert abs(gap - (3.0 - np.sqrt(13.0)) / 2.0) < 1e-12
    assert gap < -0.3


def test_commutator_ratio_basics():
    a = np.array([[0.0, -1.0], [-1.0, 0.0]])
    b = np.diag([1.0, 0.0])
    # b is a projection so its square root is itself and the ratio is
    # exactly the square root of the commutator norm, which is one here
    assert abs(commutator_ratio(a, b) - 1.0) < 1e-12
    assert commutator_ratio(a, np.eye(2)) is None


def test_commutator_ratio_scale_invariance():
    rng = np.random.default_rng(77)
    for _ in range(10):
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        c = rng.standard_normal((3, 3))
        a = (g + g.conj().T) / 2
        b = c @ c.T + 1e-3 * np.eye(3)
        r = commutator_ratio(a, b)
        for s in (0.25, 2.0, 7.3):
            assert abs(commutator_ratio(a, s * b) - r) < 1e-10 * max(1.0, r)


def test_search_is_deterministic_and_monotone():
    rep1 = commutator_sqrt_search(2, seed=505, budget=600)
    rep2 = commutator_sqrt_search(2, seed=505, budget=600)
    assert _strip_runtime(rep1) == _strip_runtime(rep2)
    assert rep1.samples == 600
    trace = rep1.stats["trace"]
    best = 0.0
    for evals, value in trace:
        assert value >= best
        best = value
    assert rep1.max_violation == best
    assert rep1.threshold is None


def test_search_best_pair_replays():
    rep = commutator_sqrt_search(3, seed=9090, budget=400)
    st = rep.stats
    g = np.array(st["best_g"]) + 1j * np.array(st["best_g_imag"])
    c = np.array(st["best_c"]) + 1j * np.array(st["best_c_imag"])
    a = g / op_norm(g)
    b = c.conj().T @ c
    b = b / op_norm(b)
    assert abs(commutator_ratio(a, b) - rep.max_violation) < 1e-12


def test_search_pair_stream_mode():
    pairs = [
        (np.array([[0.0, -1.0], [-1.0, 0.0]]), np.array([[-1.0, 0.0], [-1.0, 0.0]])),
        (np.array([[1.0, 0.0], [0.0, -1.0]]), np.array([[1.0, 1.0], [0.0, 0.0]])),
    ]
    rep = commutator_sqrt_search(2, seed=0, budget=10, pair_stream=iter(pairs))
    assert rep.stats["mode"] == "stream"
    assert rep.samples == 2
    assert abs(rep.max_violation - 1.0) < 1e-12


def test_positivity_transfer_default_relations_pass():
    rep = positivity_transfer_check(DEFAULT_POSITIVITY_RELATIONS,
                                    dims=(2, 3), seed=606, count=20)
    assert rep.passed
    assert rep.max_violation <= 1e-8
    assert rep.samples == 40  # count draws per dimension


def test_positivity_transfer_catches_false_claims():
    bad = "var x;\nvar y;\nrel x y >= 0;\n"
    rep = positivity_transfer_check(bad, dims=(3,), seed=1, count=10)
    assert not rep.passed
    assert rep.max_violation > 1e-8
    assert "dim" in rep.worst_seed


def test_clock_shift_pair_against_soft_torus_file():
    for dim in (2, 4, 8, 16):
        eps = 2.0 * np.sin(np.pi / dim)
        pair = clock_shift_pair(dim)
        _, loose = parse_relations(soft_torus_relations(eps + 1e-10))
        assert check_all(loose, pair).satisfied
        _, tight = parse_relations(soft_torus_relations(eps - 1e-3))
        assert not check_all(tight, pair).satisfied


def test_report_json_and_file_output(tmp_path):
    rep = ExperimentReport(id="demo", params={"dim": 2}, samples=3,
                           max_violation=0.5, worst_seed={"seed": 1},
                           runtime_ms=1.25, threshold=1.0)
    data = json.loads(rep.to_json())
    assert data["id"] == "demo" and data["passed"] is True
    failing = ExperimentReport(id="demo2", params={}, samples=1,
                               max_violation=2.0, worst_seed={},
                               runtime_ms=0.5, threshold=1.0)
    assert not failing.passed
    out = tmp_path / "reports.jsonl"
    write_reports(out, [rep, failing])
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1])["passed"] is False
