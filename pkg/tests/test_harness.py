import numpy as np
import pytest

from ising_mcp.dynamics import AnnealSchedule, IntegratorConfig, ModelKind
from ising_mcp.errors import IsingError, ModelAbsentError
from ising_mcp.harness import (GraphSource, ModelSummary, PortfolioReport, TrialRecord, TrialSpec, build_manifest,
                               canonical_spin_hash, emit_histogram, energy_key, run_portfolio, spec_from_manifest,
                               trial_seed)

BOTH = (ModelKind.DIM, ModelKind.OIM)


def make_spec(source, n_trials=4, models=BOTH, base_seed=1, workers=1):
    return TrialSpec(
        graph_source=source,
        models=models,
        n_trials=n_trials,
        base_seed=base_seed,
        schedule=AnnealSchedule.linear_ramp(K=1.0, ks_max=4.0, t_end=20.0),
        integrator=IntegratorConfig(dt=0.01, noise_amplitude=0.05, record_stride=100),
        workers=workers,
    )


def record(trial_id, H, cut):
    return TrialRecord(trial_id=trial_id, H=H, cut=cut, spin_hash="x", initial_digest="y")


def test_trial_seeds_are_stable_and_distinct():
    assert trial_seed(7, 3, 0) == trial_seed(7, 3, 0)
    seeds = {trial_seed(7, t, s) for t in range(20) for s in (0, 1)}
    assert len(seeds) == 40


def test_spin_hash_ignores_a_global_flip():
    s = np.array([1, -1, -1, 1], dtype=np.int8)
    assert canonical_spin_hash(s) == canonical_spin_hash(-s)
    assert canonical_spin_hash(s) != canonical_spin_hash(np.array([1, 1, -1, 1], dtype=np.int8))


def test_energy_key():
    assert energy_key(-3.0) == -3
    assert isinstance(energy_key(-3.0), int)
    assert energy_key(-2.1234567891) == pytest.approx(-2.123456789)


def test_graph_source_variants(pair_file):
    assert GraphSource(path=str(pair_file)).load().m == 1
    assert GraphSource(text="2 1\n1 2 1\n").load().m == 1
    generated = GraphSource(nodes=10, edges=12, seed=3)
    assert generated.load().m == 12
    assert GraphSource.from_dict({**generated.to_dict(), "n": 10, "digest": "abc"}) == generated
    with pytest.raises(IsingError):
        GraphSource()
    with pytest.raises(IsingError):
        GraphSource(path="a", nodes=3)


def test_spec_validation():
    with pytest.raises(IsingError):
        make_spec(GraphSource(nodes=3, edges=2), n_trials=0)
    with pytest.raises(IsingError):
        make_spec(GraphSource(nodes=3, edges=2), models=())
    assert make_spec(GraphSource(nodes=3, edges=2), models=("dim",)).models == (ModelKind.DIM,)


def test_two_node_portfolio_always_cuts_the_edge(pair_file):
    report = run_portfolio(make_spec(GraphSource(path=str(pair_file)), n_trials=10))
    for model in BOTH:
        summary = report.models[model]
        assert [r.H for r in summary.trials] == [-1.0] * 10
        assert summary.best_cut == 1.0
        assert summary.success_count == 10
        assert emit_histogram(report, model) == {-1: 10}
    assert report.portfolio_best_cut == 1.0
    assert report.preferred_model == "tie"


def test_models_share_initial_conditions():
    report = run_portfolio(make_spec(GraphSource(nodes=8, edges=14, seed=2), n_trials=5))
    dim, oim = report.models[ModelKind.DIM], report.models[ModelKind.OIM]
    assert [r.initial_digest for r in dim.trials] == [r.initial_digest for r in oim.trials]
    assert len({r.initial_digest for r in dim.trials}) == 5
    assert [r.trial_id for r in dim.trials] == list(range(5))


def test_portfolio_invariants_and_determinism():
    spec = make_spec(GraphSource(nodes=10, edges=20, seed=5), n_trials=6)
    first = run_portfolio(spec)
    second = run_portfolio(spec)
    assert first == second
    for model, summary in first.models.items():
        assert first.portfolio_best_cut >= summary.best_cut
        assert sum(emit_histogram(first, model).values()) == 6
        for r in summary.trials:
            assert r.cut == pytest.approx((20 - r.H) / 2)


def test_workers_do_not_change_the_report():
    spec = make_spec(GraphSource(nodes=10, edges=20, seed=5), n_trials=4)
    pooled = make_spec(GraphSource(nodes=10, edges=20, seed=5), n_trials=4, workers=2)
    assert run_portfolio(spec).models == run_portfolio(pooled).models


def test_single_trial_portfolio(pair_file):
    report = run_portfolio(make_spec(GraphSource(path=str(pair_file)), n_trials=1))
    assert report.portfolio_best_cut == max(s.trials[0].cut for s in report.models.values())


def test_emit_histogram_for_absent_model():
    spec = make_spec(GraphSource(nodes=5, edges=4, seed=0), n_trials=2, models=(ModelKind.DIM,))
    with pytest.raises(ModelAbsentError):
        emit_histogram(run_portfolio(spec), ModelKind.OIM)


def test_preferred_model_counts_hits_at_the_portfolio_best():
    dim = ModelSummary(ModelKind.DIM, (record(0, -5.0, 7.0), record(1, -5.0, 7.0), record(2, -3.0, 6.0)))
    oim = ModelSummary(ModelKind.OIM, (record(0, -5.0, 7.0), record(1, -3.0, 6.0), record(2, -3.0, 6.0)))
    report = PortfolioReport(manifest={}, models={ModelKind.DIM: dim, ModelKind.OIM: oim})
    assert report.preferred_model == "dim"
    assert dim.histogram == {-5: 2, -3: 1}
    lagging = ModelSummary(ModelKind.OIM, (record(0, -3.0, 6.0),) * 3)
    report = PortfolioReport(manifest={}, models={ModelKind.DIM: dim, ModelKind.OIM: lagging})
    assert report.preferred_model == "dim"
    assert lagging.success_count == 3


def test_manifest_rebuilds_the_spec():
    spec = make_spec(GraphSource(nodes=9, edges=11, seed=4), n_trials=3)
    g = spec.graph_source.load()
    manifest = build_manifest(spec, g)
    assert manifest["graph"]["digest"] == g.digest
    assert manifest["models"] == ["dim", "oim"]
    assert spec_from_manifest(manifest) == spec
