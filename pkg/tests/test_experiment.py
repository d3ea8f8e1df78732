import json

import numpy as np
import pytest

from netenergy import GramianSpec, ValidationError, compute_centralities, ctrb_gramian, metrics
from netenergy.experiment import (PRESETS, ExperimentConfig, Outputs, emit_csv, load_config,
                                  realization_seed, run_experiment, run_realization)
from netenergy.netgraph import GeneratorParams, generate


def small_cfg(**kw):
    base = dict(generator=GeneratorParams("erdos_renyi", 15, edge_prob=0.25),
                realizations=3, m_grid=(2, 5, 9), strategies=("rank_quot", "trace_max"),
                base_seed=11)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    gen = GeneratorParams("erdos_renyi", 10, edge_prob=0.2)
    for bad in [dict(realizations=0), dict(m_grid=()), dict(m_grid=(3, 2)), dict(m_grid=(11,)),
                dict(strategies=("hubs",)), dict(strategies=()), dict(base_seed=-1),
                dict(outputs=Outputs(spectrum_at_m=True))]:
        with pytest.raises(ValidationError):
            ExperimentConfig(generator=gen, **{"m_grid": (1, 2), **bad})


def test_config_dict_roundtrip():
    for make in PRESETS.values():
        cfg = make()
        assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


@pytest.mark.parametrize("data", [
    {"generator": {"kind": "erdos_renyi", "n": 5}, "extra": 1},
    {"generator": {"kind": "erdos_renyi", "n": 5, "colour": 1}},
    {"generator": {"kind": "erdos_renyi", "n": 5}, "spec": {"horizon": "inf", "foo": 1}},
    {"generator": {"kind": "erdos_renyi", "n": 5}, "outputs": {"plots": True}},
    {"realizations": 3},
    [],
])
def test_config_rejects_unknown_keys(data):
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict(data)


def test_shipped_configs_load():
    import pathlib
    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    for name, make in PRESETS.items():
        assert load_config(root / f"{name}.json") == make()


def test_realization_seed():
    assert realization_seed(0, 5) == 5
    assert realization_seed(6, 3) == 5


def test_single_realization_echoes_network():
    cfg = small_cfg(realizations=1, m_grid=(1,), strategies=("trace_max",),
                    generator=GeneratorParams("directed_scale_free", 2))
    res = run_experiment(cfg)
    net = generate(GeneratorParams("directed_scale_free", 2, seed=realization_seed(11, 1)))
    t = compute_centralities(net, GramianSpec())
    best = int(np.argmax(t.p))
    m = metrics(ctrb_gramian(net, [best], GramianSpec()))
    assert res.mean_trace[0, 0] == m.trace_w
    assert res.mean_lambda_min[0, 0] == m.lambda_min
    assert res.mean_bound[0] == np.sort(t.q_tilde)[1]


def test_means_are_averages_of_records():
    cfg = small_cfg()
    res = run_experiment(cfg)
    recs = [run_realization(cfg, r) for r in range(1, 4)]
    np.testing.assert_allclose(res.mean_trace, sum(r.trace for r in recs) / 3, rtol=1e-15)
    np.testing.assert_allclose(res.mean_lambda_min, sum(r.lambda_min for r in recs) / 3, rtol=1e-15)
    assert np.all(res.mean_lambda_min >= 0)
    assert np.all(res.mean_lambda_min <= res.mean_bound + 1e-10)


def test_trace_max_dominates():
    cfg = small_cfg(strategies=("rank_diff", "rank_quot", "trace_max", "random"), realizations=4)
    res = run_experiment(cfg)
    best = res.curve("trace_max", "trace")
    for s in ("rank_diff", "rank_quot", "random"):
        assert np.all(best >= res.curve(s, "trace") * (1 - 1e-12))


def test_emit_csv_layout(tmp_path):
    cfg = small_cfg(outputs=Outputs(True, True, True), spectrum_m=4)
    paths = emit_csv(run_experiment(cfg), tmp_path)
    names = sorted(p.name for p in paths)
    assert names == ["centrality_profile.csv", "config.json", "metrics.csv", "spectrum_m4.csv"]
    rows = (tmp_path / "metrics.csv").read_text().splitlines()
    assert len(rows) == 1 + 2 * 3
    assert rows[1].startswith("rank_quot,2,")
    spec_rows = (tmp_path / "spectrum_m4.csv").read_text().splitlines()
    assert spec_rows[0] == "strategy,rank,mean_eigenvalue" and len(spec_rows) == 1 + 2 * 15
    prof = (tmp_path / "centrality_profile.csv").read_text().splitlines()
    assert prof[0] == "order_stat,mean_p,mean_q,mean_qtilde" and len(prof) == 16
    echo = json.loads((tmp_path / "config.json").read_text())
    assert echo["realizations"] == 3 and echo["config"]["base_seed"] == 11
    for p in paths:
        assert b"\r" not in p.read_bytes()


def test_emit_nothing_but_config(tmp_path):
    cfg = small_cfg(outputs=Outputs(False, False, False))
    paths = emit_csv(run_experiment(cfg), tmp_path)
    assert [p.name for p in paths] == ["config.json"]


def test_rerun_is_byte_identical(tmp_path):
    cfg = small_cfg(outputs=Outputs(True, True, True), spectrum_m=3,
                    strategies=("rank_diff", "random"))
    emit_csv(run_experiment(cfg), tmp_path / "a")
    emit_csv(run_experiment(cfg), tmp_path / "b")
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_parallel_equals_serial():
    cfg = small_cfg(strategies=("rank_diff", "random"), realizations=4)
    a = run_experiment(cfg, workers=1)
    b = run_experiment(cfg, workers=2)
    assert np.array_equal(a.mean_trace, b.mean_trace)
    assert np.array_equal(a.mean_lambda_min, b.mean_lambda_min)


def test_progress_callback():
    seen = []
    run_experiment(small_cfg(realizations=2), progress=seen.append)
    assert seen == [1, 2]
