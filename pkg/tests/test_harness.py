import math
import re

import pytest

from bds_lab.concept_class import ConceptClass, full_class
from bds_lab.harness.bounds import binomial_slack, chernoff_lower_tail, exp_dim_bound, loo_bound, sauer_bound
from bds_lab.harness.config import CONFIG_SCHEMA, CorpusEntry, CorpusSpec, ExperimentConfig, corpus_entries
from bds_lab.harness.runtime import config_hash, derive_seed, mapper, worker_count
from bds_lab.harness.svg import PlotSpec, render_svg
from bds_lab.harness.sweep import COLUMNS, read_csv, sweep_rows, sweep_sample_complexity
from bds_lab.harness import verify as V


def test_chernoff_examples():
    assert chernoff_lower_tail(100, 0.5) == pytest.approx(math.exp(-12.5))
    assert chernoff_lower_tail(100, 1e-9) == pytest.approx(1.0)
    vals = [chernoff_lower_tail(mu, 0.3) for mu in (1, 10, 100)]
    assert vals == sorted(vals, reverse=True)
    for bad in ((0, 0.5), (10, 0), (10, 1), (-1, 0.5)):
        with pytest.raises(ValueError):
            chernoff_lower_tail(*bad)


def test_bound_formulas():
    assert exp_dim_bound(2, 3) == pytest.approx(12 * math.log2(3))
    assert sauer_bound(2, 3, 2, 2) == pytest.approx((math.e * 3) ** 2)
    assert sauer_bound(3, 4, 3, 1) == pytest.approx(2 ** 2 * math.e * 12)
    assert loo_bound(1, 4, 4) == pytest.approx(3.0)
    assert binomial_slack(0.2, 200) == pytest.approx(3 * math.sqrt(0.16 / 200))
    assert 0.2 + binomial_slack(0.2, 200) == pytest.approx(0.285, abs=1e-3)


def test_spec_examples_for_corpus_checks():
    full = full_class(2, 3)
    # L = 2: d_E = 2 <= 6 * DS_1 * log2 3 and |H|_S| = 9 <= Sauer value
    entry_cases = V.exp_ds_cases(_Fixed(full))
    assert all(c["passed"] for c in entry_cases)
    sauer = V.sauer_cases(_Fixed(full))
    l2 = [c for c in sauer if c["case"].endswith("L2")][0]
    assert l2["passed"] and l2["sets_checked"] == 3
    assert 9 <= sauer_bound(2, 3, 2, 2)
    single = ConceptClass.build(3, 2, [(2, 2)])
    assert all(c["lhs"] == 0 and c["relation"] == "==" for c in V.exp_ds_cases(_Fixed(single)))
    assert all(c.get("skipped") for c in V.sauer_cases(_Fixed(single)))
    loo = V.loo_cases((_Fixed(single), CorpusSpec(loo_samples=4)))
    assert loo and all(c["passed"] and c["lhs"] == "0" for c in loo)


class _Fixed(CorpusEntry):
    """A corpus entry wrapping a given class."""

    def __init__(self, cls):
        object.__setattr__(self, "_cls", cls)
        super().__init__(0, cls.n, cls.k, len(cls), 0)

    def build(self):
        return self._cls


def test_corpus_is_deterministic_and_within_caps():
    spec = CorpusSpec(size=200, seed=3)
    a, b = corpus_entries(spec), corpus_entries(spec)
    assert a == b
    assert all(2 <= e.k <= 6 and 1 <= e.n <= 4 and 1 <= e.count <= e.k ** e.n for e in a)


def test_small_corpus_suites_pass_and_repro_format():
    spec = CorpusSpec(size=25, seed=9)
    for fn in (V.verify_exp_ds, V.verify_sauer, V.verify_loo):
        rep = fn(spec)
        assert rep.ok and rep.cases
        d = rep.to_dict()
        assert d["counts"]["failed"] == 0 and d["corpus"]["entries"] == 25
    single = V.verify_loo(spec, case=7)
    assert {c["class"]["index"] for c in single.cases} == {7}
    assert V._repro("loo", spec, 7).endswith("--case 7")


def test_failing_case_carries_repro(monkeypatch):
    monkeypatch.setattr(V, "exp_dim_bound", lambda d, K: -1.0)
    monkeypatch.setitem(V._SUITES, "exp-ds", V.exp_ds_cases)
    rep = V.verify_exp_ds(CorpusSpec(size=5, seed=0))
    failing = [c for c in rep.cases if not c["passed"]]
    assert failing and not rep.ok
    assert all(c["repro"].startswith("bds-lab verify --suite exp-ds") for c in failing)
    assert len(rep.cases) > len(failing) or rep.failed == len(rep.cases)


def test_cascade_suite_small():
    cfg = ExperimentConfig(trials=20)
    rep = V.verify_cascade_pac(cfg)
    assert rep.ok
    assert rep.extra["schedule"]["K"] == 4
    assert len(rep.extra["chernoff"]) == 2


def test_cascade_suite_singleton_success():
    cfg = ExperimentConfig.from_dict({"class": {"full": {"n": 1, "k": 2}}, "trials": 10, "scale": 0.01})
    rep = V.verify_cascade_pac(cfg)
    assert rep.ok


def test_lower_bound_suite_small():
    rep = V.verify_lower_bound(V.LowerBoundConfig(trials=200, two_point_trials=500))
    oracle = [c for c in rep.cases if c["case"] == "oracle/restricted_error"][0]
    assert oracle["excluded"] and oracle["passed"]
    assert rep.ok


def test_config_schema_validation():
    with pytest.raises(Exception):
        ExperimentConfig.from_dict({"epsilon": 2})
    with pytest.raises(Exception):
        ExperimentConfig.from_dict({"unknown": 1})
    cfg = ExperimentConfig.from_dict({"epsilon": 0.2, "corpus": {"size": 3}})
    assert cfg.epsilon == 0.2 and cfg.corpus.size == 3
    assert CONFIG_SCHEMA["additionalProperties"] is False


def test_resolved_config_hashes_file_content(tmp_path):
    from bds_lab.concept_class import save

    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save(full_class(2, 2), p1)
    save(full_class(2, 2), p2)
    h1 = config_hash(ExperimentConfig(class_source=str(p1), environment=None).resolved())
    h2 = config_hash(ExperimentConfig(class_source=str(p2), environment=None).resolved())
    assert h1 == h2


def test_worker_count_cap(monkeypatch):
    monkeypatch.setenv("BDS_LAB_THREADS", "2")
    assert worker_count(8) == 2
    assert worker_count(1) == 1
    monkeypatch.delenv("BDS_LAB_THREADS")
    assert worker_count(3) == 3


def test_parallel_map_matches_serial():
    with mapper(1) as m1, mapper(2) as m2:
        assert list(m1(abs, range(-5, 5))) == list(m2(abs, range(-5, 5)))
    assert derive_seed(1, 2) == derive_seed(1, 2) != derive_seed(1, 3)


def _sweep_cfg(**kw):
    base = {"trials": 30, "epsilons": [0.3, 0.1], "scales": [0.01, 0.001, 0.003]}
    base.update(kw)
    return ExperimentConfig.from_dict(base)


def test_sweep_csv_shape_and_determinism():
    cfg = _sweep_cfg()
    text = sweep_sample_complexity(cfg)
    assert text == sweep_sample_complexity(cfg)
    with mapper(2) as m:
        assert text == sweep_sample_complexity(cfg, m)
    lines = text.splitlines()
    assert re.fullmatch(r"# bds-lab sweep config_sha256=[0-9a-f]{64} seed=0", lines[0])
    comments, header, rows = read_csv(text)
    assert tuple(header) == COLUMNS and len(rows) == 6
    keys = [(float(r["epsilon"]), int(r["budget"])) for r in rows]
    assert keys == sorted(keys)


def test_sweep_singleton_error_zero():
    cfg = ExperimentConfig.from_dict({"class": {"random": {"n": 2, "k": 3, "count": 1, "seed": 0}},
                                      "trials": 5, "epsilons": [0.1, 0.2], "scales": [0.001]})
    assert all(r.error_mean == 0 for r in sweep_rows(cfg))


def test_sweep_error_non_increasing_in_budget():
    cfg = _sweep_cfg(trials=60)
    rows = sweep_rows(cfg)
    for eps in (0.1, 0.3):
        series = [r for r in rows if r.epsilon == eps]
        for a, b in zip(series, series[1:]):
            # 3-sigma allowance on the difference of two means of [0, 1] variables
            assert b.error_mean <= a.error_mean + 3 * math.sqrt(2 * 0.25 / cfg.trials)


CSV2 = "# meta\nepsilon,budget,error_mean\n0.1,10,0.5\n0.1,100,0.2\n0.3,10,0.4\n0.3,100,0.1\n"


def test_svg_two_series_two_paths_and_metadata():
    svg = render_svg(CSV2, PlotSpec())
    assert svg.count("<path") == 2
    assert "<!-- meta -->" in svg
    assert svg == render_svg(CSV2, PlotSpec())


def test_svg_empty_is_axes_only():
    svg = render_svg("# meta\nepsilon,budget,error_mean\n", PlotSpec())
    assert svg.count("<path") == 0 and svg.count('class="axis"') == 2
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_svg_log_y_drops_zeros():
    text = "epsilon,budget,error_mean\n0.1,10,0\n0.1,100,0.2\n"
    svg = render_svg(text, PlotSpec(logy=True))
    d = re.search(r'<path d="([^"]*)"', svg).group(1)
    assert d.count("L") == 0  # one surviving point
    svg = render_svg(text, PlotSpec())
    assert re.search(r'<path d="([^"]*)"', svg).group(1).count("L") == 1


def test_svg_is_well_formed_xml():
    import xml.etree.ElementTree as ET

    ET.fromstring(render_svg("# a -- b\n" + CSV2.split("\n", 1)[1], PlotSpec(title="t & u")))


def test_png_figure(tmp_path):
    from bds_lab.harness.figures import render_png

    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render_png(CSV2, a)
    render_png(CSV2, b)
    assert a.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert a.read_bytes() == b.read_bytes()
