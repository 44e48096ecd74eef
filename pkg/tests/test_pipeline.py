from __future__ import annotations

import json

import jsonschema
import pytest

from clone_lattice import REPORT_SCHEMA
from clone_lattice.errors import EmptyCorpus
from clone_lattice.pipeline import PipelineConfig, emit_report, parse_corpus, run_pipeline

from conftest import FP_SEEDED, MICRO


@pytest.fixture(scope="module")
def schema():
    return json.loads(REPORT_SCHEMA.read_text())


def test_micro_corpus_size():
    parsed = parse_corpus(MICRO)
    assert len(parsed.trees) >= 10
    assert parsed.errors == []


def test_report_validates(schema):
    for cfg in (
        PipelineConfig(MICRO),
        PipelineConfig(MICRO, slicing=False),
        PipelineConfig(FP_SEEDED, similarity=0.70),
    ):
        jsonschema.validate(run_pipeline(cfg).to_dict(), schema)


def test_report_fields():
    report = run_pipeline(PipelineConfig(MICRO, similarity=1.0))
    stats = report.stats
    assert stats["clone_pairs"] == sum(len(c["pairs"]) for c in report.clusters)
    assert stats["false_positives_remaining"] == 0
    assert report.config["similarity"] == 1.0
    assert report.slices_per_function["fixtures.c:fe_spec_loop1"] == 2
    for c in report.clusters:
        ids = {m["slice_id"] for m in c["members"]}
        assert all(a in ids and b in ids for a, b in c["pairs"])
        for m in c["members"]:
            assert 1 <= m["span"]["line_start"] <= m["span"]["line_end"]


def test_no_slicing_has_no_verification():
    report = run_pipeline(PipelineConfig(MICRO, slicing=False))
    assert report.verdicts == [] and report.convergence == []
    assert all(m["pointer"] is None for c in report.clusters for m in c["members"])


def test_bad_files_are_reported_not_fatal(tmp_path):
    (tmp_path / "good.c").write_text("void f(int *p, int n) { int i; for (i = 0; i < n; i++) p[i] = 0; }\n")
    (tmp_path / "bad.c").write_text("void g(int x) { goto out; }\n")
    report = run_pipeline(PipelineConfig(tmp_path, min_tokens=0))
    assert report.files == ["good.c"]
    assert report.errors[0]["file"] == "bad.c" and report.errors[0]["line"] == 1


def test_empty_corpus(tmp_path):
    with pytest.raises(EmptyCorpus):
        run_pipeline(PipelineConfig(tmp_path))
    with pytest.raises(EmptyCorpus):
        run_pipeline(PipelineConfig(tmp_path / "missing"))


@pytest.mark.parametrize(
    "kwargs",
    [{"similarity": 0.5}, {"min_tokens": -1}, {"unroll_bound": 0}, {"max_iterations": 0}, {"delta_init": 1.0}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        PipelineConfig(MICRO, **kwargs)


def test_emit_report_writes_file(tmp_path):
    report = run_pipeline(PipelineConfig(FP_SEEDED, similarity=0.70))
    out = tmp_path / "r.json"
    emit_report(report, out)
    assert out.read_text() == report.to_json()
    assert json.loads(out.read_text())["schema_version"] == "1.0"
