import json

import pytest

from tasklens.cli import main
from tasklens.config import Config
from tasklens.report import (
    UnknownFormat,
    ZeroEvents,
    render_report,
    report_to_dict,
    run_pipeline,
)
from tasklens.synth import (
    EditMix,
    MODULE_TAG_CONFIG_YAML,
    edit_analysis_lines,
    feedback_lines,
    write_log,
)

SMALL_MIX = EditMix(
    fully=20, minor=6, minor_module=3, major=4, deleted=5,
    rejected=12, ignored=2, unresolved=3,
)


@pytest.fixture(scope="module")
def small_log(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("small")
    lines = edit_analysis_lines(SMALL_MIX, n_users=5)
    lines += feedback_lines(star_counts={5: 4, 3: 1, 1: 1},
                            negative_labels={"broken": 2},
                            positive_labels={"fast": 3})
    return write_log(tmp / "log.jsonl", lines)


@pytest.fixture(scope="module")
def small_report(small_log):
    return run_pipeline([small_log], Config())


class TestRunPipeline:
    def test_counts(self, small_report):
        acc = small_report.acceptance
        assert acc.total_suggestions == SMALL_MIX.total == 55
        assert acc.initially_accepted == SMALL_MIX.accepted == 41
        assert acc.fully_accepted == 20
        assert acc.minor_edits == 9
        assert acc.module_changed_minor == 3
        assert acc.major_edits == 4
        assert acc.deleted_after_accept == 5
        assert acc.unresolved == 3

    def test_accepted_breakdown_separates_module_changed(self, small_report):
        breakdown = small_report.accepted_breakdown
        assert breakdown["minor_edits"] == 6
        assert breakdown["module_changed_minor"] == 3
        assert breakdown["fully_accepted"] == 20

    def test_feedback_flows_through(self, small_report):
        assert small_report.feedback.total == 11
        assert small_report.feedback.negative_labels.counts == {"broken": 2}

    def test_zero_events(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("\n")
        with pytest.raises(ZeroEvents):
            run_pipeline([empty], Config())

    def test_window_filter_excludes_events(self, small_log):
        from datetime import date

        with pytest.raises(ZeroEvents):
            run_pipeline([small_log], Config(), window_end=date(2020, 1, 1))

    def test_every_count_reconstructible_from_log(self, small_log, small_report):
        """Independent recount of the raw JSONL, no library code."""
        by_type = {}
        users = set()
        stars = {s: 0 for s in range(1, 6)}
        with open(small_log) as handle:
            for line in handle:
                obj = json.loads(line)
                by_type[obj["type"]] = by_type.get(obj["type"], 0) + 1
                users.add(obj["user_id"])
                if obj["type"] == "feedback":
                    stars[obj["stars"]] += 1
        assert small_report.acceptance.total_suggestions == by_type["suggestion"]
        assert small_report.total_users == len(users)
        assert small_report.feedback.star_histogram == stars


class TestScaledDistribution:
    def test_one_percent_scale_matches_headline_shares(self, tmp_path):
        """Category shares at 1/100 scale stay within half a point of the
        full-scale targets."""
        mix = EditMix(
            fully=248, minor=57, minor_module=3, major=27, deleted=74, rejected=212
        )
        log = write_log(tmp_path / "scaled.jsonl", edit_analysis_lines(mix, n_users=8))
        report = run_pipeline([log], Config())
        acc = report.acceptance
        shares = {
            "fully": 100 * acc.fully_accepted / acc.initially_accepted,
            "minor": 100 * (acc.minor_edits - acc.module_changed_minor) / acc.initially_accepted,
            "major": 100 * acc.major_edits / acc.initially_accepted,
            "deleted": 100 * acc.deleted_after_accept / acc.initially_accepted,
        }
        targets = {"fully": 60.60, "minor": 13.85, "major": 6.62, "deleted": 18.16}
        for key, target in targets.items():
            assert abs(shares[key] - target) <= 0.5, (key, shares[key])


class TestTemporalRawVsDedup:
    def test_duplicates_inflate_only_raw_profile(self, tmp_path):
        lines = edit_analysis_lines(SMALL_MIX, n_users=5)
        # replay one completion line byte-identically except id and +1s
        obj = json.loads(next(l for l in lines if '"type":"completion"' in l))
        obj["event_id"] = "replay"
        obj["ts"] = obj["ts"][:18] + "9" + obj["ts"][19:]
        lines.append(json.dumps(obj))
        log = write_log(tmp_path / "dup.jsonl", lines)
        report = run_pipeline([log], Config())
        raw_total = sum(report.temporal_raw.daily_counts.values())
        dedup_total = sum(report.temporal_dedup.daily_counts.values())
        assert raw_total == dedup_total + 1
        assert report.data_quality.duplicates_removed == 1


class TestDeterminism:
    def test_repeat_runs_byte_identical(self, small_log):
        first = render_report(run_pipeline([small_log], Config()), "json")
        second = render_report(run_pipeline([small_log], Config()), "json")
        assert first == second

    def test_parallel_equals_serial(self, small_log):
        serial = render_report(run_pipeline([small_log], Config(), workers=1), "json")
        parallel = render_report(run_pipeline([small_log], Config(), workers=4), "json")
        assert serial == parallel


class TestRendering:
    def test_json_shape_and_formatting(self, small_report):
        blob = render_report(small_report, "json")["report.json"]
        doc = json.loads(blob)
        assert doc["acceptance"]["initial_rate"] == round(
            100 * small_report.acceptance.initial_rate, 2
        )
        assert '"initial_rate": ' in blob.decode()
        assert doc["data_quality"]["unresolved_outcomes"] == 3

    def test_csv_one_file_per_section(self, small_report):
        files = render_report(small_report, "csv")
        assert {
            "summary.csv", "acceptance.csv", "accepted_breakdown.csv",
            "minor_edit_breakdown.csv", "module_edit_tags.csv", "retention.csv",
            "temporal_daily.csv", "temporal_weekday.csv", "feedback_stars.csv",
            "feedback_labels.csv", "data_quality.csv",
        } == set(files)
        acceptance = files["acceptance.csv"].decode().splitlines()
        assert acceptance[0] == "metric,value"
        assert any(row.startswith("total_suggestions,55") for row in acceptance)

    def test_table_renders_sections(self, small_report):
        text = render_report(small_report, "table")["report.txt"].decode()
        assert "Acceptance (returning-user cohort)" in text
        assert "Retention" in text
        assert "Data quality" in text

    def test_unknown_format(self, small_report):
        with pytest.raises(UnknownFormat):
            render_report(small_report, "xml")

    def test_report_dict_is_json_stable(self, small_report):
        doc1 = json.dumps(report_to_dict(small_report))
        doc2 = json.dumps(report_to_dict(small_report))
        assert doc1 == doc2


class TestCli:
    def test_ingest(self, small_log, capsys):
        assert main(["ingest", "--events", str(small_log)]) == 0
        out = capsys.readouterr().out
        assert "events" in out and "duplicates" in out

    def test_analyze_prints_table(self, small_log, capsys):
        assert main(["analyze", "--events", str(small_log)]) == 0
        assert "Acceptance" in capsys.readouterr().out

    def test_report_json_stdout(self, small_log, capsys):
        assert main(["report", "--events", str(small_log), "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["acceptance"]["total_suggestions"] == 55

    def test_report_csv_to_dir(self, small_log, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert main(
            ["report", "--events", str(small_log), "--format", "csv", "--out", str(out_dir)]
        ) == 0
        assert (out_dir / "acceptance.csv").exists()

    def test_report_csv_without_out_is_usage_error(self, small_log):
        with pytest.raises(SystemExit) as err:
            main(["report", "--events", str(small_log), "--format", "csv"])
        assert err.value.code == 1

    def test_missing_events_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["analyze"])
        assert err.value.code == 1

    def test_missing_file_is_data_error(self, capsys):
        assert main(["analyze", "--events", "/nonexistent.jsonl"]) == 2

    def test_empty_log_is_data_error(self, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert main(["analyze", "--events", str(empty)]) == 2

    def test_config_flag(self, small_log, tmp_path, capsys):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text(MODULE_TAG_CONFIG_YAML)
        assert main(["analyze", "--events", str(small_log), "--config", str(cfg)]) == 0

    def test_bad_config_is_data_error(self, small_log, tmp_path, capsys):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("minor_major_threshold: 7\n")
        assert main(["analyze", "--events", str(small_log), "--config", str(cfg)]) == 2

    def test_window_flags(self, small_log, capsys):
        assert main(
            ["analyze", "--events", str(small_log),
             "--window-start", "2023-05-01", "--window-end", "2023-12-31"]
        ) == 0

    def test_workers_flag(self, small_log, capsys):
        assert main(["analyze", "--events", str(small_log), "--workers", "3"]) == 0
