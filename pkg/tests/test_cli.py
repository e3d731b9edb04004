import csv
import json
import os

import pytest

from decontext.cli import main
from decontext.corpus import example_to_dict
from conftest import ann, make_example, write_jsonl


@pytest.fixture
def dataset_path(tmp_path, swift_example):
    other = make_example(
        id="plain",
        page_title="Weather",
        sentences=("Intro .", "It is fine ."),
        target_index=1,
        annotations=(
            ann("UNNECESSARY", "It is fine ."),
            ann("FEASIBLE", "The weather is fine ."),
            ann("FEASIBLE", "The day is fine ."),
        ),
    )
    records = [example_to_dict(swift_example), example_to_dict(other)]
    return write_jsonl(tmp_path / "examples.jsonl", records)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


class TestEvaluateCommand:
    def test_repeat_baseline(self, dataset_path, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(
            [
                "evaluate",
                "--examples",
                dataset_path,
                "--baseline",
                "repeat",
                "--out-dir",
                str(out),
            ]
        )
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert report["pct_edited"] == 0.0
        assert report["length_increase"] == 0.0
        rows = read_csv(out / "per_example.csv")
        assert rows[0][0] == "id"
        assert len(rows) == 3
        manifest = json.loads((out / "manifest.json").read_text())
        assert dataset_path in manifest["inputs"]

    def test_predictions_file(self, dataset_path, tmp_path):
        preds = write_jsonl(
            tmp_path / "preds.jsonl",
            [
                {
                    "example_id": "swift",
                    "raw": "FEASIBLE [SEP] Taylor Swift sang the lead single at the awards show .",
                },
                {"example_id": "plain", "raw": "UNNECESSARY [SEP] It is fine ."},
            ],
        )
        out = tmp_path / "out"
        rc = main(
            ["evaluate", "--examples", dataset_path, "--predictions", preds, "--out-dir", str(out)]
        )
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert report["match_all"] == 1.0

    def test_missing_predictions_arg_is_usage_error(self, dataset_path, tmp_path):
        rc = main(["evaluate", "--examples", dataset_path, "--out-dir", str(tmp_path / "o")])
        assert rc == 2

    def test_data_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{broken\n")
        rc = main(
            ["evaluate", "--examples", str(bad), "--baseline", "repeat", "--out-dir", str(tmp_path / "o")]
        )
        assert rc == 1

    def test_determinism(self, dataset_path, tmp_path):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        for out in (out1, out2):
            main(
                ["evaluate", "--examples", dataset_path, "--baseline", "repeat", "--out-dir", str(out)]
            )
        assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
        assert (out1 / "per_example.csv").read_bytes() == (out2 / "per_example.csv").read_bytes()


class TestRewriteCorefCommand:
    def test_rewrite(self, dataset_path, tmp_path, swift_example, capsys):
        from decontext.coref import assembled_tokens

        tokens = assembled_tokens(swift_example)

        def span(phrase, start=0):
            words = phrase.split()
            for i in range(start, len(tokens) - len(words) + 1):
                if tokens[i : i + len(words)] == words:
                    return [i, i + len(words)]
            raise AssertionError(phrase)

        clusters = write_jsonl(
            tmp_path / "clusters.jsonl",
            [
                {
                    "example_id": "swift",
                    "clusters": [[span("Taylor Swift"), span("She")]],
                }
            ],
        )
        out = tmp_path / "preds.jsonl"
        rc = main(
            ["rewrite-coref", "--examples", dataset_path, "--clusters", clusters, "--out", str(out)]
        )
        assert rc == 0
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        by_id = {r["example_id"]: r["raw"] for r in lines}
        assert by_id["swift"].startswith("FEASIBLE [SEP] Taylor Swift sang")
        assert by_id["plain"].startswith("UNNECESSARY [SEP]")
        assert "50.0% modified" in capsys.readouterr().out


@pytest.fixture
def corpus_paths(tmp_path):
    corpus = write_jsonl(
        tmp_path / "corpus.jsonl",
        [
            {
                "doc_id": "d1",
                "title": "Doc One",
                "paragraphs": [["Ann won a prize .", "She was happy ."]],
            },
            {
                "doc_id": "d2",
                "title": "Doc Two",
                "paragraphs": [["Rain fell all day ."]],
            },
        ],
    )
    questions = write_jsonl(
        tmp_path / "questions.jsonl",
        [{"qid": "q1", "question": "who won a prize", "answers": ["Ann"]}],
    )
    dmap = write_jsonl(
        tmp_path / "map.jsonl",
        [{"doc_id": "d1", "para": 0, "sent": 1, "text": "Ann was happy ."}],
    )
    return corpus, questions, dmap


class TestBuildCorpusCommand:
    def test_writes_per_strategy_files(self, corpus_paths, tmp_path):
        corpus, _, dmap = corpus_paths
        out = tmp_path / "passages"
        rc = main(
            [
                "build-corpus",
                "--corpus",
                corpus,
                "--decontext-map",
                dmap,
                "--out-dir",
                str(out),
            ]
        )
        assert rc == 0
        for name in ("paragraph", "window100", "sentence", "decontext_sentence"):
            assert (out / f"passages_{name}.jsonl").exists()
        dec = [
            json.loads(l)
            for l in (out / "passages_decontext_sentence.jsonl").read_text().splitlines()
        ]
        assert any("Ann was happy" in r["text"] for r in dec)


class TestRetrieveBenchCommand:
    def test_end_to_end(self, corpus_paths, tmp_path):
        corpus, questions, dmap = corpus_paths
        out = tmp_path / "bench"
        rc = main(
            [
                "retrieve-bench",
                "--corpus",
                corpus,
                "--questions",
                questions,
                "--decontext-map",
                dmap,
                "--budgets",
                "100,10000,1000000",
                "--k",
                "5",
                "--out-dir",
                str(out),
            ]
        )
        assert rc == 0
        rows = read_csv(out / "recall.csv")
        assert rows[0] == ["strategy", "budget", "recall"]
        strategies = {r[0] for r in rows[1:]}
        assert strategies == {"paragraph", "window100", "sentence", "decontext_sentence"}
        per_q = read_csv(out / "per_question.csv")
        assert per_q[0] == ["qid", "strategy", "H", "O"]
        assert (out / "recall_curves.png").exists()
        assert (out / "manifest.json").exists()

    def test_config_file_with_flag_override(self, corpus_paths, tmp_path):
        corpus, questions, _ = corpus_paths
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('k = 3\nbudgets = [100.0, 1000.0]\nstrategies = "sentence"\n')
        out = tmp_path / "bench"
        rc = main(
            [
                "retrieve-bench",
                "--corpus",
                corpus,
                "--questions",
                questions,
                "--config",
                str(cfg),
                "--k",
                "2",
                "--out-dir",
                str(out),
            ]
        )
        assert rc == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["k"] == 2  # flag wins
        assert manifest["config"]["budgets"] == [100.0, 1000.0]
        assert manifest["config"]["strategies"] == ["sentence"]

    def test_jobs_flag_matches_serial(self, corpus_paths, tmp_path):
        corpus, questions, dmap = corpus_paths
        outs = []
        for jobs, name in [("1", "serial"), ("4", "parallel")]:
            out = tmp_path / name
            main(
                [
                    "retrieve-bench",
                    "--corpus",
                    corpus,
                    "--questions",
                    questions,
                    "--decontext-map",
                    dmap,
                    "--jobs",
                    jobs,
                    "--out-dir",
                    str(out),
                ]
            )
            outs.append(out)
        assert (outs[0] / "recall.csv").read_bytes() == (outs[1] / "recall.csv").read_bytes()
        assert (outs[0] / "per_question.csv").read_bytes() == (
            outs[1] / "per_question.csv"
        ).read_bytes()


class TestStatsCommand:
    def test_category_partition(self, dataset_path, tmp_path, capsys):
        out = tmp_path / "stats"
        rc = main(["stats", "--examples", dataset_path, "--out-dir", str(out)])
        assert rc == 0
        stats = json.loads((out / "stats.json").read_text())
        assert sum(stats["category_pct"].values()) == pytest.approx(100.0)
        assert (out / "category_distribution.png").exists()


def test_unknown_subcommand_exits_2():
    assert main(["frobnicate"]) == 2


def test_no_args_exits_2():
    assert main([]) == 2
