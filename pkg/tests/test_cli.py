"""Tests for the docstruct command line."""

import json
import os

import pytest

from src.docstruct.cli import build_parser, main
from src.docstruct.services.pipeline_service import PipelineService
from src.docstruct.utils.serialization_utils import canonical_json
from src.docstruct.synth import write_corpus


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith("DOCSTRUCT_"):
            monkeypatch.delenv(name)


def _stderr_payload(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


class TestParser:
    """Test cases for argument parsing."""

    def test_subcommand_required(self):
        """Test that a bare invocation is an argparse error."""
        with pytest.raises(SystemExit) as exc_info:
            main([])
        assert exc_info.value.code == 2

    def test_pipeline_requires_model_dir(self):
        """Test the required --model-dir of the pipeline command."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["pipeline", "corpus"])

    def test_shared_flags(self):
        """Test flags shared by every command."""
        args = build_parser().parse_args(
            ["train", "corpus", "--model-dir", "m", "--seed", "4", "--classifier", "dt", "--mode", "layout"]
        )
        assert (args.seed, args.classifier, args.vector_mode, args.task) == (4, "dt", "layout", "all")


class TestConfigCommand:
    """Test cases for the config command."""

    def test_prints_effective_config(self, capsys):
        """Test that flags show up in the printed YAML."""
        assert main(["config", "--seed", "9", "--threads", "2"]) == 0
        out = capsys.readouterr().out
        assert "seed: 9" in out
        assert "threads: 2" in out

    def test_invalid_config_value(self, capsys):
        """Test that a rejected flag value exits with the schema error."""
        assert main(["config", "--threads", "0"]) == 1
        assert _stderr_payload(capsys)["error_code"] == "SCHEMA_ERROR"


class TestUsageErrors:
    """Test cases for exit code 2."""

    def test_missing_model_dir(self, tmp_path, synthetic_corpus, capsys):
        """Test that an absent model directory exits with 2."""
        write_corpus(synthetic_corpus[:1], tmp_path / "corpus", formats=["line_csv"])
        code = main(["pipeline", str(tmp_path / "corpus"), "--model-dir", str(tmp_path / "none")])
        assert code == 2
        assert _stderr_payload(capsys)["error_code"] == "USAGE_ERROR"

    def test_missing_input(self, tmp_path, capsys):
        """Test that an absent input path exits with 2."""
        assert main(["structure", str(tmp_path / "absent.csv"), "--out-dir", str(tmp_path)]) == 2
        assert "Input not found" in _stderr_payload(capsys)["error"]


class TestSummarizeCommand:
    """Test cases for summarizing existing structure JSON."""

    def _write_structure(self, synthetic_documents, directory):
        (tree,) = PipelineService.oracle_trees(synthetic_documents[:1])
        for section in tree.iter_sections():
            section.ontology_class = "Introduction"
        path = directory / "structure" / "doc.json"
        path.parent.mkdir(parents=True)
        path.write_text(
            canonical_json({**tree.to_dict(), "canonical_order": ["Introduction"]}), encoding="utf-8"
        )
        return path

    def test_summaries_written_back_in_place(self, synthetic_documents, tmp_path, capsys):
        """Test that summaries are added and earlier labels survive."""
        path = self._write_structure(synthetic_documents, tmp_path)
        assert main(["summarize", str(tmp_path), "--ratio", "0.5"]) == 0
        assert "Summarized" in capsys.readouterr().out

        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["canonical_order"] == ["Introduction"]
        sections = []
        stack = list(data["sections"])
        while stack:
            section = stack.pop()
            sections.append(section)
            stack.extend(section["children"])
        assert all(s["ontology_class"] == "Introduction" for s in sections)
        assert all(s.get("summary") for s in sections if s["body_text"])

    def test_no_structure_files(self, tmp_path, capsys):
        """Test that a directory without structure JSON is a usage error."""
        assert main(["summarize", str(tmp_path)]) == 2
        assert _stderr_payload(capsys)["error_code"] == "USAGE_ERROR"

    def test_malformed_structure_json(self, tmp_path, capsys):
        """Test that a broken structure file is a schema error."""
        (tmp_path / "doc.json").write_text("{\"doc_id\": \"d\"}", encoding="utf-8")
        assert main(["summarize", str(tmp_path / "doc.json")]) == 1
        assert _stderr_payload(capsys)["error_code"] == "SCHEMA_ERROR"


@pytest.mark.integration
class TestEndToEnd:
    """Test cases running gen, train, eval and pipeline in sequence."""

    def test_generate_train_and_run(self, tmp_path, capsys):
        """Test the whole command sequence on a small generated corpus."""
        corpus = tmp_path / "corpus"
        models = tmp_path / "models"
        out = tmp_path / "out"
        common = ["--threads", "1", "--seed", "5"]

        assert main(["gen", "--n-docs", "6", "--out-dir", str(corpus), *common]) == 0
        assert len(list(corpus.glob("*.csv"))) == 6
        assert json.loads((corpus / "corpus_spec.json").read_text(encoding="utf-8"))["n_docs"] == 6

        code = main(
            ["train", str(corpus), "--model-dir", str(models), "--classifier", "nb",
             "--out-dir", str(out), *common]
        )
        assert code == 0
        assert (models / "line.model").exists()
        assert (models / "semantic.model").exists()

        capsys.readouterr()
        assert main(["eval", str(corpus), "--model-dir", str(models), "--task", "line",
                     "--out-dir", str(out), *common]) == 0
        assert "accuracy" in capsys.readouterr().out
        assert (out / "eval_line.json").exists()

        assert main(["pipeline", str(corpus), "--model-dir", str(models), "--out-dir", str(out), *common]) == 0
        report = json.loads((out / "pipeline.json").read_text(encoding="utf-8"))
        assert len(report["documents"]) == 6
        assert len(list((out / "structure").glob("*.json"))) == 6

    def test_structure_without_models_uses_labels(self, tmp_path, synthetic_corpus, capsys):
        """Test that the structure command falls back to ground-truth labels."""
        write_corpus(synthetic_corpus[:2], tmp_path / "corpus", formats=["line_csv"])
        assert main(["structure", str(tmp_path / "corpus"), "--out-dir", str(tmp_path / "out")]) == 0
        assert "Recovered" in capsys.readouterr().out
        assert len(list((tmp_path / "out" / "toc").glob("*.txt"))) == 2
