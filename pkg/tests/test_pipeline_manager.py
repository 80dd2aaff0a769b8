"""
Tests for the workflow orchestration.
"""
import json

import numpy as np
import pytest

from config.settings import settings
from models.reports import OutputFormat, RunConfig
from models.sources import SourceSpec
from orchestration import failure_exit_code, get_pipeline_manager
from utils.exceptions import DegenerateMeasureError, IngestionError, ProvenanceError


@pytest.fixture
def manager():
    return get_pipeline_manager()


@pytest.fixture
def config(tmp_path):
    return RunConfig(
        order=32, grid=512, sweep_sizes=[2, 4, 8], quad_points=512, out=str(tmp_path)
    )


class TestFailureExitCodes:
    """Test the error to exit code mapping."""

    def test_codes(self):
        """Test input, degeneracy and unexpected errors."""
        assert failure_exit_code(IngestionError("x")) == 3
        assert failure_exit_code(ProvenanceError("x")) == 3
        assert failure_exit_code(DegenerateMeasureError("x")) == 4
        assert failure_exit_code(RuntimeError("x")) == 5


class TestGammaWorkflow:
    """Test the gamma workflow."""

    def test_single_moment(self, manager, config, tmp_path):
        """Test moments (1, 0.3)."""
        results = manager.execute_gamma_workflow(SourceSpec(moments="[1, 0.3]"), config)

        assert results["status"] == "completed"
        assert results["output"]["gamma"][0] == pytest.approx([0.3, 0.0])
        assert results["output"]["levinson_discrepancy"] <= 1e-10
        assert (tmp_path / "gamma.json").exists()

    def test_blaschke_theta(self, manager, config):
        """Test theta(z) = z."""
        results = manager.execute_gamma_workflow(SourceSpec(theta="[0, 1]"), config)

        assert results["output"]["terminal_unimodular"] is True
        assert len(results["output"]["gamma"]) == 2

    def test_constant_weight(self, manager, config):
        """Test Lebesgue measure."""
        results = manager.execute_gamma_workflow(SourceSpec(weight="constant"), config)

        gamma = np.array(results["output"]["gamma"])
        assert np.max(np.abs(gamma)) < 1e-12

    def test_unnormalized_moments_fail(self, manager, config):
        """Test that a failed step is recorded."""
        results = manager.execute_gamma_workflow(SourceSpec(moments="[2, 0.3]"), config)

        assert results["status"] == "failed"
        assert results["exit_code"] == 3
        assert results["errors"][0].startswith("NotNormalizedError")

    def test_finitely_supported_moments(self, manager, config):
        """Test the point mass at 1, whose Toeplitz sections are singular."""
        results = manager.execute_gamma_workflow(SourceSpec(moments="[1, 1, 1]"), config)

        assert results["status"] == "completed"
        assert results["exit_code"] == 0
        assert results["output"]["terminal_unimodular"] is True
        assert results["output"]["gamma"] == [pytest.approx([1.0, 0.0])]

    def test_run_metadata(self, manager, config, tmp_path):
        """Test that the written parameters carry config, version and digest."""
        results = manager.execute_gamma_workflow(SourceSpec(moments="[1, 0.3]"), config)
        written = json.loads((tmp_path / "gamma.json").read_text())

        assert written["config"] == config.model_dump(mode="json")
        assert written["tool_version"] == settings.app_version
        assert written["input_digest"] == results["output"]["input_digest"]


class TestThetaWorkflow:
    """Test the theta workflow."""

    def test_constant_parameter(self, manager, config):
        """Test gamma = (0.3)."""
        spec = SourceSpec(gamma_family="spike", family_param=0.3, spike_index=0)
        results = manager.execute_theta_workflow(spec, config)
        output = results["output"]

        assert output["theta"][0] == pytest.approx([0.3, 0.0])
        assert [c[0] for c in output["phi"][:4]] == pytest.approx([1.0, 0.6, 0.18, 0.054])
        assert [c[0] for c in output["moments"][:3]] == pytest.approx([1.0, 0.3, 0.09])
        assert output["config"]["order"] == 32
        assert output["tool_version"] == settings.app_version
        assert output["input_digest"]


class TestLMatrixWorkflow:
    """Test the lmatrix workflow."""

    def test_m_matrix(self, manager, config, tmp_path):
        """Test M_2 for gamma_1 = 0.6, gamma_2 = 0.8."""
        path = tmp_path / "g.json"
        path.write_text(json.dumps({"gamma": [0.0, 0.6, 0.8]}))
        results = manager.execute_lmatrix_workflow(
            SourceSpec(gamma_file=str(path)), config, n=2, which="M"
        )

        np.testing.assert_allclose(
            np.array(results["output"]["matrix"])[..., 0], [[0.8, 0.0], [-0.48, 0.6]], atol=1e-15
        )
        assert (tmp_path / "M_2.json").exists()

    def test_direct_cross_check(self, manager, config, tmp_path):
        """Test that L_n carries the direct-route discrepancy."""
        config = config.model_copy(update={"output_format": OutputFormat.CSV})
        spec = SourceSpec(gamma_family="geometric", family_param=0.5)
        results = manager.execute_lmatrix_workflow(spec, config, n=5, which="L")

        assert results["output"]["direct_discrepancy"] <= 1e-10
        assert (tmp_path / "L_5.csv").exists()

        meta = json.loads((tmp_path / "L_5.meta.json").read_text())
        assert meta["config"]["output_format"] == "csv"
        assert meta["tool_version"] == settings.app_version
        assert meta["input_digest"] == results["output"]["input_digest"]
        assert "matrix" not in meta

    def test_json_dump_metadata(self, manager, config, tmp_path):
        """Test that a JSON matrix dump embeds the run metadata."""
        spec = SourceSpec(gamma_family="geometric", family_param=0.5)
        manager.execute_lmatrix_workflow(spec, config, n=3, which="L")
        written = json.loads((tmp_path / "L_3.json").read_text())

        assert len(written["matrix"]) == 3
        assert written["config"] == config.model_dump(mode="json")
        assert written["tool_version"] == settings.app_version
        assert written["input_digest"]


class TestVerifyWorkflow:
    """Test the identity campaign."""

    def test_campaign_passes(self, manager, config):
        """Test a small campaign."""
        results = manager.execute_verify_workflow(config, trials=4, n=6)
        output = results["output"]

        assert results["exit_code"] == 0
        assert output["passes"]
        assert {"r_fact", "direct_vs_product", "schur_round_trip",
                "caratheodory_round_trip"} <= set(output["max_residuals"])
        assert output["config"]["seed"] == config.seed
        assert output["tool_version"] == settings.app_version

    def test_seeded(self, manager, config):
        """Test that the seed fixes the campaign."""
        first = manager.run_verification(config, trials=2, n=4)
        second = manager.run_verification(config, trials=2, n=4)

        assert first.max_residuals == second.max_residuals

    def test_failures_reported(self, manager, config, mocker):
        """Test that residuals above tolerance fail the campaign."""
        mocker.patch.object(manager, "_parallel", side_effect=[[], [1.0], [(0.0, 0.0)]])
        results = manager.execute_verify_workflow(config, trials=1, n=2)

        assert results["exit_code"] == 1
        assert results["output"]["failures"] == ["direct_vs_product"]


class TestDiagnoseWorkflow:
    """Test the diagnose workflow."""

    def test_constant_weight(self, manager, config, tmp_path):
        """Test Lebesgue measure end to end."""
        config = config.model_copy(update={"output_format": OutputFormat.CSV})
        results = manager.execute_diagnose_workflow(SourceSpec(weight="constant"), config)

        assert results["status"] == "completed"
        assert results["output"]["verdict"] == "certified_hs"
        assert results["exit_code"] == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["provenance"]["input_kind"] == "weight"
        assert (tmp_path / "sigma_sweep.csv").exists()
        assert (tmp_path / "riesz_sweep.csv").exists()

    def test_byte_identical_reports(self, manager, config, tmp_path):
        """Test that reruns reproduce the report file."""
        spec = SourceSpec(gamma_family="geometric", family_param=0.5)
        manager.execute_diagnose_workflow(spec, config)
        first = (tmp_path / "report.json").read_bytes()
        manager.execute_diagnose_workflow(spec, config)

        assert (tmp_path / "report.json").read_bytes() == first

    def test_degenerate_failure(self, manager, config, mocker):
        """Test that numerical degeneracy maps to exit code 4."""
        mocker.patch.object(
            manager.verdicts, "hsz_verdict", side_effect=DegenerateMeasureError("singular")
        )
        results = manager.execute_diagnose_workflow(SourceSpec(weight="constant"), config)

        assert results["status"] == "failed"
        assert results["exit_code"] == 4


class TestRieszWorkflow:
    """Test the riesz workflow."""

    def test_from_parameters(self, manager, config, tmp_path):
        """Test moment sweeps for gamma = 0 supplied as parameters."""
        spec = SourceSpec(gamma_family="spike", family_param=0.0, spike_index=0)
        results = manager.execute_riesz_workflow(spec, config)

        values = [p["value"] for p in results["output"]["riesz_sweep"]]
        assert values == pytest.approx([1.0, 1.0, 1.0])
        assert (tmp_path / "riesz.json").exists()

    def test_csv_sidecar(self, manager, config, tmp_path):
        """Test that CSV sweeps get a metadata document next to them."""
        config = config.model_copy(update={"output_format": OutputFormat.CSV})
        results = manager.execute_riesz_workflow(SourceSpec(weight="constant"), config)
        meta = json.loads((tmp_path / "riesz.meta.json").read_text())

        assert (tmp_path / "riesz_sweep.csv").exists()
        assert meta["config"] == config.model_dump(mode="json")
        assert meta["tool_version"] == settings.app_version
        assert meta["input_digest"] == results["output"]["input_digest"]
