"""
Integration Tests for the alphamod Command Line
===============================================

Tests cover:
- Exit codes for usage and configuration errors
- Covering, norm and operator verbs on JSON envelopes
- Verification output files and their byte stability
"""

import dataclasses
import json
import math

import numpy as np
import pytest

from alphamod.cli import main as cli_main
from alphamod.cli.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, dispatch
from alphamod.core.grid import make_grid
from alphamod.models.grid import SampledFunction, SampledSymbol, dumps_envelope, from_envelope


# ============================================
# Fixtures
# ============================================

@pytest.fixture
def grid():
    return make_grid(1, 64, 2 * math.pi)


@pytest.fixture
def plane_wave_file(tmp_path, grid):
    """Envelope of e^{i 3 x}."""
    path = tmp_path / "f.json"
    path.write_text(dumps_envelope(SampledFunction(grid, np.exp(3j * grid.axis_nodes()))), encoding="utf-8")
    return path


@pytest.fixture
def identity_symbol_file(tmp_path, grid):
    """Envelope of sigma = 1."""
    path = tmp_path / "sigma.json"
    path.write_text(dumps_envelope(SampledSymbol(grid, np.ones(grid.shape * 2))), encoding="utf-8")
    return path


# ============================================
# Usage errors
# ============================================

@pytest.mark.parametrize(
    "argv",
    [
        ["transmogrify"],
        ["covering", "validate", "--alpha", "1.5", "--grid", "64"],
        ["covering", "validate", "--alpha", "0.5", "--grid", "7"],
        ["covering", "validate", "--alpha", "0.5", "--dim", "3", "--grid", "8"],
        ["verify", "thm11", "--alpha", "x,y"],
    ],
)
def test_usage_errors_exit_one(argv):
    """Test that bad verbs, alphas and grids exit with code 1 before any computation."""
    assert dispatch(argv) == EXIT_USAGE


def test_missing_input_file_exits_one(tmp_path):
    """Test that a missing envelope is reported as a usage error."""
    argv = ["norm", "function", "--input", str(tmp_path / "missing.json"), "--alpha", "0"]
    assert dispatch(argv) == EXIT_USAGE


def test_op_apply_requires_input(identity_symbol_file):
    """Test that op apply without --input exits with code 1."""
    assert dispatch(["op", "apply", "--symbol", str(identity_symbol_file)]) == EXIT_USAGE


def test_symbol_where_function_expected(identity_symbol_file):
    """Test that a symbol envelope passed as a function is rejected."""
    argv = ["norm", "function", "--input", str(identity_symbol_file), "--alpha", "0"]
    assert dispatch(argv) == EXIT_USAGE


# ============================================
# Covering, norm and operator verbs
# ============================================

def test_covering_validate(capsys):
    """Test that a standard covering validates and reports its pieces."""
    code = dispatch(["covering", "validate", "--alpha", "0.5", "--grid", "64"])

    assert code == EXIT_OK
    assert "covering admissible" in capsys.readouterr().out


def test_covering_build_writes_csv(tmp_path):
    """Test that covering build writes one CSV row per piece."""
    out = tmp_path / "pieces.csv"
    code = dispatch(["covering", "build", "--alpha", "1", "--grid", "64", "--format", "csv", "--out", str(out)])

    assert code == EXIT_OK
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) > 2


def test_covering_build_emits_window_envelopes(tmp_path):
    """Test that covering build writes every window as an envelope and the reloaded windows sum to one."""
    out = tmp_path / "covering.json"
    code = dispatch(["covering", "build", "--alpha", "0.5", "--grid", "64", "--out", str(out)])

    assert code == EXIT_OK
    payload = json.loads(out.read_text(encoding="utf-8"))
    windows = [from_envelope(piece["window"]) for piece in payload["pieces"]]
    assert all(isinstance(window, SampledFunction) for window in windows)
    assert {window.domain.value for window in windows} == {"frequency"}

    xi = windows[0].grid.axis_frequencies()
    inside = np.abs(xi) <= payload["band_radius"]
    total = sum(window.values for window in windows)
    np.testing.assert_allclose(total[inside].real, 1.0, atol=1e-8)
    assert np.max(np.abs(total.imag)) == 0.0


def test_covering_validate_fails_on_support_violations(monkeypatch, capsys):
    """Test that windows leaking outside their pieces fail validation with code 2."""
    real_build = cli_main.build_covering

    def leaky_build(alpha, grid):
        covering = real_build(alpha, grid)
        report = dataclasses.replace(covering.admissibility, support_violations=3)
        return dataclasses.replace(covering, admissibility=report)

    monkeypatch.setattr(cli_main, "build_covering", leaky_build)

    assert dispatch(["covering", "validate", "--alpha", "0.5", "--grid", "64"]) == EXIT_FAILED
    assert "active outside their pieces" in capsys.readouterr().out


def test_norm_function_plane_wave(plane_wave_file, capsys):
    """Test the alpha = 0, (inf, 1, s = 1) norm of e^{i 3 x} through the CLI."""
    argv = ["norm", "function", "--input", str(plane_wave_file), "--alpha", "0", "--p", "inf", "--q", "1", "--s", "1"]
    code = dispatch(argv)

    assert code == EXIT_OK
    total = float(capsys.readouterr().out.strip().splitlines()[-1])
    assert total == pytest.approx(math.sqrt(10.0), rel=1e-12)


def test_op_apply_identity(tmp_path, plane_wave_file, identity_symbol_file):
    """Test that sigma = 1 maps f to itself and the result is an envelope."""
    out = tmp_path / "tf.json"
    argv = ["op", "apply", "--symbol", str(identity_symbol_file), "--input", str(plane_wave_file), "--out", str(out)]

    assert dispatch(argv) == EXIT_OK
    result = from_envelope(json.loads(out.read_text(encoding="utf-8")))
    source = from_envelope(json.loads(plane_wave_file.read_text(encoding="utf-8")))
    np.testing.assert_allclose(result.values, source.values, atol=1e-12)


def test_op_norm_estimate(tmp_path, identity_symbol_file):
    """Test that the identity has operator norm one."""
    out = tmp_path / "norm.json"
    code = dispatch(["op", "norm-estimate", "--symbol", str(identity_symbol_file), "--out", str(out)])

    assert code == EXIT_OK
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["converged"] is True
    assert payload["norm"] == pytest.approx(1.0, rel=1e-8)


# ============================================
# Verification output
# ============================================

VERIFY_ARGS = ["verify", "appendix", "--grid", "64", "--trials", "2", "--no-refine", "--jobs", "1"]


@pytest.mark.slow
def test_verify_writes_reports(tmp_path):
    """Test one CSV per report plus summary.json."""
    out = tmp_path / "run"
    code = dispatch(VERIFY_ARGS + ["--out", str(out)])

    assert code in (EXIT_OK, EXIT_FAILED)
    assert sorted(p.name for p in out.iterdir()) == ["appendix_p2_q2.csv", "appendix_pinf_q1.csv", "summary.json"]

    header = (out / "appendix_p2_q2.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "check,alpha,trial,seed,lhs,rhs,ratio,grid_N"

    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["passed"] == (code == EXIT_OK)
    assert [report["name"] for report in summary["reports"]] == ["appendix_p2_q2", "appendix_pinf_q1"]


@pytest.mark.slow
def test_verify_output_is_byte_stable(tmp_path):
    """Test that two runs with the same seed write identical files."""
    first, second = tmp_path / "a", tmp_path / "b"

    assert dispatch(VERIFY_ARGS + ["--out", str(first)]) == dispatch(VERIFY_ARGS + ["--out", str(second)])

    for path in sorted(first.iterdir()):
        assert path.read_bytes() == (second / path.name).read_bytes()
