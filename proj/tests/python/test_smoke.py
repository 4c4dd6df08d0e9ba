import numpy as np
import pytest

import rgcn

SMALL = """
[experiment]
scenario = concentration-check
model = half-constant
pairs = 60:1, 120:0.5
repeats = 2
"""


def test_fixtures_and_scenarios():
    names = [name for name, _ in rgcn.model_fixtures()]
    assert "bumped-surface-eps" in names
    assert "convergence" in rgcn.scenario_names()


def test_sample_graph_is_deterministic():
    a = rgcn.sample_graph("square-gaussian", 80, 3)
    b = rgcn.sample_graph("square-gaussian", 80, 3)
    assert a["n"] == 80
    assert a["latents"].shape == (80, 2)
    assert a["edges"].shape[1] == 2
    assert np.array_equal(a["edges"], b["edges"])
    assert np.all(a["edges"][:, 0] < a["edges"][:, 1])


def test_forward_is_permutation_equivariant():
    g = rgcn.sample_graph("square-gaussian", 50, 7)
    widths = [1, 4, 4]
    out = rgcn.forward_edges(50, g["edges"], g["signals"], widths, order=2, network_seed=5)
    perm = np.random.default_rng(0).permutation(50)
    inverse = np.argsort(perm)
    edges = inverse[g["edges"]]
    edges.sort(axis=1)
    out_p = rgcn.forward_edges(50, edges, g["signals"][perm], widths, order=2, network_seed=5)
    np.testing.assert_allclose(out_p, out[perm], atol=1e-12)

    eq, pooled = rgcn.forward("square-gaussian", 50, 7, widths, order=2, network_seed=5)
    np.testing.assert_allclose(eq, out, atol=1e-12)
    np.testing.assert_allclose(pooled, out.mean(axis=0), atol=1e-12)


def test_mse_sigma_recovers_a_shuffle():
    z = np.random.default_rng(1).normal(size=(12, 2))
    perm = np.random.default_rng(2).permutation(12)
    value, sigma = rgcn.mse_sigma_exact(z, z[perm])
    assert value == pytest.approx(0.0, abs=1e-12)
    assert np.array_equal(perm[np.asarray(sigma)], np.arange(12))
    w2, exact = rgcn.wasserstein2(z, z[perm])
    assert exact and w2 == pytest.approx(0.0, abs=1e-12)


def test_run_config_round_trip():
    rows = rgcn.read_results(rgcn.run_config(SMALL, jobs=2))
    assert len(rows) == 8
    assert {r["metric"] for r in rows} == {"spectral_distance", "normalized_statistic"}
    assert all(np.isfinite(r["value"]) for r in rows)
    again = rgcn.read_results(rgcn.run_config(SMALL))
    assert [r["value"] for r in rows] == [r["value"] for r in again]


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError, match="experiment.foo"):
        rgcn.describe_config("[experiment]\nscenario = convergence\nfoo = 1\n")
    domain = """
[experiment]
scenario = deform-amplitude-sweep
model = square-gaussian
n_grid = 50
repeats = 1

[deformation]
kind = translation
amplitudes = 0.5
"""
    with pytest.raises(rgcn.NumericalPreconditionError):
        rgcn.run_config(domain)
    with pytest.raises(ValueError):
        rgcn.sample_graph("no-such-model", 10, 1)
