import numpy as np
import pytest

import sparsid


def support(model, row):
    return [n for n, c in zip(model["term_names"], model["coefficient_rows"][row]) if c != 0.0]


@pytest.fixture(scope="module")
def lorenz():
    return sparsid.simulate("lorenz", dt=0.01, horizon=6000, transient_discard=1000)


def test_lorenz_support(lorenz):
    assert lorenz["kind"] == "series"
    assert lorenz["values"].shape == (5000, 3)
    model = sparsid.discover(lorenz["times"], lorenz["values"], channels=lorenz["channels"],
                             order=3, scheme="five_point")
    assert support(model, 0) == ["x", "y"]
    assert support(model, 1) == ["x", "y", "x*z"]
    assert support(model, 2) == ["z", "x*y"]
    sigma = dict(zip(model["term_names"], model["coefficient_rows"][0]))
    assert sigma["y"] == pytest.approx(10.0, rel=1e-2)


def test_recovered_model_integrates(lorenz):
    model = sparsid.discover(lorenz["times"], lorenz["values"], channels=lorenz["channels"],
                             order=3, scheme="five_point")
    out = sparsid.simulate_model(model, lorenz["values"][0], 50, 0.01)
    assert np.allclose(out["values"][:20], lorenz["values"][:20], atol=1e-2)


def test_solvers_agree_on_exact_sparse_system():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((80, 12))
    a = np.zeros(12)
    a[[1, 5, 9]] = [2.0, -1.5, 0.7]
    for solver in ("lasso_cd", "omp", "stls"):
        sol = sparsid.solve(g, g @ a, solver, lam=1e-8, threshold=1e-3)
        assert sol["support"] == [1, 5, 9]
        assert np.allclose(sol["coefficients"], a, atol=1e-5)


def test_polynomial_terms_graded():
    names = sparsid.polynomial_terms(2, 2, ["x", "y"])
    assert names == ["1", "x", "y", "x^2", "y^2", "x*y", "x^2*y", "x*y^2", "x^2*y^2"]
    assert sparsid.polynomial_terms(3, 1)[1:4] == ["x1", "x2", "x3"]


def test_game_ring_recovered():
    n = 8
    edges = [[i, (i + 1) % n] for i in range(n)]
    rec = sparsid.simulate("game", parameters={"nodes": n, "mutation": 0.5}, horizon=60, seed=3, edges=edges)
    assert rec["kind"] == "game"
    net = sparsid.reconstruct_game(rec["strategies"], rec["payoffs"])
    assert sorted(map(sorted, net["edges"])) == sorted(map(sorted, edges))


def test_heat_equation():
    field = sparsid.simulate("heat_pde", dt=0.005, horizon=400, parameters={"diffusivity": 0.5})
    assert field["kind"] == "field"
    model = sparsid.identify_pde(field["x"], field["t"], field["u"], threshold=0.05)
    active = {n: c for n, c in zip(model["term_names"], model["coefficient_rows"][0]) if c != 0.0}
    assert len(active) == 1
    (coef,) = active.values()
    assert coef == pytest.approx(0.5, rel=0.05)


def test_errors():
    with pytest.raises(sparsid.InvalidArgument):
        sparsid.simulate("nope")
    with pytest.raises(sparsid.DivergenceError):
        sparsid.simulate("quadratic_map", parameters={"a": 3.0}, initial_state=[3.0])
    with pytest.raises(sparsid.Error):
        sparsid.discover([0.0, 1.0], [[1.0], [2.0]], kind="bogus")


def test_cli_usage_exit_code():
    assert sparsid.run_cli(["simulate", "--frobnicate"]) == 2
