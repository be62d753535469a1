from fractions import Fraction

import wedgemix as wm


def test_generator_id():
    assert wm.generator_id == "mt19937_64/splitmix64-v1"


def test_seed_derivation_is_deterministic():
    a = wm.derive_run_seed(7, 0)
    b = wm.derive_run_seed(7, 0)
    c = wm.derive_run_seed(7, 1)
    assert a == b
    assert a != c


def test_fit_rate_pinned_example():
    rate, r2 = wm.fit_rate([0] * 8 + [2, 2, 3, 4], 8, 11)
    assert abs(rate - 0.7) < 1e-12
    assert abs(r2 - Fraction(49, 55)) < 1e-12


def test_mixing_exponent_examples():
    side = 4
    initial = [[1 if i < side // 2 else -1 for i in range(side)] for _ in range(side)]
    assert wm.mixing_exponent(initial) == 0

    zero = [[0] * side for _ in range(side)]
    assert wm.mixing_exponent(zero) == 2

    side = 16
    checker = [[1 if (i + j) % 2 == 0 else -1 for i in range(side)] for j in range(side)]
    assert wm.mixing_exponent(checker) == 3


def test_simulate_structure():
    run = wm.simulate("RSFT", 8, 3, master_seed=11, regression_start=2)
    assert run["completed"]
    assert run["trajectory"][0] == 0
    assert run["t10"] is not None
    assert run["trajectory"][run["t10"]] >= 8 - 5
    directions = [b[1] for b in run["schedule"]]
    assert directions == ["H", "V"] * (len(directions) // 2) + ["H"] * (len(directions) % 2)


def test_engines_agree():
    a = wm.simulate("FSRT", 7, 3, master_seed=5, regression_start=2, engine="packed")
    b = wm.simulate("FSRT", 7, 3, master_seed=5, regression_start=2, engine="reference")
    assert a["trajectory"] == b["trajectory"]


def test_ensemble_summary():
    res = wm.ensemble("RSFT", 8, 3, runs=4, master_seed=3, regression_start=2)
    assert res["runs_requested"] == 4
    assert res["runs_completed"] == 4
    assert res["summary_csv"].splitlines()[0].startswith("flow_type,tau,n_exp,")


def test_exact_orbit_jacobian():
    word = [("H", (0, 1), 2), ("V", (0, 1), 2)] * 2
    jac = wm.orbit_jacobian(((1, 8), (7, 8)), word)
    assert jac == ((-3, 4), (-4, 5))
    report = wm.jordan_check(-3, 4, -4, 5)
    assert report["similar_to_jordan_block"]
    assert report["ones_vector_fixed"]
