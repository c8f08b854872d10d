import json
import math

import numpy as np
import pytest

from hmmtrend import GeneratedPath, HmmModel, InputError, RngSpec, generate, path_log_probability
from hmmtrend import datasets, stationary_distribution
from hmmtrend.generator import START_MARKER, path_factors

pytestmark = pytest.mark.usefixtures("backend")


def test_first_state_follows_row_zero(published):
    model = published[1]  # row S1 = [0, 0, 1, 0, 0, 0]
    for seed in range(200):
        path = generate(model, 7, seed)
        assert path.states[0] == 2


def test_deterministic_chain_ignores_seed(flip_model):
    for seed in (0, 1, 2**40):
        path = generate(flip_model, 4, seed)
        assert list(path.states) == [1, 0, 1, 0]
        assert list(path.symbols) == [1, 0, 1, 0]


def test_include_start_layout(flip_model):
    path = generate(flip_model, 4, 5, include_start=True)
    assert list(path.states) == [0, 1, 0, 1]
    # symbol p is emitted by state p - 1
    assert list(path.symbols) == [-1, 0, 1, 0]
    doc = path.to_dict(flip_model)
    assert doc["symbols"] == [START_MARKER, "x", "y", "x"]


def test_include_start_seven_states_six_symbols(published):
    path = generate(published[1], 7, 3, include_start=True)
    assert len(path.states) == 7 and path.states[0] == 0
    assert path.symbols[0] == -1 and np.all(path.symbols[1:] >= 0)


def test_same_seed_same_path(published):
    a = generate(published[2], 50, RngSpec(123))
    b = generate(published[2], 50, RngSpec(123))
    assert a == b
    assert a.to_json(published[2]) == b.to_json(published[2])
    c = generate(published[2], 50, RngSpec(123, stream=1))
    assert not np.array_equal(a.states, c.states)


def test_frozen_path_for_seed(published):
    # pins the RNG stream so silent changes to sampling are caught
    path = generate(published[1], 7, 42)
    assert [published[1].states[s] for s in path.states] == [
        "moderate low", "very high", "moderate high", "moderate low", "low",
        "moderate low", "high",
    ]
    assert "".join(published[1].symbols[m] for m in path.symbols) == "IIDDIDD"


@pytest.mark.parametrize("include_start", [False, True])
@pytest.mark.parametrize("k", range(1, 7))
def test_generated_paths_are_feasible(k, include_start, published):
    model = published[k]
    for seed in range(30):
        path = generate(model, 12, seed, include_start)
        assert path_log_probability(model, path) > -math.inf


def test_long_run_transition_frequencies(published):
    model = published[1]
    path = generate(model, 100_000, 2024)
    s = path.states
    counts = np.zeros((6, 6))
    np.add.at(counts, (s[:-1], s[1:]), 1)
    visited = counts.sum(axis=1) > 0
    freq = counts[visited] / counts[visited].sum(axis=1, keepdims=True)
    np.testing.assert_allclose(freq, model.transition[visited], atol=0.02)
    occupancy = np.bincount(s, minlength=6) / len(s)
    np.testing.assert_allclose(occupancy, stationary_distribution(model.transition), atol=0.02)


def test_generate_errors(flip_model):
    with pytest.raises(InputError):
        generate(flip_model, 0, 1)
    bad = HmmModel(["a"], ["x"], [[0.5]], [[1]], [1])
    with pytest.raises(Exception):
        generate(bad, 3, 1)
    with pytest.raises(InputError):
        RngSpec(-1)
    with pytest.raises(InputError):
        RngSpec(1, algorithm="mt19937")


def test_unseeded_generation_records_seed(flip_model):
    path = generate(flip_model, 3)
    assert isinstance(path.seed, int)
    assert generate(flip_model, 3, path.seed) == path


def _published_path(k, model):
    states = np.array(datasets.optimum_state_indices(k))
    symbols = np.array([-1 if s == START_MARKER else model.symbol_index(s)
                        for s in datasets.optimum_symbol_labels(k)])
    return GeneratedPath(states, symbols, include_start=True)


def test_optimum_sequence_one_is_feasible(published):
    model = published[1]
    path = _published_path(1, model)
    factors = dict(path_factors(model, path))
    assert factors["a(very low,moderate low)"] == 1.0
    assert factors["a(moderate low,high)"] == pytest.approx(0.571, abs=1e-3)
    assert factors["b(very low,D)"] == 1.0
    assert factors["b(moderate low,I)"] == pytest.approx(0.71)
    assert factors["b(high,D)"] == 1.0
    lp = path_log_probability(model, path)
    assert math.isfinite(lp)
    assert lp == pytest.approx(sum(math.log(p) for _, p in path_factors(model, path)), rel=1e-12)


@pytest.mark.parametrize("k", range(1, 7))
def test_every_printed_optimum_sequence_is_feasible(k, published):
    assert math.isfinite(path_log_probability(published[k], _published_path(k, published[k])))


def test_zero_transition_gives_minus_inf(published):
    path = GeneratedPath(np.array([2, 0]), np.array([0, 1]))  # a(S1 -> S3) then a(S3 -> S1) = 0
    assert path_log_probability(published[1], path) == -math.inf


def test_deterministic_path_log_probability_is_zero(flip_model):
    path = generate(flip_model, 3, 0)
    assert path_log_probability(flip_model, path) == 0.0


def test_path_dimension_mismatch(flip_model):
    with pytest.raises(InputError):
        path_log_probability(flip_model, GeneratedPath(np.array([0, 1]), np.array([0])))
    with pytest.raises(InputError):
        path_log_probability(flip_model, GeneratedPath(np.array([0, 2]), np.array([0, 0])))


def test_path_json_round_trip(published):
    model = published[3]
    path = generate(model, 9, 77, include_start=True)
    doc = json.loads(path.to_json(model))
    assert doc["seed"] == 77 and doc["include_start"] is True
    assert doc["algorithm"] == "numpy-pcg64"
    assert doc["symbols"][0] == START_MARKER and START_MARKER not in doc["symbols"][1:]
    assert GeneratedPath.from_dict(doc, model) == path


def test_start_marker_only_at_position_zero(published):
    doc = {"states": ["very low", "low"], "symbols": ["I", START_MARKER], "include_start": True}
    with pytest.raises(InputError, match="position 0"):
        GeneratedPath.from_dict(doc, published[1])
