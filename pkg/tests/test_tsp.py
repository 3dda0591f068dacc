import numpy as np
import pytest

from core.checks import InvalidInstance, InvalidTour
from core.cop import run_policy
from core.tsp import Tour, TspInstance, TspProcess, TspState, as_process, \
    generate, load_instance, save_instance, tour_cost


def test_collinear_cost(collinear):
    assert tour_cost(collinear, (0, 1, 2)) == pytest.approx(2.0)


def test_distance_matrix_symmetric():
    inst = generate(9, 4)
    assert np.array_equal(inst.dist, inst.dist.T)
    assert np.all(np.diag(inst.dist) == 0)


def test_generate_is_deterministic():
    a, b = generate(12, 7), generate(12, 7)
    assert np.array_equal(a.coords, b.coords)
    assert not np.array_equal(a.coords, generate(12, 8).coords)
    assert a.coords.min() >= 0 and a.coords.max() <= 1


def test_minimal_instance():
    inst = generate(3, 0)
    assert inst.n == 3
    assert Tour.of(inst, (0, 1, 2)).cost == pytest.approx(
        Tour.of(inst, (0, 2, 1)).cost, rel=1e-12)


@pytest.mark.parametrize('coords', [
    [(0, 0), (1, 1)],
    [(0, 0), (1, 1), (1.5, 0)],
    [(0, 0), (1, 1), (float('nan'), 0)],
])
def test_invalid_instance(coords):
    with pytest.raises(InvalidInstance):
        TspInstance(coords)


def test_repeated_vertex_names_index(square):
    with pytest.raises(InvalidTour) as info:
        tour_cost(square, (0, 1, 1, 3))
    assert info.value.index == 2
    assert 'repeated' in str(info.value)


def test_missing_vertex(square):
    with pytest.raises(InvalidTour) as info:
        tour_cost(square, (0, 1, 2))
    assert 'vertex 3 missing' in str(info.value)


def test_out_of_range_vertex(square):
    with pytest.raises(InvalidTour) as info:
        tour_cost(square, (0, 1, 2, 4))
    assert info.value.index == 3


def test_canonical_rotation_and_orientation(square):
    tour = Tour.of(square, (2, 0, 3, 1))
    assert tour.canonical() == (0, 2, 1, 3)
    assert Tour.of(square, (1, 2, 3, 0)).canonical() == (0, 1, 2, 3)


def test_edges_are_sorted_pairs(square):
    assert sorted(Tour.of(square, (0, 2, 1, 3)).edges()) == [
        (0, 2), (0, 3), (1, 2), (1, 3)]


def test_validate_detects_stale_cost(square):
    tour = Tour((0, 1, 2, 3), 3.0)
    with pytest.raises(InvalidTour):
        tour.validate(square)
    Tour.of(square, (0, 1, 2, 3)).validate(square)


def test_save_and_load(tmp_path):
    inst = generate(6, 11, 'a')
    path = tmp_path.joinpath('b.json')
    save_instance(path, inst)
    loaded = load_instance(path)
    assert loaded.instance_id == 'b'
    assert np.array_equal(loaded.coords, inst.coords)


def test_from_json_count_mismatch():
    with pytest.raises(InvalidInstance):
        TspInstance.from_json({'n': 4, 'coords': [[0, 0], [1, 0], [0, 1]]})


def test_process_steps(square):
    process = TspProcess(square)
    state = process.initial_state()
    assert state == TspState(1, 0, 1)
    assert process.valid_actions(state) == (1, 2, 3)
    state = process.transition(state, 1)
    state = process.transition(state, 2)
    assert state.index == 3
    assert process.valid_actions(state) == (3,)
    # The last move pays the closing edge.
    assert process.cost(state, 3) == pytest.approx(2.0)
    assert process.is_terminal(process.transition(state, 3))


def test_policy_rollout_matches_tour_cost(square):
    process = as_process(square)
    rollout = run_policy(process, lambda s: process.valid_actions(s)[0])
    tour = process.tour_of(rollout)
    assert tour.order == (0, 1, 2, 3)
    assert rollout.total_cost == pytest.approx(tour.cost, rel=1e-12)
    assert len(rollout) == 3
    assert rollout.forced_count == 1


def test_optimal_action_needs_table(square):
    process = TspProcess(square)
    with pytest.raises(InvalidInstance):
        process.optimal_action(process.initial_state())
