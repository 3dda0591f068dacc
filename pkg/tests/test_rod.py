import pytest

from conftest import random_instances
from core.checks import ClaimsBeatOptimum, MissingReferences, UsageError, \
    ValidationError
from core.cop import Decision, Rollout
from core.exact import held_karp
from core.oracle import OracleConfig, run_oracle
from core.rod import alpha_seed, aggregate_gap, compute_rod, \
    decision_accuracy
from core.tsp import as_process


def test_identity_gap_is_zero():
    report = aggregate_gap([3.0, 4.0], [3.0, 4.0])
    assert report.gap == 0.0
    assert report.classical_gap == 0.0


def test_both_gap_conventions():
    report = aggregate_gap([55.0, 55.0], [50.0, 50.0], 'd')
    assert report.gap == pytest.approx(1 - 100 / 110)
    assert report.classical_gap == pytest.approx(0.10)
    assert report.to_json()['dataset'] == 'd'


def test_ratio_of_sums_differs_from_mean_of_ratios():
    sums = aggregate_gap([2.0, 10.0], [1.0, 10.0])
    means = aggregate_gap([2.0, 10.0], [1.0, 10.0], mode='mean-of-ratios')
    assert sums.gap == pytest.approx(1 - 11 / 12)
    assert means.gap == pytest.approx(0.25)


def test_tolerance_boundary():
    report = aggregate_gap([10 + 1e-12], [10.0])
    assert report.gap == pytest.approx(0.0, abs=1e-12)


def test_beating_the_optimum_is_rejected():
    with pytest.raises(ClaimsBeatOptimum) as info:
        aggregate_gap([10.0, 9.0], [10.0, 10.0])
    assert info.value.index == 1


def test_gap_preconditions():
    with pytest.raises(ValidationError):
        aggregate_gap([1.0], [1.0, 2.0])
    with pytest.raises(ValidationError):
        aggregate_gap([1.0], [0.0])


def test_conventions_rank_models_alike():
    refs = [5.0, 6.0, 7.0]
    a = aggregate_gap([5.5, 6.1, 7.0], refs)
    b = aggregate_gap([5.2, 6.4, 7.3], refs)
    assert (a.gap < b.gap) == (a.classical_gap < b.classical_gap)


def _trace(optimal: int, total: int) -> Rollout:
    decisions = tuple(Decision(None, i, 1.0, i < optimal, False)
                      for i in range(total))
    return Rollout(decisions, float(total))


def test_decision_accuracy_example():
    assert round(decision_accuracy([_trace(12, 13)]), 4) == 0.9231
    assert decision_accuracy([_trace(5, 5), _trace(3, 3)]) == 1.0


def test_decision_accuracy_forced_steps():
    forced = Rollout((Decision(None, 0, 1.0, False, False),
                      Decision(None, 1, 1.0, True, True)), 2.0)
    assert decision_accuracy([forced]) == 0.5
    assert decision_accuracy([forced], include_forced=False) == 0.0


def test_decision_accuracy_empty():
    with pytest.raises(ValidationError):
        decision_accuracy([])


def test_alpha_zero_accuracy_is_forced_share(small_dataset):
    _, _, processes = small_dataset
    config = OracleConfig(0.0, rollouts_per_instance=2)
    traces = [r for p in processes
              for r in run_oracle(p, config, keep_traces=True).rollouts]
    forced = sum(r.forced_count for r in traces)
    assert decision_accuracy(traces) == forced / sum(len(r) for r in traces)


def test_alpha_seed_is_stable():
    assert alpha_seed(0, 3) == alpha_seed(0, 3)
    assert alpha_seed(0, 3) != alpha_seed(0, 4)


def test_perfect_model(small_dataset):
    _, references, processes = small_dataset
    costs = [references[p.instance.instance_id].cost for p in processes]
    report = compute_rod(processes, references, costs, OracleConfig(0.0),
                         k=0.25)
    assert 0.0 <= report.alpha <= 1.0
    assert dict(report.curve)[report.alpha] <= report.model_gap + 1e-12
    assert [a for a, _ in report.curve] == \
        [0.25 * i for i in range(len(report.curve))]
    assert report.to_json()['rod'] == report.alpha


def test_rod_is_monotone_in_model_gap(small_dataset):
    _, references, processes = small_dataset
    refs = [references[p.instance.instance_id].cost for p in processes]
    config = OracleConfig(0.0, rollouts_per_instance=4, seed=3)
    rods = []
    for factor in (1.02, 1.05, 1.10):
        costs = [c * factor for c in refs]
        rods.append(compute_rod(processes, references, costs, config,
                                k=0.05).alpha)
    assert rods[0] >= rods[1] >= rods[2]


def test_bisect_brackets_the_answer(small_dataset):
    _, references, processes = small_dataset
    costs = [references[p.instance.instance_id].cost * 1.05
             for p in processes]
    config = OracleConfig(0.0, rollouts_per_instance=4, seed=3)
    report = compute_rod(processes, references, costs, config, k=0.01,
                         bisect=True, coarse_k=0.1)
    curve = dict(report.curve)
    assert curve[report.alpha] <= report.model_gap + 1e-12
    below = round(report.alpha - 0.01, 10)
    for alpha, gap in report.curve:
        if round(alpha, 10) == below:
            assert gap > report.model_gap
    assert len(report.curve) < 101


def test_curve_csv(small_dataset):
    _, references, processes = small_dataset
    costs = [references[p.instance.instance_id].cost * 1.1
             for p in processes]
    report = compute_rod(processes, references, costs, OracleConfig(0.0),
                         k=0.5)
    lines = report.curve_csv().splitlines()
    assert lines[0] == 'alpha,gap'
    assert len(lines) == len(report.curve) + 1


def test_missing_references(small_dataset):
    _, references, processes = small_dataset
    partial = dict(references)
    dropped = processes[2].instance.instance_id
    del partial[dropped]
    with pytest.raises(MissingReferences) as info:
        compute_rod(processes, partial, [1.0] * len(processes),
                    OracleConfig(0.0))
    assert dropped in str(info.value)


@pytest.mark.parametrize('k', [0.0, -0.1, 1.5])
def test_step_bounds(small_dataset, k):
    _, references, processes = small_dataset
    costs = [references[p.instance.instance_id].cost for p in processes]
    with pytest.raises(UsageError):
        compute_rod(processes, references, costs, OracleConfig(0.0), k=k)


@pytest.mark.slow
def test_oracle_recovers_its_own_accuracy():
    instances = random_instances(12, 200, seed=21)
    processes, references = [], {}
    for inst in instances:
        solution, table = held_karp(inst)
        references[inst.instance_id] = solution
        processes.append(as_process(inst, table))
    model = OracleConfig(0.9, rollouts_per_instance=16, seed=987)
    costs = [run_oracle(p, model).mean_cost for p in processes]
    config = OracleConfig(0.0, rollouts_per_instance=16, seed=1)
    report = compute_rod(processes, references, costs, config, k=0.01,
                         bisect=True, coarse_k=0.05)
    assert report.alpha == pytest.approx(0.9, abs=0.05)
