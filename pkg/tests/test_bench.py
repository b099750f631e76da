import csv
import io
import json
from fractions import Fraction

import pytest

from cpnyield.bench import COLUMNS, load_config, run_bench, to_csv, trials
from cpnyield.fixtures import fig1
from cpnyield.netfile import FormatError, serialize_net

F = Fraction


def config(**over):
    d = {"seed": 3, "repetitions": 2, "instances": [{"lattice": [3, 3]}], "algorithms": ["binsearch", "milp"]}
    d.update(over)
    return json.dumps(d)


def test_two_rows_per_instance():
    rows = run_bench(load_config(config()))
    assert [r.algorithm for r in rows] == ["binsearch", "milp"]
    assert all(r.mean_seconds > 0 for r in rows)
    assert rows[0].cuts_mean is None and rows[1].mean_alr_call_seconds is None
    # the same trials are solved by both algorithms
    assert [v is None for v in rows[0].values] == [v is None for v in rows[1].values]


def test_csv_shape():
    rows = run_bench(load_config(config(repetitions=1)))
    table = list(csv.reader(io.StringIO(to_csv(rows))))
    assert tuple(table[0]) == COLUMNS
    assert len(table) == 3
    for line in table[1:]:
        assert line[2:4] == ["3", "3"] and line[5] == "1"
        assert len(line[6].split(".")[1]) == 5


def test_trials_are_reproducible():
    cfg = load_config(config())
    inst = cfg.instances[0]
    assert trials(inst, F(1, 10), 3, (0, 0), 4) == trials(inst, F(1, 10), 3, (0, 0), 4)
    assert trials(inst, F(1, 10), 3, (0, 0), 4) != trials(inst, F(1, 10), 4, (0, 0), 4)


def test_file_instance_and_fixed_goal(tmp_path):
    net, m0 = fig1()
    (tmp_path / "f1.json").write_text(serialize_net(net, m0))
    cfg = load_config(
        config(instances=[{"file": "f1.json", "goal": "p3", "resource_fractions": ["1/3", "1"]}], algorithms=["milp"]),
        tmp_path,
    )
    rows = run_bench(cfg)
    assert [r.resource_fraction for r in rows] == [F(1, 3), 1]
    assert rows[1].values == [21, 21]  # p3 keeps its unit; t2 hands p2 to p1, then t3 twice
    assert rows[0].rows is None


def test_parallel_mode_gives_the_same_answers():
    text = config(instances=[{"lattice": [3, 3]}, {"lattice": [3, 4]}], workers=2)
    a = run_bench(load_config(text))
    b = run_bench(load_config(config(instances=[{"lattice": [3, 3]}, {"lattice": [3, 4]}])))
    assert [(r.instance, r.algorithm, r.values) for r in a] == [(r.instance, r.algorithm, r.values) for r in b]


@pytest.mark.parametrize(
    "text",
    [
        config(instances=[{"file": "missing.json"}]),
        config(instances=[]),
        config(algorithms=["simplex"]),
        config(repetitions=0),
        config(instances=[{"lattice": [0, 3]}]),
        config(instances=[{"lattice": [3, 3], "resource_fractions": ["3/2"]}]),
        "{not json",
    ],
)
def test_bad_configs(text, tmp_path):
    with pytest.raises(FormatError):
        load_config(text, tmp_path)


def test_figure(tmp_path):
    from cpnyield.plotting import plot_bench

    rows = run_bench(load_config(config(repetitions=1, instances=[{"lattice": [2, 2]}, {"lattice": [3, 3]}])))
    out = plot_bench(rows, tmp_path / "fig" / "bench.png", title="demo")
    assert out.exists() and out.stat().st_size > 1000
