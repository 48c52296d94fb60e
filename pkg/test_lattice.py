import numpy as np
import pytest

from lattice import (
    STREAM_BLOCK,
    Direction,
    LatticePoint,
    SeedSpec,
    derive_stream,
    direction_from_index,
    directions,
    row_labels,
    step,
    step_vectors,
)
from replicates import run_replicates


def _draw(task):
    master, stream_id = task
    return float(derive_stream(SeedSpec(master, stream_id)).random())


def test_directions_fixed_order():
    dirs = directions(3)
    assert len(dirs) == 6
    assert dirs[0] == Direction(0, 1)
    assert dirs[1] == Direction(0, -1)
    assert dirs[2] == Direction(1, 1)
    assert all(direction_from_index(d.index, 3) == d for d in dirs)
    assert -Direction(2, 1) == Direction(2, -1)
    assert dirs[0].is_horizontal and not dirs[2].is_horizontal


def test_step_vectors_match_directions():
    table = step_vectors(4)
    for i, direction in enumerate(directions(4)):
        assert np.array_equal(table[i], direction.vector(4))


def test_step_moves_one_coordinate():
    p = LatticePoint.origin(3)
    q = step(step(p, Direction(0, 1)), Direction(2, -1))
    assert q.coords == (1, 0, -1)
    assert q.horizontal == 1
    assert q.vertical == (0, -1)


def test_invalid_lattice_arguments():
    with pytest.raises(ValueError):
        LatticePoint((1,))
    with pytest.raises(ValueError):
        step(LatticePoint.origin(2), Direction(2, 1))
    with pytest.raises(ValueError):
        Direction(0, 2)
    with pytest.raises(ValueError):
        direction_from_index(4, 2)


def test_seed_child_stream_ids():
    seed = SeedSpec(7)
    assert seed.child(0, 5).stream_id == 5
    assert seed.child(3, 1).stream_id == 3 * STREAM_BLOCK + 1
    assert seed.child(3, 1).master_seed == 7
    with pytest.raises(ValueError):
        SeedSpec(-1)
    with pytest.raises(ValueError):
        SeedSpec(0, 2 ** 64)
    with pytest.raises(ValueError):
        seed.child(0, STREAM_BLOCK)


def test_streams_are_reproducible_and_distinct():
    a = derive_stream(SeedSpec(11, 3)).random(5)
    b = derive_stream(SeedSpec(11, 3)).random(5)
    c = derive_stream(SeedSpec(11, 4)).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_row_labels_equal_rows_equal_labels():
    points = np.array([[0, 0], [1, 0], [0, 0], [1, 1], [1, 0]])
    labels = row_labels(points)
    assert labels[0] == labels[2]
    assert labels[1] == labels[4]
    assert len(set(labels.tolist())) == 3


def test_run_replicates_independent_of_worker_count():
    tasks = [(5, i) for i in range(40)]
    serial = run_replicates(_draw, tasks, threads=1)
    pooled = run_replicates(_draw, tasks, threads=3)
    assert serial == pooled
    assert run_replicates(_draw, [], threads=4) == []
