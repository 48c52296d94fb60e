import math
from fractions import Fraction

import pytest

from environment import CookieLaw, Deterministic
from lattice import ResourceLimitError
from oracle import (
    construction_enumerate,
    enumerate_auxiliary,
    enumerate_iid_annealed,
    enumerate_paths,
    final_x,
    girsanov_enumerate,
    golden_rows,
    oracle_expectation,
    total_probability,
    tv_distance,
)


def test_symmetric_law_is_uniform():
    atoms = enumerate_paths(2, 3, exact=True)
    assert len(atoms) == 64
    assert all(a.probability == Fraction(1, 64) for a in atoms)
    assert total_probability(atoms) == 1
    assert [a.steps for a in atoms] == sorted(a.steps for a in atoms)


def test_three_mechanisms_agree_exactly():
    env = Deterministic(0.5, 1)
    direct = enumerate_paths(2, 3, env, exact=True)
    constructed = construction_enumerate(2, 3, env, exact=True)
    reweighted = girsanov_enumerate(2, 3, env, exact=True)
    assert tv_distance(direct, constructed) == 0.0
    assert tv_distance(direct, reweighted) == 0.0


def test_mechanisms_agree_with_stacks():
    env = Deterministic([0.3, -0.6], 2)
    direct = enumerate_paths(3, 3, env)
    assert tv_distance(direct, construction_enumerate(3, 3, env)) < 1e-12
    assert tv_distance(direct, girsanov_enumerate(3, 3, env)) < 1e-12


def test_auxiliary_variables_are_enumerated_separately():
    env = Deterministic(0.5, 1)
    outcomes = list(enumerate_auxiliary(2, 3, env, exact=True))
    assert len(outcomes) == 64
    assert sum(o.probability for o in outcomes) == 1
    moved = [o for o in outcomes if o.eta[0] == 1]
    assert sum(o.probability for o in moved) == Fraction(1, 2)
    # başlangıçta kurabiye taze: ilk yatay adım ζ parasıyla, ortalaması β
    assert all(o.coins[0][0] == "zeta" for o in moved)
    assert sum(o.probability * o.coins[0][1] for o in moved) == Fraction(1, 4)
    # +e1, -e1 sonrası başlangıca ikinci ziyaret: adil ξ parası
    back = [o for o in outcomes if o.steps[:2] == (0, 1) and o.eta[2] == 1]
    assert len(back) == 2
    assert all(o.coins[2][0] == "xi" and o.jumps == () for o in back)
    assert sum(o.probability for o in back) == Fraction(1, 2) ** 3 * Fraction(3, 4) * Fraction(1, 4)


def test_first_step_drift():
    atoms = enumerate_paths(2, 1, Deterministic(0.5, 1))
    assert math.isclose(oracle_expectation(atoms, final_x), 0.25)


def test_annealed_iid_law():
    law = CookieLaw.parse("discrete:0.2,0.6")
    atoms = enumerate_iid_annealed(2, 3, law)
    assert math.isclose(total_probability(atoms), 1.0, abs_tol=1e-12)
    # dönüş olasılığı (4 - 2·0.4²)/16; geri dönüşte kurabiye yok
    assert math.isclose(oracle_expectation(atoms, final_x), 0.2 + 0.2 + 0.2 * (1 - (4 - 0.32) / 16), abs_tol=1e-12)
    assert tv_distance(atoms, enumerate_paths(2, 3, law)) == 0.0


def test_annealed_single_atom_is_quenched():
    law = CookieLaw.parse("discrete:0.4")
    assert tv_distance(enumerate_iid_annealed(2, 3, law), enumerate_paths(2, 3, Deterministic(0.4, 1))) < 1e-12


def test_finite_mixture():
    atoms = enumerate_paths(2, 1, [(1.0, Deterministic(0.2)), (1.0, Deterministic(0.6))])
    assert math.isclose(oracle_expectation(atoms, final_x), 0.2)


def test_size_limits():
    with pytest.raises(ResourceLimitError):
        enumerate_paths(4, 10, max_paths=10 ** 6)
    with pytest.raises(ValueError):
        enumerate_paths(2, 7, exact=True)
    with pytest.raises(ValueError):
        enumerate_iid_annealed(2, 2, CookieLaw.parse("discrete:0.1"), m=math.inf)


def test_golden_rows_format():
    rows = golden_rows(enumerate_paths(2, 2))
    assert rows[0] == ["0-0", repr(1 / 16)]
    assert rows[-1][0] == "3-3"
    assert len(rows) == 16
