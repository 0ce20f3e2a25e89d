import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamedyn.game import (
    N_PAIRS,
    Game,
    GameValidationError,
    MixedProfile,
    expected_payoffs,
    load_treatment,
    pair_from_index,
    pair_index,
    payoff,
    read_game_file,
    role_of,
    unified_index,
)


@pytest.mark.parametrize("t", ["A", "B", "C"])
def test_embedded_treatments_are_zero_sum(t):
    g = load_treatment(t)
    for i in range(8):
        for j in range(8):
            assert g.payoff_x[i, j] + g.payoff_y[i, j] == 0


def test_known_cells():
    assert payoff(load_treatment("A"), 8, 5) == (8, -8)
    assert payoff(load_treatment("B"), 7, 5) == (10, -10)
    assert payoff(load_treatment("C"), 8, 7) == (10, -10)
    assert payoff(load_treatment("A"), 2, 4) == (1, -1)
    a = load_treatment("A")
    assert all(payoff(a, 1, j) == (0, 0) for j in range(1, 9))


def test_treatment_c_asterisk_cells_are_plain_numbers():
    c = load_treatment("c")
    assert c.payoff_x[0].tolist() == [0] * 8
    assert c.payoff_x.dtype == np.int64


def test_payoff_index_errors():
    a = load_treatment("A")
    with pytest.raises(IndexError):
        payoff(a, 0, 1)
    with pytest.raises(IndexError):
        payoff(a, 1, 9)


def test_unknown_treatment():
    with pytest.raises(KeyError):
        load_treatment("D")


def test_matrices_are_read_only():
    a = load_treatment("A")
    with pytest.raises(ValueError):
        a.payoff_x[0, 0] = 5


def test_non_zero_sum_names_cell():
    px = np.zeros((8, 8), dtype=int)
    py = np.zeros((8, 8), dtype=int)
    py[2, 5] = 1
    with pytest.raises(GameValidationError, match=r"X3, Y6"):
        Game("bad", px, py)


def test_custom_game_file(tmp_path):
    a = load_treatment("A")
    rows = [" ".join(f"{a.payoff_x[i, j]},{a.payoff_y[i, j]}" for j in range(8)) for i in range(8)]
    rows[0] = rows[0].replace("0,0", "*0,0", 1)
    f = tmp_path / "g.txt"
    f.write_text("mygame\n" + "\n".join(rows) + "\n")
    g = load_treatment(str(f))
    assert g.treatment == "mygame"
    assert np.array_equal(g.payoff_x, a.payoff_x)

    rows[3] = rows[3].replace("2,-2", "2,-1", 1)
    f.write_text("broken\n" + "\n".join(rows) + "\n")
    with pytest.raises(GameValidationError, match="X4"):
        read_game_file(f)


def test_expected_payoffs_examples():
    a = load_treatment("A")
    u_x, _ = expected_payoffs(a, MixedProfile.pure(1, 1))
    assert u_x.tolist() == [0, 0, 2, 2, 4, 4, 6, 6]

    u_x, _ = expected_payoffs(a, MixedProfile.uniform())
    assert np.allclose(u_x, a.payoff_x.mean(axis=1))

    y = np.array([0, 2 / 3, 0, 1 / 3, 0, 0, 0, 0])
    u_x, _ = expected_payoffs(a, MixedProfile(np.eye(8)[0], y))
    oracle = a.payoff_x.astype(float) @ y
    assert u_x[1] == pytest.approx(1 / 3) and u_x[5] == pytest.approx(1 / 3)
    assert np.allclose(u_x, oracle)


def test_mixed_profile_validation():
    with pytest.raises(ValueError):
        MixedProfile(np.full(8, 0.1), np.full(8, 0.125))
    with pytest.raises(ValueError):
        MixedProfile(np.r_[-0.1, 1.1, np.zeros(6)], np.full(8, 0.125))
    p = MixedProfile.from_vector(np.r_[np.eye(8)[2], np.eye(8)[4]])
    assert p.rho_x[2] == 1 and p.rho_y[4] == 1


def test_pair_index_examples():
    assert pair_index(1, 2) == 1
    assert pair_index(2, 10) == 23
    assert pair_index(12, 13) == 111
    assert pair_index(15, 16) == N_PAIRS
    with pytest.raises(ValueError):
        pair_index(3, 3)
    with pytest.raises(ValueError):
        pair_index(5, 2)


def test_pair_index_bijection():
    seen = [pair_index(m, n) for m in range(1, 17) for n in range(m + 1, 17)]
    assert sorted(seen) == list(range(1, 121))
    for x in range(1, 121):
        assert pair_index(*pair_from_index(x)) == x


def test_unified_index_bijection():
    got = {unified_index(r, s) for r in "XY" for s in range(1, 9)}
    assert got == set(range(1, 17))
    for u in range(1, 17):
        assert unified_index(*role_of(u)) == u


simplex8 = st.lists(st.floats(0.0, 1.0), min_size=8, max_size=8).filter(lambda v: sum(v) > 1e-3)


def _norm(v):
    v = np.asarray(v)
    return v / v.sum()


@settings(max_examples=60, deadline=None)
@given(simplex8, simplex8, simplex8, simplex8, st.floats(0.0, 1.0), st.sampled_from("ABC"))
def test_expected_payoffs_linear(px, py, qx, qy, alpha, t):
    g = load_treatment(t)
    p = MixedProfile(_norm(px), _norm(py))
    q = MixedProfile(_norm(qx), _norm(qy))
    mx = alpha * p.rho_x + (1 - alpha) * q.rho_x
    my = alpha * p.rho_y + (1 - alpha) * q.rho_y
    mix = MixedProfile(mx / mx.sum(), my / my.sum())
    up, uq, um = (expected_payoffs(g, r) for r in (p, q, mix))
    for k in range(2):
        assert np.allclose(um[k], alpha * up[k] + (1 - alpha) * uq[k], atol=1e-9)
