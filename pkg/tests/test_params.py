from fractions import Fraction

import pytest

from pcp_mwspp.errors import InvalidEpsilon, NotPowerOfTwo
from pcp_mwspp.params import compute_parameters


def test_half_epsilon_n_1024():
    rep = compute_parameters(0.5, 2 ** 10)
    assert rep.D == 8 and rep.log_n == 10
    assert rep.log_q == 10 ** 8
    assert rep.log_h == 10 ** 6
    assert rep.log_N_bound == 10 ** 10
    assert rep.ok and all(rep.verdicts.values())
    assert rep.notes == []


def test_h_is_q_to_the_inverse_log_squared():
    for eps, n in [(Fraction(1, 2), 2 ** 6), (Fraction(1, 4), 2 ** 12), (Fraction(1, 3), 2 ** 9)]:
        rep = compute_parameters(eps, n)
        assert rep.log_h * rep.log_n ** 2 == rep.log_q


def test_tiny_n_flags_failures():
    rep = compute_parameters(1, 4)
    assert not rep.ok
    assert not rep.verdicts["hyperedge_size_le_3m"]
    assert rep.to_json()["ok"] is False


@pytest.mark.parametrize("eps", [1, Fraction(1, 2), Fraction(1, 4), 0.5, 0.25])
def test_integral_d_has_no_rounding_note(eps):
    assert compute_parameters(eps, 2 ** 8).notes == []


def test_rounding_note_when_d_not_integral():
    rep = compute_parameters(0.3, 16)
    assert rep.D == 14 and rep.notes


def test_invalid_inputs():
    for eps in (0, -0.5, 1.5):
        with pytest.raises(InvalidEpsilon):
            compute_parameters(eps, 1024)
    for n in (2, 12, 1000):
        with pytest.raises(NotPowerOfTwo):
            compute_parameters(0.5, n)


@pytest.mark.parametrize("eps", [1, Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), 0.3])
def test_verdicts_monotone_in_n(eps):
    prev = None
    for k in range(4, 21):
        v = compute_parameters(eps, 2 ** k).verdicts
        if prev is not None:
            assert all(v[name] or not prev[name] for name in v), (eps, k)
        prev = v
    assert all(prev.values())
