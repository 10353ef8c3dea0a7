import numpy as np
import pytest

from annulus_bvp.kernel import KernelDomainError, green, green_diag

GRID = np.linspace(0.0, 1.0, 101)
T, S = np.meshgrid(GRID, GRID, indexing="ij")


def test_examples():
    assert green(0.5, 0.5) == 0.25
    assert green(0.75, 0.25) == 0.0625
    assert green_diag(0.5) == 0.25
    assert green_diag(0.0) == 0.0
    assert green_diag(0.25) == 0.1875
    assert np.all(green(0.0, GRID) == 0) and np.all(green(1.0, GRID) == 0)


def test_symmetry_exact():
    G = green(T, S)
    assert np.array_equal(G, G.T)


def test_positive_inside():
    G = green(T, S)
    assert np.all(G[1:-1, 1:-1] > 0)


def test_upper_bound():
    assert np.all(green(T, S) <= green_diag(S))


def test_quarter_lower_bound():
    mask = (GRID >= 0.25) & (GRID <= 0.75)
    G = green(T[mask], S[mask])
    assert np.all(G >= 0.25 * green_diag(S[mask]))


def test_diagonal_ties():
    assert np.array_equal(green(GRID, GRID), green_diag(GRID))
    assert np.array_equal(green_diag(GRID), GRID * (1 - GRID))


@pytest.mark.parametrize("t,s", [(-0.1, 0.5), (0.5, 1.5), (np.nan, 0.5)])
def test_domain(t, s):
    with pytest.raises(KernelDomainError):
        green(t, s)
