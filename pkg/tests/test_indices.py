import pytest
from hypothesis import given
from hypothesis import strategies as st

from core.indices import (
    FreqIndex,
    MultiIndex,
    canonicalize,
    odd_root,
    parallel,
    pringsheim_rectangles,
    primitive_root,
    ridge_indices,
    square_order,
)

nonzero_vectors = st.lists(st.integers(-20, 20), min_size=1, max_size=4).filter(any)


@pytest.mark.parametrize(
    "k, expected, sign",
    [
        ((0, -2, 1), (0, 2, -1), -1),
        ((3, -1), (3, -1), 1),
        ((0, 0, 5), (0, 0, 5), 1),
    ],
)
def test_canonicalize(k, expected, sign):
    canonical, s = canonicalize(k)
    assert canonical.entries == expected
    assert canonical.canonical
    assert s == sign


@given(nonzero_vectors)
def test_canonicalize_is_sign_invariant(k):
    plus, s_plus = canonicalize(k)
    minus, s_minus = canonicalize([-e for e in k])
    assert plus.entries == minus.entries
    assert s_plus == -s_minus


def test_invalid_indices():
    with pytest.raises(ValueError):
        FreqIndex((0, 0))
    with pytest.raises(ValueError):
        FreqIndex((-1, 2), canonical=True)
    with pytest.raises(ValueError):
        FreqIndex((1.5, 2))
    with pytest.raises(ValueError):
        MultiIndex((1, 0))
    with pytest.raises(ValueError):
        MultiIndex(())


def test_multi_index_order():
    assert MultiIndex((1, 2)) <= MultiIndex((2, 2))
    assert not MultiIndex((3, 1)) <= MultiIndex((2, 2))


def test_square_order_examples():
    assert [m.entries for m in square_order(2, 2)] == [(1, 1), (1, 2), (2, 2), (2, 1)]
    assert [m.entries for m in square_order(1, 3)] == [(1,), (2,), (3,)]
    assert [m.entries for m in square_order(2, 3)][4:] == [(1, 3), (2, 3), (3, 3), (3, 2), (3, 1)]


@pytest.mark.parametrize("n, N", [(2, 5), (3, 4)])
def test_square_order_prefixes_are_squares(n, N):
    order = square_order(n, N)
    assert len(order) == N ** n
    assert len({m.entries for m in order}) == N ** n
    for side in range(1, N + 1):
        assert all(max(m.entries) <= side for m in order[: side ** n])


def test_pringsheim_rectangles():
    stages = pringsheim_rectangles(2, [1, 2])
    assert [s.bounds for s in stages] == [((1, 1),), ((2, 2),)]
    assert pringsheim_rectangles(3, [4])[0].bounds == ((4, 4, 4),)
    stages = pringsheim_rectangles(2, [1, 2], shapes=[(2, 5), (5, 2)])
    assert stages[1].bounds == ((2, 2), (2, 5), (5, 2))
    with pytest.raises(ValueError):
        pringsheim_rectangles(2, [4, 2])


def test_ridge_indices():
    indices = ridge_indices(2, 1)
    assert [k.entries for k in indices] == [(0, 1), (1, -1), (1, 0), (1, 1)]
    assert len(ridge_indices(3, 2)) == (5 ** 3 - 1) // 2
    assert all(k.is_oriented() for k in ridge_indices(3, 2))


def test_roots_and_parallel():
    root, a = primitive_root(FreqIndex((4, -6), canonical=True))
    assert root.entries == (2, -3) and a == 2
    root, u = odd_root(FreqIndex((6, 12), canonical=True))
    assert root.entries == (2, 4) and u == 3
    assert parallel((2, -4), (-1, 2))
    assert not parallel((1, 2), (2, 1))
