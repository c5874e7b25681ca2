import numpy as np
import pytest
import scipy.sparse as sp

from rydsrp.core import (
    DensityMatrix,
    HilbertSpace,
    LevelError,
    Operator,
    SpaceMismatchError,
    StateVector,
    expectation,
    identity,
    ketbra,
    projector,
    tensor_product,
    transition_operator,
)

QUTRIT = ("g0", "g1", "r")


def test_identity_tensor_identity():
    q = HilbertSpace.single(("g0", "g1"))
    out = tensor_product(identity(q), identity(q))
    assert out.space.dim == 4
    np.testing.assert_array_equal(out.toarray(), np.eye(4))


def test_five_by_five_dimension():
    s = HilbertSpace.single(("g0", "g1", "r", "p1", "p2"))
    assert tensor_product(identity(s), identity(s)).space.dim == 25


def test_basis_action_site_one():
    s = HilbertSpace.single(QUTRIT)
    flip = tensor_product(transition_operator(s, 0, "g0", "g1"), identity(s))
    pair = HilbertSpace.pair(QUTRIT)
    np.testing.assert_array_equal(flip @ pair.basis("g0", "r"), pair.basis("g1", "r").vector)


def test_site_one_major_ordering():
    pair = HilbertSpace.pair(QUTRIT)
    assert pair.index(("g1", "r")) == 1 * 3 + 2
    assert pair.labels(5) == tuple(pair.sites[0][i] for i in (1,)) + (pair.sites[1][2],)


def test_transition_operator_elements():
    pair = HilbertSpace.pair(QUTRIT)
    op = transition_operator(pair, 0, "r", "g1").toarray()
    for x in QUTRIT:
        assert op[pair.index(("g1", x)), pair.index(("r", x))] == 1
    assert np.count_nonzero(op) == pair.dim // 3
    assert set(op[op != 0]) == {1}


def test_transition_adjoint_and_projector_trace():
    pair = HilbertSpace.pair(QUTRIT)
    a = transition_operator(pair, 1, "g0", "r")
    b = transition_operator(pair, 1, "r", "g0")
    np.testing.assert_array_equal(a.dag().toarray(), b.toarray())
    assert np.trace(transition_operator(pair, 1, "r", "r").toarray()) == pair.dim / 3


@pytest.mark.parametrize("site", [0, 1])
def test_transition_product_is_projector(site):
    pair = HilbertSpace.pair(QUTRIT)
    prod = transition_operator(pair, site, "g1", "r") @ transition_operator(pair, site, "r", "g1")
    np.testing.assert_array_equal(prod.toarray(), projector(pair, site, "r").toarray())


def test_unknown_level_rejected():
    pair = HilbertSpace.pair(QUTRIT)
    with pytest.raises(LevelError):
        transition_operator(pair, 0, "p1", "g0")
    with pytest.raises(LevelError):
        HilbertSpace.single(("g0", "bogus"))


def test_a_short_only_single_site():
    HilbertSpace.single(("g0", "g1", "r", "a_short"))
    with pytest.raises(LevelError):
        HilbertSpace.pair(("g0", "a_short"))


def test_dimension_overflow_rejected():
    big = HilbertSpace.single(("g0", "g1", "r", "p1", "p2", "alpha"))
    op = Operator(HilbertSpace(((*big.sites[0],), (*big.sites[0],))), sp.identity(36, format="csr"))
    with pytest.raises(ValueError):
        tensor_product(op, op)


def test_expectation_examples():
    pair = HilbertSpace.pair(("g0", "g1"))
    rho = pair.basis("g0", "g0").dm()
    assert expectation(rho, ketbra(pair, ("g0", "g0"), ("g0", "g0"))) == 1
    assert expectation(rho, ketbra(pair, ("g1", "g1"), ("g1", "g1"))) == 0
    mixed = DensityMatrix(pair, np.eye(4) / 4)
    assert expectation(mixed, identity(pair)) == pytest.approx(1.0)


def test_expectation_real_for_hermitian():
    rng = np.random.default_rng(3)
    pair = HilbertSpace.pair(QUTRIT)
    a = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    rho = a @ a.conj().T
    rho = DensityMatrix(pair, rho / np.trace(rho))
    h = a + a.conj().T
    assert abs(expectation(rho, Operator(pair, h)).imag) < 1e-10


def test_expectation_space_mismatch():
    pair = HilbertSpace.pair(("g0", "g1"))
    other = HilbertSpace.pair(QUTRIT)
    with pytest.raises(SpaceMismatchError):
        expectation(pair.basis("g0", "g0").dm(), identity(other))


def test_tensor_associative_on_integers():
    rng = np.random.default_rng(0)
    s = HilbertSpace.single(("g0", "g1"))
    t = HilbertSpace.single(("g0", "g1", "r"))
    a = Operator(s, rng.integers(-5, 5, (2, 2)))
    b = Operator(s, rng.integers(-5, 5, (2, 2)))
    c = Operator(t, rng.integers(-5, 5, (3, 3)))
    left = np.kron(tensor_product(a, b).toarray(), c.toarray())
    right = np.kron(a.toarray(), tensor_product(b, c).toarray())
    np.testing.assert_array_equal(left, right)


def test_double_adjoint_exact():
    rng = np.random.default_rng(1)
    pair = HilbertSpace.pair(QUTRIT)
    a = Operator(pair, rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)))
    np.testing.assert_array_equal(a.dag().dag().toarray(), a.toarray())


def test_state_and_density_validation():
    pair = HilbertSpace.pair(("g0", "g1"))
    with pytest.raises(ValueError):
        StateVector(pair, np.ones(4))
    with pytest.raises(ValueError):
        DensityMatrix(pair, np.eye(4))
    with pytest.raises(ValueError):
        DensityMatrix(pair, np.triu(np.ones((4, 4))) / 4)


def test_sparse_storage_tag():
    pair = HilbertSpace.pair(QUTRIT)
    op = Operator(pair, sp.identity(9, format="csr"))
    assert op.storage == "sparse"
    assert op.matrix.nnz == 9
    assert identity(pair).storage == "dense"
