"""Degenerate inputs: malformed files, scalars, zero tensors, deep orders."""

import numpy as np
import pytest

import tenkit as tk
from tenkit import ParseError, TenkitError

from helpers import rand_tensor

BAD_TN = [
    "node",
    "node A",
    "node A [",
    "node A [i] @",
    "output",
    "output [",
    ";;;",
    "node A [i=x] = 1",
    "node A [i=2] 1 2",
    "node A [i=2] = one",
    "node 9bad [i=2] = 1 2\noutput [i]",
    "node A [i=0] = \noutput [i]",
    "[i]",
    "node A [i=2] = 1 2\noutput [i] extra",
]

BAD_TEN = [
    "",
    "order",
    "order -1",
    "order 2\nshape -2 2\ndata\n1 2 3 4",
    "order 1\nshape 2\ndata\n1",
    "data\norder 1\nshape 1\n1",
]


@pytest.mark.parametrize("text", BAD_TN)
def test_malformed_tn_raises_cleanly(text):
    with pytest.raises(TenkitError):
        tk.parse_network(text)


@pytest.mark.parametrize("text", BAD_TEN)
def test_malformed_ten_raises_cleanly(text):
    with pytest.raises(ParseError):
        tk.loads_tensor(text)


def test_scalar_network_evaluates():
    net = tk.parse_network("node S [] = 3.14\noutput []")
    val = tk.evaluate(net, tk.plan(net))
    assert val.order == 0 and val.item() == 3.14


def test_scalar_pair_network_multiplies():
    net = tk.parse_network("node S [] = 3.0; node T [] = 4.0; output []")
    assert tk.evaluate(net, tk.plan(net)).item() == 12.0


def test_zero_tensor_through_every_decomposition():
    z = tk.zeros((3, 3, 3))
    assert tk.frobenius_norm(tk.tucker_reconstruct(tk.hosvd(z))) == 0.0
    assert tk.frobenius_norm(tk.tucker_reconstruct(tk.truncated_hosvd(z, (1, 1, 1)))) == 0.0
    train = tk.tt_svd(z)
    assert train.bond_ranks == (1, 1, 1, 1)
    assert tk.frobenius_norm(tk.tt_reconstruct(train)) == 0.0
    fit = tk.cp_als(z, 1, max_sweeps=3, restarts=1)
    assert fit.trace[-1] == 0.0


def test_order_five_tt_svd_exact():
    rng = np.random.default_rng(0)
    x = rand_tensor(rng, (2, 3, 2, 3, 2))
    train = tk.tt_svd(x)
    rel = tk.frobenius_norm(tk.subtract(x, tk.tt_reconstruct(train))) / tk.frobenius_norm(x)
    assert rel <= 1e-10


def test_super_diagonal_composes_through_tt_product():
    # chaining two order-3 super-diagonals over one bond gives the order-4 one
    i3 = tk.super_diagonal(3, 4)
    assert tk.tensor_product(i3, i3, [(3, 1)]) == tk.super_diagonal(4, 4)
