import numpy as np
import pytest

import tenkit as tk
from tenkit import ParseError

from helpers import rand_shape, rand_tensor


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    for _ in range(20):
        t = rand_tensor(rng, rand_shape(rng, max_order=4))
        path = tmp_path / "t.ten"
        tk.write_tensor(path, t)
        assert tk.read_tensor(path) == t


def test_scalar_round_trip(tmp_path):
    s = tk.DenseTensor((), [-1.25e-7])
    tk.write_tensor(tmp_path / "s.ten", s)
    back = tk.read_tensor(tmp_path / "s.ten")
    assert back == s and back.order == 0


def test_comments_and_whitespace():
    text = """
    # a comment line
    order 2   # trailing comment
    shape 2 2
    data
    1 2
    3 4
    """
    t = tk.loads_tensor(text)
    assert t.shape == (2, 2) and t.data.tolist() == [1, 2, 3, 4]


def test_seventeen_digits_round_trip():
    t = tk.DenseTensor((3,), [1 / 3, np.pi, 1e-300])
    assert tk.loads_tensor(tk.dumps_tensor(t)) == t


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        tk.loads_tensor("order x\nshape\ndata\n")
    assert err.value.line == 1

    with pytest.raises(ParseError) as err:
        tk.loads_tensor("order 2\nshape 2\ndata 1 2")
    assert err.value.line is not None

    with pytest.raises(ParseError) as err:
        tk.loads_tensor("order 1\nshape 2\ndata\n1.0\nbogus")
    assert err.value.line == 5

    with pytest.raises(ParseError) as err:
        tk.loads_tensor("order 1\nshape 2\ndata\n1.0 2.0 3.0")
    assert err.value.line == 4


def test_missing_file():
    with pytest.raises(ParseError):
        tk.read_tensor("/nonexistent/path/x.ten")
