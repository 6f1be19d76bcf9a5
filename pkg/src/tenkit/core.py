"""Dense tensor value type and reshaping operations.

Entries are stored flat in vectorization order: the first index varies
fastest, so the 1-based entry (i1, ..., iN) of a tensor with extents
(I1, ..., IN) sits at flat position 1 + sum_n (i_n - 1) * prod_{m<n} I_m.
For order 3 this is the familiar (k-1)*I*J + (j-1)*I + i. All public
indices, modes, and permutations are 1-based; flat numpy offsets stay
private to this module.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ArgumentError, BoundsError, ShapeError

Shape = tuple[int, ...]

__all__ = [
    "DenseTensor",
    "element_count",
    "linear_index",
    "multi_index",
    "permute",
    "vec",
    "fold",
    "matricize",
    "k_unfold",
    "subtensor",
    "zeros",
    "all_ones",
    "one_hot",
    "identity",
    "matrix_unit",
    "super_diagonal",
    "folding_operator",
]


def _check_shape(shape: Sequence[int]) -> Shape:
    out = []
    for n, extent in enumerate(shape, start=1):
        e = int(extent)
        if e != extent or e < 1:
            raise ShapeError(f"extent of mode {n} must be a positive integer, got {extent!r}")
        out.append(e)
    return tuple(out)


def element_count(shape: Sequence[int]) -> int:
    """Number of entries for a shape; the empty shape (a scalar) counts 1."""
    n = 1
    for e in shape:
        n *= int(e)
    return n


def _fmt_shape(shape: Sequence[int]) -> str:
    return "(" + ",".join(str(e) for e in shape) + ")"


class DenseTensor:
    """Immutable dense real tensor of any order (order 0 is a scalar).

    The data buffer is a read-only float64 array in vectorization order.
    Tensors are value types: every operation returns a fresh tensor (or a
    reinterpretation sharing the frozen buffer) and instances may be freely
    shared between threads.
    """

    __slots__ = ("_shape", "_data")

    def __init__(self, shape: Sequence[int], data):
        shape = _check_shape(shape)
        arr = np.array(data, dtype=np.float64).reshape(-1)
        need = element_count(shape)
        if arr.size != need:
            raise ShapeError(
                f"data length {arr.size} does not match shape {_fmt_shape(shape)} "
                f"with {need} entries"
            )
        arr.flags.writeable = False
        self._shape = shape
        self._data = arr

    @classmethod
    def _wrap(cls, shape: Shape, data: np.ndarray) -> "DenseTensor":
        # Internal no-copy constructor; data must already be flat, float64,
        # frozen, and of the right length.
        t = object.__new__(cls)
        t._shape = shape
        t._data = data
        return t

    @classmethod
    def from_array(cls, array) -> "DenseTensor":
        """Build a tensor from a numpy array (vectorized first-index-fastest)."""
        a = np.asarray(array, dtype=np.float64)
        return cls(a.shape, a.ravel(order="F"))

    @property
    def shape(self) -> Shape:
        return self._shape

    @property
    def order(self) -> int:
        return len(self._shape)

    @property
    def size(self) -> int:
        return self._data.size

    @property
    def data(self) -> np.ndarray:
        """Read-only flat view of the entries in vectorization order."""
        return self._data

    def _nd(self) -> np.ndarray:
        # N-dimensional read-only view; no copy (the buffer is contiguous).
        return self._data.reshape(self._shape, order="F")

    def to_array(self) -> np.ndarray:
        """N-dimensional numpy view of the entries (read-only)."""
        return self._nd()

    def at(self, *idx: int) -> float:
        """Entry at a 1-based multi-index."""
        return float(self._data[linear_index(idx, self._shape) - 1])

    def item(self) -> float:
        """The single entry of a scalar (order-0 or one-element) tensor."""
        if self._data.size != 1:
            raise ShapeError(f"item() needs exactly one entry, shape is {_fmt_shape(self._shape)}")
        return float(self._data[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self._shape == other._shape and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self._shape, self._data.tobytes()))

    def __repr__(self) -> str:
        if self.size <= 8:
            return f"DenseTensor(shape={_fmt_shape(self._shape)}, data={self._data.tolist()})"
        return f"DenseTensor(shape={_fmt_shape(self._shape)}, {self.size} entries)"


def _tensor_from_nd(array: np.ndarray) -> DenseTensor:
    flat = np.ascontiguousarray(array.ravel(order="F"), dtype=np.float64)
    flat.flags.writeable = False
    return DenseTensor._wrap(tuple(int(e) for e in array.shape), flat)


def linear_index(idx: Sequence[int], shape: Sequence[int]) -> int:
    """1-based flat position of a 1-based multi-index (first index fastest)."""
    shape = tuple(shape)
    if len(idx) != len(shape):
        raise ArgumentError(f"index has {len(idx)} entries for an order-{len(shape)} shape")
    flat = 0
    stride = 1
    for n, (i, extent) in enumerate(zip(idx, shape), start=1):
        if not 1 <= i <= extent:
            raise BoundsError(f"index {i} out of bounds for mode {n} (extent {extent})")
        flat += (i - 1) * stride
        stride *= extent
    return flat + 1


def multi_index(flat: int, shape: Sequence[int]) -> tuple[int, ...]:
    """Inverse of linear_index: 1-based multi-index of a 1-based flat position."""
    shape = tuple(shape)
    total = element_count(shape)
    if not 1 <= flat <= total:
        raise BoundsError(f"flat index {flat} out of bounds for shape {_fmt_shape(shape)} with {total} entries")
    rem = flat - 1
    idx = []
    for extent in shape:
        idx.append(rem % extent + 1)
        rem //= extent
    return tuple(idx)


def _check_permutation(p: Sequence[int], order: int) -> tuple[int, ...]:
    p = tuple(int(v) for v in p)
    if sorted(p) != list(range(1, order + 1)):
        raise ArgumentError(f"{list(p)} is not a permutation of 1..{order}")
    return p


def permute(x: DenseTensor, p: Sequence[int]) -> DenseTensor:
    """Mode permutation: mode k of the result is mode p[k] of the input."""
    p = _check_permutation(p, x.order)
    return _tensor_from_nd(x._nd().transpose([v - 1 for v in p]))


def vec(x: DenseTensor) -> DenseTensor:
    """Flatten to an order-1 tensor; the buffer is already in this order."""
    return DenseTensor._wrap((x.size,), x.data)


def fold(v: DenseTensor, target: Sequence[int]) -> DenseTensor:
    """Reshape an order-1 tensor into the target shape (inverse of vec)."""
    if v.order != 1:
        raise ShapeError(f"fold expects an order-1 tensor, got order {v.order}")
    shape = _check_shape(target)
    if element_count(shape) != v.size:
        raise ShapeError(f"cannot fold length {v.size} into shape {_fmt_shape(shape)}")
    return DenseTensor._wrap(shape, v.data)


def matricize(x: DenseTensor, n: int) -> DenseTensor:
    """Mode-n matricization: shape (I_n, prod of the other extents).

    Row i_n collects all mode-n fibers; columns follow vectorization order
    of the remaining modes. Implemented as permute-mode-to-front, then
    1-unfold.
    """
    if not 1 <= n <= x.order:
        raise ArgumentError(f"mode {n} out of range for order {x.order}")
    front = np.moveaxis(x._nd(), n - 1, 0)
    rows = x.shape[n - 1]
    return _tensor_from_nd(front.reshape((rows, x.size // rows), order="F"))


def k_unfold(x: DenseTensor, k: int) -> DenseTensor:
    """Split the modes after position k into columns; the buffer is unchanged."""
    if not 1 <= k <= x.order - 1:
        raise ArgumentError(f"split point {k} out of range for order {x.order} (need 1..{x.order - 1})")
    rows = element_count(x.shape[:k])
    return DenseTensor._wrap((rows, x.size // rows), x.data)


def subtensor(x: DenseTensor, sel: Sequence) -> DenseTensor:
    """Extract a sub-tensor; always copies.

    Each mode's selection is an int (the mode is dropped), a (m, n) pair for
    the closed 1-based range m..n, or ":" for the whole mode. A single fiber
    comes back as an order-1 tensor.
    """
    if len(sel) != x.order:
        raise ArgumentError(f"selection has {len(sel)} entries for an order-{x.order} tensor")
    indexer = []
    for mode, (s, extent) in enumerate(zip(sel, x.shape), start=1):
        if s == ":" or s is None:
            indexer.append(slice(None))
        elif isinstance(s, tuple):
            m, n = s
            if not (1 <= m <= n <= extent):
                raise BoundsError(f"range {m}:{n} out of bounds for mode {mode} (extent {extent})")
            indexer.append(slice(m - 1, n))
        else:
            i = int(s)
            if not 1 <= i <= extent:
                raise BoundsError(f"index {i} out of bounds for mode {mode} (extent {extent})")
            indexer.append(i - 1)
    return _tensor_from_nd(np.array(x._nd()[tuple(indexer)]))


def zeros(shape: Sequence[int]) -> DenseTensor:
    shape = _check_shape(shape)
    return DenseTensor(shape, np.zeros(element_count(shape)))


def all_ones(shape: Sequence[int]) -> DenseTensor:
    shape = _check_shape(shape)
    return DenseTensor(shape, np.ones(element_count(shape)))


def one_hot(i: int, length: int) -> DenseTensor:
    """Length-`length` vector with a single 1 at 1-based position i."""
    if length < 1:
        raise ArgumentError(f"one_hot length must be positive, got {length}")
    if not 1 <= i <= length:
        raise BoundsError(f"index {i} out of bounds for mode 1 (extent {length})")
    buf = np.zeros(length)
    buf[i - 1] = 1.0
    return DenseTensor((length,), buf)


def identity(n: int) -> DenseTensor:
    if n < 1:
        raise ArgumentError(f"identity size must be positive, got {n}")
    return DenseTensor.from_array(np.eye(n))


def matrix_unit(i: int, j: int, rows: int, cols: int) -> DenseTensor:
    """(rows, cols) matrix with a single 1 at 1-based entry (i, j)."""
    if rows < 1 or cols < 1:
        raise ArgumentError(f"matrix_unit size must be positive, got ({rows},{cols})")
    if not 1 <= i <= rows:
        raise BoundsError(f"index {i} out of bounds for mode 1 (extent {rows})")
    if not 1 <= j <= cols:
        raise BoundsError(f"index {j} out of bounds for mode 2 (extent {cols})")
    buf = np.zeros((rows, cols))
    buf[i - 1, j - 1] = 1.0
    return DenseTensor.from_array(buf)


def super_diagonal(order: int, size: int, weights: Sequence[float] | None = None) -> DenseTensor:
    """Order-`order` tensor with weights[r] at (r, ..., r) and 0 elsewhere.

    Weights default to all ones.
    """
    if order < 1:
        raise ArgumentError(f"super_diagonal order must be positive, got {order}")
    if size < 1:
        raise ArgumentError(f"super_diagonal size must be positive, got {size}")
    if weights is None:
        w = np.ones(size)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (size,):
            raise ArgumentError(f"super_diagonal needs {size} weights, got {w.size}")
    shape = (size,) * order
    buf = np.zeros(element_count(shape))
    stride = (size**order - 1) // (size - 1) if size > 1 else 0
    if size == 1:
        buf[0] = w[0]
    else:
        buf[::stride] = w
    return DenseTensor(shape, buf)


def folding_operator(shape: Sequence[int]) -> DenseTensor:
    """Order-(N+1) tensor reshaping a length-T vector into `shape` (T = its size).

    It is the T-by-T identity folded into (*shape, T): contracting its last
    mode against vec(X) reproduces fold(vec(X), shape).
    """
    shape = _check_shape(shape)
    total = element_count(shape)
    return fold(vec(identity(total)), shape + (total,))
