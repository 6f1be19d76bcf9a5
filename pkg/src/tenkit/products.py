"""Matrix, Kronecker, Khatri-Rao, mode, and general tensor products.

Index composition follows the overline convention of the storage order:
in a combined index like (i-bar, p-bar) the second factor varies fastest,
so kronecker(A, B) of an (I,J) and a (P,Q) matrix is the (PI, QJ) block
matrix whose (p-bar-i, q-bar-j) entry is A[i,j] * B[p,q].
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import DenseTensor, _tensor_from_nd
from .errors import ArgumentError, ShapeError

__all__ = [
    "matmul",
    "trace",
    "kronecker",
    "khatri_rao",
    "mode_product",
    "multi_mode_product",
    "tensor_product",
    "tt_pair_product",
]


def _need_order2(t: DenseTensor, what: str) -> None:
    if t.order != 2:
        raise ShapeError(f"{what} expects an order-2 tensor, got order {t.order}")


def matmul(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    _need_order2(a, "matmul")
    _need_order2(b, "matmul")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul mismatch: ({a.shape[0]},{a.shape[1]}) times ({b.shape[0]},{b.shape[1]})")
    return _tensor_from_nd(a._nd() @ b._nd())


def trace(s: DenseTensor) -> float:
    _need_order2(s, "trace")
    if s.shape[0] != s.shape[1]:
        raise ShapeError(f"trace needs a square matrix, got ({s.shape[0]},{s.shape[1]})")
    return float(np.trace(s._nd()))


def kronecker(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    """Kronecker product: all entry pairs A[i,j]*B[p,q] as a (PI, QJ) block matrix."""
    _need_order2(a, "kronecker")
    _need_order2(b, "kronecker")
    return _tensor_from_nd(np.kron(a._nd(), b._nd()))


def khatri_rao(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    """Column-wise Kronecker product of (I,R) and (J,R) matrices, giving (JI, R)."""
    _need_order2(a, "khatri_rao")
    _need_order2(b, "khatri_rao")
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"khatri_rao needs equal column counts, got {a.shape[1]} and {b.shape[1]}")
    an, bn = a._nd(), b._nd()
    out = (an[:, None, :] * bn[None, :, :]).reshape(a.shape[0] * b.shape[0], a.shape[1])
    return _tensor_from_nd(out)


def mode_product(x: DenseTensor, a: DenseTensor, n: int) -> DenseTensor:
    """Multiply matrix a into mode n of x: matricize(result, n) = a @ matricize(x, n)."""
    if not 1 <= n <= x.order:
        raise ArgumentError(f"mode {n} out of range for order {x.order}")
    _need_order2(a, "mode_product")
    if a.shape[1] != x.shape[n - 1]:
        raise ShapeError(
            f"mode_product mismatch on mode {n}: matrix has {a.shape[1]} columns, "
            f"mode extent is {x.shape[n - 1]}"
        )
    moved = np.tensordot(a._nd(), x._nd(), axes=([1], [n - 1]))
    return _tensor_from_nd(np.moveaxis(moved, 0, n - 1))


def multi_mode_product(g: DenseTensor, mats: Sequence[DenseTensor | None]) -> DenseTensor:
    """Apply one optional matrix per mode, in ascending mode order.

    A None slot leaves that mode untouched (the all-but-one-mode product is
    the case with exactly one None).
    """
    if len(mats) != g.order:
        raise ArgumentError(f"need one matrix slot per mode: got {len(mats)} for order {g.order}")
    out = g
    for n, a in enumerate(mats, start=1):
        if a is not None:
            out = mode_product(out, a, n)
    return out


def tensor_product(a: DenseTensor, b: DenseTensor, pairing: Sequence[tuple[int, int]]) -> DenseTensor:
    """Contract paired modes of two tensors; an empty pairing is the outer product.

    Free modes of a (in their original order) come first, then free modes
    of b. Each (n, m) pair contracts mode n of a against mode m of b.
    """
    ns, ms = [], []
    for n, m in pairing:
        if not 1 <= n <= a.order:
            raise ArgumentError(f"pair ({n},{m}): mode {n} out of range for left order {a.order}")
        if not 1 <= m <= b.order:
            raise ArgumentError(f"pair ({n},{m}): mode {m} out of range for right order {b.order}")
        ns.append(n)
        ms.append(m)
    if len(set(ns)) != len(ns) or len(set(ms)) != len(ms):
        raise ArgumentError(f"paired modes must be distinct on each side, got {list(pairing)}")
    for n, m in pairing:
        if a.shape[n - 1] != b.shape[m - 1]:
            raise ShapeError(
                f"pair ({n},{m}): extent {a.shape[n - 1]} of left mode {n} "
                f"!= extent {b.shape[m - 1]} of right mode {m}"
            )
    out = np.tensordot(a._nd(), b._nd(), axes=([n - 1 for n in ns], [m - 1 for m in ms]))
    return _tensor_from_nd(out)


def tt_pair_product(x: DenseTensor, y: DenseTensor) -> DenseTensor:
    """Contract the last mode of x against the first mode of y."""
    if x.order < 1 or y.order < 1:
        raise ShapeError("tt_pair_product operands must have order >= 1")
    if x.shape[-1] != y.shape[0]:
        raise ShapeError(
            f"tt_pair_product mismatch: last extent {x.shape[-1]} != first extent {y.shape[0]}"
        )
    return tensor_product(x, y, [(x.order, 1)])
