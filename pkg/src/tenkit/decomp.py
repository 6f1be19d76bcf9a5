"""Factored tensor models and the algorithms that fit them.

Models are value types (weights+factors for CP, core+factors for Tucker,
core chains for TT and TR) with reconstruction, fitting, and
orthogonalization. Factors are never unique (gauge freedom), so
correctness is always stated through reconstructions and invariants,
never through factor equality.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import DenseTensor, _tensor_from_nd, fold, matricize, permute, vec
from .elementwise import frobenius_norm
from .errors import ArgumentError, ModelError, NumericError
from .factor import _householder, _orthonormal_fill, default_rank_tol, pinv, qr, svd
from .io import read_tensor, write_tensor
from .products import mode_product, multi_mode_product, tt_pair_product

__all__ = [
    "CPModel",
    "CPFit",
    "TuckerModel",
    "TTTrain",
    "TRRing",
    "cp_reconstruct",
    "cp_als",
    "tucker_reconstruct",
    "hosvd",
    "truncated_hosvd",
    "tucker_orthogonalize",
    "tt_reconstruct",
    "tt_chain",
    "tt_svd",
    "tt_orthogonalize",
    "tt_split",
    "tr_reconstruct",
    "write_model",
    "read_model",
]


def _as_tuple(items) -> tuple:
    return tuple(items)


@dataclass(frozen=True)
class CPModel:
    """Weighted sum of rank-1 tensors: weights (R,) and per-mode (I_n, R) factors."""

    weights: DenseTensor
    factors: tuple[DenseTensor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", _as_tuple(self.factors))
        if self.weights.order != 1:
            raise ModelError(f"cp weights must be order-1, got order {self.weights.order}")
        if not self.factors:
            raise ModelError("cp model needs at least one factor")
        r = self.weights.size
        for n, f in enumerate(self.factors, start=1):
            if f.order != 2:
                raise ModelError(f"cp factor {n} must be order-2, got order {f.order}")
            if f.shape[1] != r:
                raise ModelError(f"cp factor {n} has {f.shape[1]} columns, expected rank {r}")

    @property
    def rank(self) -> int:
        return self.weights.size

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)


@dataclass(frozen=True)
class CPFit:
    """cp_als outcome: the best model, its residual-norm trace, winning restart."""

    model: CPModel
    trace: tuple[float, ...]
    restart: int


@dataclass(frozen=True)
class TuckerModel:
    """Core tensor (R_1,...,R_N) with per-mode (I_n, R_n) factors."""

    core: DenseTensor
    factors: tuple[DenseTensor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", _as_tuple(self.factors))
        if len(self.factors) != self.core.order:
            raise ModelError(
                f"tucker model has {len(self.factors)} factors for an order-{self.core.order} core"
            )
        for n, f in enumerate(self.factors, start=1):
            if f.order != 2:
                raise ModelError(f"tucker factor {n} must be order-2, got order {f.order}")
            if f.shape[1] != self.core.shape[n - 1]:
                raise ModelError(
                    f"tucker factor {n} has {f.shape[1]} columns, core mode has extent "
                    f"{self.core.shape[n - 1]}"
                )

    @property
    def ranks(self) -> tuple[int, ...]:
        return self.core.shape

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)


@dataclass(frozen=True)
class TTTrain:
    """Chain of order-3 cores; core n is (R_{n-1}, I_n, R_n).

    Full trains have unit boundary bonds; sub-trains may expose one side.
    discarded_energy records the squared singular mass dropped by a
    truncated fit (0.0 for exact construction).
    """

    cores: tuple[DenseTensor, ...]
    discarded_energy: float = field(default=0.0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cores", _as_tuple(self.cores))
        if not self.cores:
            raise ModelError("tt train needs at least one core")
        for n, c in enumerate(self.cores, start=1):
            if c.order != 3:
                raise ModelError(f"tt core {n} must be order-3, got order {c.order}")
        for n in range(len(self.cores) - 1):
            right = self.cores[n].shape[2]
            left = self.cores[n + 1].shape[0]
            if right != left:
                raise ModelError(
                    f"bond mismatch between cores {n + 1} and {n + 2}: {right} vs {left}"
                )

    @property
    def bond_ranks(self) -> tuple[int, ...]:
        return (self.cores[0].shape[0],) + tuple(c.shape[2] for c in self.cores)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)


@dataclass(frozen=True)
class TRRing:
    """Closed loop of order-3 cores; the last bond wraps around to the first."""

    cores: tuple[DenseTensor, ...]

    def __post_init__(self):
        object.__setattr__(self, "cores", _as_tuple(self.cores))
        if not self.cores:
            raise ModelError("tr ring needs at least one core")
        for n, c in enumerate(self.cores, start=1):
            if c.order != 3:
                raise ModelError(f"tr core {n} must be order-3, got order {c.order}")
        n = len(self.cores)
        for k in range(n):
            right = self.cores[k].shape[2]
            left = self.cores[(k + 1) % n].shape[0]
            if right != left:
                raise ModelError(
                    f"bond mismatch between cores {k + 1} and {(k + 1) % n + 1}: {right} vs {left}"
                )

    @property
    def bond_ranks(self) -> tuple[int, ...]:
        return (self.cores[0].shape[0],) + tuple(c.shape[2] for c in self.cores)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)


# --- CP ---------------------------------------------------------------------


def _kr_chain_desc(factors: Sequence[np.ndarray], skip: int | None = None) -> np.ndarray:
    """Khatri-Rao product of the factors in descending mode order, skipping one."""
    picked = [f for m, f in enumerate(factors) if m != skip]
    acc = picked[-1]
    for f in picked[-2::-1]:
        acc = (acc[:, None, :] * f[None, :, :]).reshape(-1, acc.shape[1])
    return acc


def cp_reconstruct(m: CPModel) -> DenseTensor:
    """Dense tensor of a CP model: sum_r weights[r] * outer(columns r)."""
    factors = [f._nd() for f in m.factors]
    flat = _kr_chain_desc(factors) @ m.weights.data
    return fold(DenseTensor((flat.size,), flat), m.shape)


def cp_als(
    x: DenseTensor,
    rank: int,
    *,
    max_sweeps: int = 200,
    tol: float = 1e-8,
    seed: int = 0,
    restarts: int = 3,
) -> CPFit:
    """Fit a rank-`rank` CP model by alternating least squares.

    Each sweep solves the matricized least-squares subproblem for every
    mode in turn (Khatri-Rao of the other factors against the
    pseudo-inverse of the Hadamard product of their Gram matrices), then
    renormalizes factor columns into the weights. Runs `restarts` seeded
    standard-normal initializations and keeps the best final residual.
    Stops a sweep loop early once the relative fit change drops below tol.
    """
    if x.order < 3:
        raise ArgumentError(f"cp_als needs an order >= 3 tensor, got order {x.order}")
    if rank < 1:
        raise ArgumentError(f"rank must be positive, got {rank}")
    if rank > x.size:
        raise ArgumentError(f"rank {rank} exceeds the element count {x.size}")
    if restarts < 1:
        raise ArgumentError(f"restarts must be positive, got {restarts}")
    if max_sweeps < 1:
        raise ArgumentError(f"max_sweeps must be positive, got {max_sweeps}")
    norm_x = frobenius_norm(x)
    mats = [matricize(x, n)._nd() for n in range(1, x.order + 1)]
    best: tuple[CPModel, tuple[float, ...], int] | None = None
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        factors = [rng.standard_normal((extent, rank)) for extent in x.shape]
        weights = np.ones(rank)
        trace: list[float] = []
        prev_rel = None
        for _ in range(max_sweeps):
            for n in range(x.order):
                kr = _kr_chain_desc(factors, skip=n)
                gram = np.ones((rank, rank))
                for m, f in enumerate(factors):
                    if m != n:
                        gram *= f.T @ f
                factors[n] = mats[n] @ kr @ pinv(_tensor_from_nd(gram))._nd()
            weights = np.ones(rank)
            for f in factors:
                norms = np.sqrt((f * f).sum(axis=0))
                safe = np.where(norms > 0.0, norms, 1.0)
                f /= safe
                weights = weights * norms
            approx1 = (factors[0] * weights) @ _kr_chain_desc(factors, skip=0).T
            resid = float(np.sqrt(((mats[0] - approx1) ** 2).sum()))
            if not math.isfinite(resid):
                raise NumericError("cp_als objective became non-finite")
            trace.append(resid)
            rel = resid / norm_x if norm_x > 0.0 else resid
            if prev_rel is not None and abs(prev_rel - rel) < tol:
                break
            prev_rel = rel
        model = CPModel(
            DenseTensor((rank,), weights),
            tuple(_tensor_from_nd(f) for f in factors),
        )
        if best is None or trace[-1] < best[1][-1]:
            best = (model, tuple(trace), restart)
    return CPFit(model=best[0], trace=best[1], restart=best[2])


# --- Tucker -----------------------------------------------------------------


def tucker_reconstruct(m: TuckerModel) -> DenseTensor:
    """Dense tensor of a Tucker model: core multiplied by every factor."""
    return multi_mode_product(m.core, m.factors)


def _transpose(t: DenseTensor) -> DenseTensor:
    return permute(t, [2, 1])


def hosvd(x: DenseTensor) -> TuckerModel:
    """Tucker model whose mode-n factor is the left singular basis of
    matricize(x, n); the core is all-orthogonal and reconstruction is exact."""
    if x.order < 2:
        raise ArgumentError(f"hosvd needs an order >= 2 tensor, got order {x.order}")
    factors = [svd(matricize(x, n)).u for n in range(1, x.order + 1)]
    core = multi_mode_product(x, [_transpose(u) for u in factors])
    return TuckerModel(core, tuple(factors))


def _leading_columns(u: np.ndarray, p: int) -> np.ndarray:
    if u.shape[1] >= p:
        return np.array(u[:, :p])
    padded = np.zeros((u.shape[0], p))
    padded[:, : u.shape[1]] = u
    _orthonormal_fill(padded, list(range(u.shape[1], p)))
    return padded


def truncated_hosvd(x: DenseTensor, ranks: Sequence[int]) -> TuckerModel:
    """Tucker model keeping the leading ranks[n] singular vectors per mode."""
    if x.order < 2:
        raise ArgumentError(f"truncated_hosvd needs an order >= 2 tensor, got order {x.order}")
    if len(ranks) != x.order:
        raise ArgumentError(f"need {x.order} ranks, got {len(ranks)}")
    for n, (p, extent) in enumerate(zip(ranks, x.shape), start=1):
        if not 1 <= p <= extent:
            raise ArgumentError(f"rank {p} for mode {n} out of range 1..{extent}")
    factors = []
    for n, p in enumerate(ranks, start=1):
        u = svd(matricize(x, n)).u._nd()
        factors.append(_tensor_from_nd(_leading_columns(u, p)))
    core = multi_mode_product(x, [_transpose(u) for u in factors])
    return TuckerModel(core, tuple(factors))


def tucker_orthogonalize(m: TuckerModel) -> TuckerModel:
    """QR every factor and fold the triangular parts into the core.

    Reconstruction is unchanged; afterwards the factors are column
    orthonormal, so the reconstruction norm equals the core norm.
    """
    core = m.core
    new_factors = []
    for n, f in enumerate(m.factors, start=1):
        res = qr(f)
        new_factors.append(res.q)
        core = mode_product(core, res.r, n)
    return TuckerModel(core, tuple(new_factors))


# --- TT ---------------------------------------------------------------------


def tt_chain(t: TTTrain) -> DenseTensor:
    """Contract all cores, keeping the boundary bond modes: (R_0, I_1..I_N, R_N)."""
    acc = t.cores[0]
    for core in t.cores[1:]:
        acc = tt_pair_product(acc, core)
    return acc


def tt_reconstruct(t: TTTrain) -> DenseTensor:
    """Dense tensor of a full train (both boundary bonds must be 1)."""
    ranks = t.bond_ranks
    if ranks[0] != 1 or ranks[-1] != 1:
        raise ModelError(f"tt_reconstruct needs unit boundary bonds, got {ranks[0]} and {ranks[-1]}")
    full = tt_chain(t)
    return fold(vec(full), full.shape[1:-1])


def tt_svd(
    x: DenseTensor,
    max_ranks: Sequence[int] | None = None,
    tol: float | None = None,
) -> TTTrain:
    """Sequential SVD factorization of x into a tensor train.

    With neither max_ranks nor tol this is exact: each split keeps the
    numerical rank of the current unfolding. max_ranks caps the N-1
    internal bonds; tol drops singular values below it at every split.
    The squared mass of everything dropped accumulates in the returned
    train's discarded_energy.
    """
    if x.order < 2:
        raise ArgumentError(f"tt_svd needs an order >= 2 tensor, got order {x.order}")
    n = x.order
    if max_ranks is not None:
        max_ranks = [int(r) for r in max_ranks]
        if len(max_ranks) != n - 1:
            raise ArgumentError(f"need {n - 1} bond caps, got {len(max_ranks)}")
        for r in max_ranks:
            if r < 1:
                raise ArgumentError(f"bond caps must be positive, got {r}")
    truncating = max_ranks is not None or tol is not None
    remainder = x.data
    bond = 1
    cores = []
    discarded = 0.0
    for k in range(n - 1):
        rows = bond * x.shape[k]
        mat = DenseTensor((rows, remainder.size // rows), remainder)
        res = svd(mat)
        s = res.sigma.data
        if truncating:
            keep = s.size
            if tol is not None:
                keep = int((s >= tol).sum())
            if max_ranks is not None:
                keep = min(keep, max_ranks[k])
        else:
            keep = int((s > default_rank_tol(s, mat.shape[0], mat.shape[1])).sum())
        keep = max(keep, 1)
        discarded += float((s[keep:] ** 2).sum())
        u = res.u._nd()[:, :keep]
        cores.append(DenseTensor((bond, x.shape[k], keep), u.ravel(order="F")))
        remainder = (s[:keep, None] * res.v._nd()[:, :keep].T).ravel(order="F")
        bond = keep
    cores.append(DenseTensor((bond, x.shape[-1], 1), remainder))
    return TTTrain(tuple(cores), discarded_energy=discarded)


def tt_orthogonalize(t: TTTrain, pivot: int) -> TTTrain:
    """Orthogonalize every core except the pivot (1-based core index).

    Cores left of the pivot become left-orthogonal (their (R_{k-1} I_k, R_k)
    reshape has orthonormal columns), cores right of it right-orthogonal;
    triangular factors are swept into the pivot, so the reconstruction is
    unchanged and the full norm concentrates in the pivot core.
    """
    n = len(t.cores)
    if not 1 <= pivot <= n:
        raise ArgumentError(f"pivot {pivot} out of range 1..{n}")
    arrs = [c._nd() for c in t.cores]
    for k in range(pivot - 1):
        r0, i, r1 = arrs[k].shape
        q, r = _householder(arrs[k].reshape(r0 * i, r1, order="F"))
        arrs[k] = q.reshape(r0, i, q.shape[1], order="F")
        arrs[k + 1] = np.tensordot(r, arrs[k + 1], axes=([1], [0]))
    for k in range(n - 1, pivot - 1, -1):
        r0, i, r1 = arrs[k].shape
        q, r = _householder(arrs[k].reshape(r0, i * r1, order="F").T)
        arrs[k] = q.T.reshape(q.shape[1], i, r1, order="F")
        arrs[k - 1] = np.tensordot(arrs[k - 1], r.T, axes=([2], [0]))
    return TTTrain(tuple(_tensor_from_nd(a) for a in arrs))


def tt_split(t: TTTrain, k: int) -> tuple[TTTrain, TTTrain]:
    """Split into sub-trains (cores 1..k-1) and (cores k..N) sharing bond R_{k-1}."""
    n = len(t.cores)
    if not 2 <= k <= n:
        raise ArgumentError(f"split point {k} out of range 2..{n}")
    return TTTrain(t.cores[: k - 1]), TTTrain(t.cores[k - 1 :])


# --- TR ---------------------------------------------------------------------


def tr_reconstruct(r: TRRing) -> DenseTensor:
    """Dense tensor of a ring: per-entry trace of the chained slice matrices."""
    acc = r.cores[0]._nd()
    for core in r.cores[1:]:
        acc = np.tensordot(acc, core._nd(), axes=([acc.ndim - 1], [0]))
    return _tensor_from_nd(np.trace(acc, axis1=0, axis2=acc.ndim - 1))


# --- model directories ------------------------------------------------------

_MANIFEST = "model.json"


def _write_manifest(path: str, kind: str, ranks: Sequence[int]) -> None:
    with open(os.path.join(path, _MANIFEST), "w", encoding="utf-8") as fh:
        fh.write(f"kind={kind}\n")
        fh.write("ranks=" + " ".join(str(r) for r in ranks) + "\n")


def write_model(dirpath: str | os.PathLike, model) -> None:
    """Write a model directory: a key-value manifest plus one .ten per part."""
    path = os.fspath(dirpath)
    os.makedirs(path, exist_ok=True)
    if isinstance(model, CPModel):
        _write_manifest(path, "cp", [model.rank])
        write_tensor(os.path.join(path, "weights.ten"), model.weights)
        for n, f in enumerate(model.factors, start=1):
            write_tensor(os.path.join(path, f"factor_{n}.ten"), f)
    elif isinstance(model, TuckerModel):
        _write_manifest(path, "tucker", model.ranks)
        write_tensor(os.path.join(path, "core.ten"), model.core)
        for n, f in enumerate(model.factors, start=1):
            write_tensor(os.path.join(path, f"factor_{n}.ten"), f)
    elif isinstance(model, TTTrain):
        _write_manifest(path, "tt", model.bond_ranks)
        for n, c in enumerate(model.cores, start=1):
            write_tensor(os.path.join(path, f"core_{n}.ten"), c)
    elif isinstance(model, TRRing):
        _write_manifest(path, "tr", model.bond_ranks)
        for n, c in enumerate(model.cores, start=1):
            write_tensor(os.path.join(path, f"core_{n}.ten"), c)
    else:
        raise ArgumentError(f"cannot serialize {type(model).__name__}")


def _read_series(path: str, prefix: str) -> list[DenseTensor]:
    out = []
    n = 1
    while True:
        fname = os.path.join(path, f"{prefix}_{n}.ten")
        if not os.path.exists(fname):
            break
        out.append(read_tensor(fname))
        n += 1
    if not out:
        raise ModelError(f"model directory has no {prefix}_1.ten")
    return out


def read_model(dirpath: str | os.PathLike):
    """Load a model directory written by write_model."""
    path = os.fspath(dirpath)
    manifest = os.path.join(path, _MANIFEST)
    try:
        with open(manifest, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read manifest '{manifest}': {exc.strerror or exc}") from None
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        m = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)=(.*)$", body)
        if m is None:
            raise ModelError(f"manifest line {lineno} is not key=value: {body!r}")
        entries[m.group(1)] = m.group(2).strip()
    kind = entries.get("kind")
    if kind not in ("cp", "tucker", "tt", "tr"):
        raise ModelError(f"manifest kind must be cp|tucker|tt|tr, got {kind!r}")
    try:
        ranks = tuple(int(v) for v in entries.get("ranks", "").split())
    except ValueError:
        raise ModelError(f"manifest ranks are not integers: {entries.get('ranks')!r}") from None
    if kind == "cp":
        weights_path = os.path.join(path, "weights.ten")
        if not os.path.exists(weights_path):
            raise ModelError("cp model directory has no weights.ten")
        model = CPModel(read_tensor(weights_path), tuple(_read_series(path, "factor")))
        stated = ranks == (model.rank,)
    elif kind == "tucker":
        core_path = os.path.join(path, "core.ten")
        if not os.path.exists(core_path):
            raise ModelError("tucker model directory has no core.ten")
        model = TuckerModel(read_tensor(core_path), tuple(_read_series(path, "factor")))
        stated = ranks == model.ranks
    elif kind == "tt":
        model = TTTrain(tuple(_read_series(path, "core")))
        stated = ranks == model.bond_ranks
    else:
        model = TRRing(tuple(_read_series(path, "core")))
        stated = ranks == model.bond_ranks
    if not stated:
        raise ModelError(
            f"manifest ranks {' '.join(map(str, ranks))} do not match the stored tensors"
        )
    return model
