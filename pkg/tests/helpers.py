"""Shared oracles and generators, independent of the library's own index math."""

import itertools
import math

import numpy as np

import tenkit as tk


def enumerate_indices(shape):
    """All 1-based multi-indices of a shape in storage order (first index fastest)."""
    if not shape:
        return [()]
    ranges = [range(1, e + 1) for e in reversed(shape)]
    return [tuple(reversed(t)) for t in itertools.product(*ranges)]


def position_map(shape):
    """1-based flat position of every multi-index, by explicit enumeration."""
    return {idx: pos for pos, idx in enumerate(enumerate_indices(shape), start=1)}


def rand_tensor(rng, shape):
    size = 1
    for e in shape:
        size *= e
    return tk.DenseTensor(shape, rng.standard_normal(size))


def rand_shape(rng, max_order=6, max_extent=4, min_order=1):
    order = int(rng.integers(min_order, max_order + 1))
    return tuple(int(rng.integers(1, max_extent + 1)) for _ in range(order))


def rel_err(got, want):
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    scale = np.linalg.norm(want.ravel())
    return float(np.linalg.norm((got - want).ravel())) / (scale if scale > 0 else 1.0)


def reconstruct_err(x, approx):
    return rel_err(approx.to_array(), x.to_array())


def sym3_eigvals(g):
    """Eigenvalues of a symmetric 3x3 matrix from its characteristic polynomial.

    Closed-form trigonometric solution; descending order. Used as an
    SVD-independent oracle for singular values (sigma_i^2 of M are the
    eigenvalues of M^T M).
    """
    g = np.asarray(g, dtype=float)
    p1 = g[0, 1] ** 2 + g[0, 2] ** 2 + g[1, 2] ** 2
    if p1 == 0.0:
        return tuple(sorted((g[0, 0], g[1, 1], g[2, 2]), reverse=True))
    q = (g[0, 0] + g[1, 1] + g[2, 2]) / 3.0
    p2 = (g[0, 0] - q) ** 2 + (g[1, 1] - q) ** 2 + (g[2, 2] - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b = (g - q * np.eye(3)) / p
    det_b = (
        b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
        - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
        + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0])
    )
    r = min(1.0, max(-1.0, det_b / 2.0))
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return (e1, 3.0 * q - e1 - e3, e3)


def random_network(rng, max_nodes=6, max_extent=4, max_terms=20000):
    """Random valid network: spanning-tree bonds, a few extra bonds, free labels."""
    while True:
        n = int(rng.integers(2, max_nodes + 1))
        node_labels = [[] for _ in range(n)]
        extents = {}
        counter = itertools.count(1)

        def bond(i, j, prefix):
            lab = f"{prefix}{next(counter)}"
            node_labels[i].append(lab)
            node_labels[j].append(lab)
            extents[lab] = int(rng.integers(1, max_extent + 1))

        for k in range(1, n):
            bond(k, int(rng.integers(0, k)), "b")
        for _ in range(int(rng.integers(0, 3))):
            i, j = rng.choice(n, size=2, replace=False)
            bond(int(i), int(j), "c")
        free = []
        for k in range(n):
            if rng.random() < 0.6:
                lab = f"f{next(counter)}"
                node_labels[k].append(lab)
                free.append(lab)
                extents[lab] = int(rng.integers(1, max_extent + 1))
        if any(not ls or len(ls) > 5 for ls in node_labels):
            continue
        terms = 1
        for e in extents.values():
            terms *= e
        if terms > max_terms:
            continue
        nodes = []
        for k in range(n):
            shape = tuple(extents[l] for l in node_labels[k])
            nodes.append((f"n{k}", tuple(node_labels[k]), rand_tensor(rng, shape)))
        out = list(free)
        rng.shuffle(out)
        return tk.TensorNetwork(nodes, tuple(out))


def random_plan_steps(net, rng):
    """A uniformly random valid pairwise contraction order."""
    alive = list(net.node_names)
    steps = []
    while len(alive) > 1:
        i, j = sorted(rng.choice(len(alive), size=2, replace=False))
        steps.append((alive[int(i)], alive[int(j)]))
        alive.pop(int(j))
    return steps


def network_loop_oracle(net):
    """Brute-force network value: sum over every assignment of every label."""
    labels = sorted({l for nm in net.node_names for l in net.labels(nm)})
    gpos = {l: i for i, l in enumerate(labels)}
    nodes = []
    for nm in net.node_names:
        nl = net.labels(nm)
        t = net.tensor(nm)
        strides = [0] * len(labels)
        s = 1
        for pos, l in enumerate(nl):
            strides[gpos[l]] = s
            s *= t.shape[pos]
        nodes.append((strides, t.data.tolist()))
    out_pos = [gpos[l] for l in net.output]
    out_shape = tuple(net.extent(l) for l in net.output)
    acc = np.zeros(out_shape if out_shape else ())
    for assign in itertools.product(*[range(net.extent(l)) for l in labels]):
        p = 1.0
        for strides, data in nodes:
            flat = 0
            for g, s in zip(assign, strides):
                if s:
                    flat += g * s
            p *= data[flat]
        acc[tuple(assign[i] for i in out_pos)] += p
    return acc


def planted_cp_factors(rng, shape, rank, max_cond=5.0):
    """Well-conditioned random factors for exact-recovery tests (by rejection)."""
    while True:
        factors = [rng.standard_normal((extent, rank)) for extent in shape]
        if max(np.linalg.cond(f) for f in factors) < max_cond:
            return factors


def planted_tt_train(rng, extents, bonds):
    """Random train with the given bond ranks; rejects rank-deficient cores."""
    while True:
        cores = []
        for k, extent in enumerate(extents):
            shape = (bonds[k], extent, bonds[k + 1])
            cores.append(rand_tensor(rng, shape))
        train = tk.TTTrain(tuple(cores))
        x = tk.tt_reconstruct(train)
        ok = True
        for k in range(1, len(extents)):
            if tk.numerical_rank(tk.k_unfold(x, k)) != bonds[k]:
                ok = False
                break
        if ok:
            return train, x
