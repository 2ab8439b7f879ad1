#!/usr/bin/env python3
"""Exact reference costs for the bundled benchmark suites.

Solves each instance's binary program (assignment + median-count + capacity
constraints) with scipy's HiGHS MILP backend and prints the optimal cost per
instance, floored to an integer. The floored optima are the best_known.csv
values shipped with the suite; rerun this script after regenerating
instances.

Usage: python3 scripts/verify_best_known.py data/bench/*.txt
"""

import math
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, milp


def load_instance(path):
    with open(path) as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    n, p = int(tokens[0]), int(tokens[1])
    rows = np.array(tokens[2:], dtype=float).reshape(n, 5)
    xy = rows[:, 1:3]
    demand = rows[:, 3]
    capacity = rows[:, 4]
    return n, p, xy, demand, capacity


def solve_exact(n, p, xy, demand, capacity):
    d = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
    # variables: x_ij (n*n, node i -> median j), then y_j (n)
    nx = n * n
    cost = np.concatenate([d.reshape(-1), np.zeros(n)])

    constraints = []

    # each node assigned exactly once
    rows, cols = [], []
    for i in range(n):
        for j in range(n):
            rows.append(i)
            cols.append(i * n + j)
    a_assign = sparse.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(n, nx + n)
    )
    constraints.append(LinearConstraint(a_assign, 1.0, 1.0))

    # x_ij <= y_j
    rows, cols, vals = [], [], []
    for i in range(n):
        for j in range(n):
            r = i * n + j
            rows += [r, r]
            cols += [i * n + j, nx + j]
            vals += [1.0, -1.0]
    a_link = sparse.csr_matrix((vals, (rows, cols)), shape=(nx, nx + n))
    constraints.append(LinearConstraint(a_link, -np.inf, 0.0))

    # capacity per median
    rows, cols, vals = [], [], []
    for j in range(n):
        for i in range(n):
            rows.append(j)
            cols.append(i * n + j)
            vals.append(demand[i])
        rows.append(j)
        cols.append(nx + j)
        vals.append(-capacity[j])
    a_cap = sparse.csr_matrix((vals, (rows, cols)), shape=(n, nx + n))
    constraints.append(LinearConstraint(a_cap, -np.inf, 0.0))

    # exactly p medians
    a_count = sparse.csr_matrix(
        (np.ones(n), (np.zeros(n), nx + np.arange(n))), shape=(1, nx + n)
    )
    constraints.append(LinearConstraint(a_count, p, p))

    res = milp(
        c=cost,
        constraints=constraints,
        integrality=np.ones(nx + n),
        bounds=(0, 1),
        options={"mip_rel_gap": 0.0, "time_limit": 1800},
    )
    if not res.success:
        raise RuntimeError(f"MILP failed: {res.message}")
    return res.fun


def main(paths):
    print("instance,best_known")
    for path in paths:
        n, p, xy, demand, capacity = load_instance(path)
        opt = solve_exact(n, p, xy, demand, capacity)
        name = path.rsplit("/", 1)[-1].removesuffix(".txt")
        print(f"{name},{math.floor(opt + 1e-9)}", flush=True)
        print(f"  raw optimum {opt:.6f}", file=sys.stderr, flush=True)


if __name__ == "__main__":
    main(sys.argv[1:])
