"""Finite-difference building blocks shared by the spectrum check, the
boundary-value oracle and the time-domain solver.

The evolution operator discretizes A = -d/dx - d^3/dx^3 on the n interior
nodes of a uniform grid over [0, L], with y(0) = y(L) = 0 eliminated and
y'(L) = 0 folded in through a ghost edge.  The third derivative is assembled
in mixed form (second difference of staggered first differences); the left
closure uses the odd reflection w_0 = w_1, which makes the full operator
negative semidefinite in the discrete L2 inner product, so trapezoidal time
stepping cannot create energy.  Solution-level accuracy stays second order;
the closure's truncation is confined to the outflow boundary row.
"""

import math

import numpy as np
import scipy.sparse as sp


def fd_weights(offsets, order):
    """Finite-difference weights for d^order/dx^order at 0 on integer offsets.

    Returned weights are for unit spacing; divide by h**order for a grid
    with spacing h.
    """
    offsets = np.asarray(offsets, dtype=float)
    m = len(offsets)
    if order >= m:
        raise ValueError("need more than `order` points")
    V = np.vander(offsets, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def first_derivative(n, h):
    """Centered first derivative on interior nodes, Dirichlet ends (exactly skew)."""
    main = np.zeros(n)
    upper = np.full(n - 1, 1.0 / (2 * h))
    return sp.diags_array([-upper, main, upper], offsets=[-1, 0, 1], format="csr")


def third_derivative(n, h):
    """Mixed-form third derivative with dissipative closures.

    Edges carry w_k = (v_k - v_{k-1})/h, k = 1..n+1 with v_0 = v_{n+1} = 0;
    node values are (w_{i+2} - w_{i+1} - w_i + w_{i-1}) / (2 h^2).  Ghosts:
    w_0 = w_1 (odd reflection at the outflow end) and w_{n+2} = -w_{n+1}
    (centered y'(L) = 0).
    """
    B = sp.lil_array((n + 1, n))
    for k in range(1, n + 2):
        if k <= n:
            B[k - 1, k - 1] = 1.0 / h
        if k >= 2:
            B[k - 1, k - 2] = -1.0 / h
    ghost_left = np.zeros(n + 1)
    ghost_left[0] = 1.0
    ghost_right = np.zeros(n + 1)
    ghost_right[n] = -1.0
    M = sp.lil_array((n, n + 1))
    for i in range(1, n + 1):
        row = np.zeros(n + 1)
        for k, cf in ((i - 1, 1.0), (i, -1.0), (i + 1, -1.0), (i + 2, 1.0)):
            if k == 0:
                row += cf * ghost_left
            elif k == n + 2:
                row += cf * ghost_right
            else:
                row[k - 1] += cf
        M[i - 1] = row / (2 * h * h)
    return (M.tocsr() @ B.tocsr()).tocsr()


def evolution_operator(n, length):
    """A = -(D1 + D3) on the n interior nodes; returns (A_csr, h, nodes)."""
    h = length / (n + 1)
    A = -(first_derivative(n, h) + third_derivative(n, h))
    nodes = np.linspace(h, length - h, n)
    return A.tocsr(), h, nodes


def csr_to_banded(A, lower, upper):
    """Pack a sparse banded matrix into solve_banded's (lower+upper+1, n) layout."""
    A = A.tocoo()
    n = A.shape[0]
    ab = np.zeros((lower + upper + 1, n))
    for i, j, v in zip(A.row, A.col, A.data):
        if j - i > upper or i - j > lower:
            raise ValueError("entry outside declared bandwidth")
        ab[upper + i - j, j] = v
    return ab
