"""Shared helpers: independent reference implementations used as oracles.

These deliberately avoid the package's evaluation and enumeration code paths:
term index tuples are re-derived from itertools, full enumeration walks plain
integer bit patterns, and values are accumulated term by term.
"""
import itertools

import numpy as np

import crossearch as cx


def ordered_tuples(n_dims: int, order: int):
    """All index tuples of one order, sorted by reversed tuple (canonical)."""
    return sorted(itertools.combinations(range(n_dims), order), key=lambda t: t[::-1])


def naive_value(cf, state) -> float:
    """Evaluate by iterating every term explicitly."""
    x = np.asarray(state, dtype=np.float64)
    total = 0.0
    for order in range(1, cf.max_order + 1):
        for coef, tup in zip(cf.order_block(order), ordered_tuples(cf.n_dims, order)):
            total += float(coef) * float(np.prod(x[list(tup)]))
    return total


def enumerate_all(cf):
    """(states, values) over the full search space, via integer bit patterns."""
    n = cf.n_dims
    codes = np.arange(2**n, dtype=np.int64)
    states = (1 - 2 * ((codes[:, None] >> np.arange(n)) & 1)).astype(np.int8)
    values = np.zeros(2**n)
    for order in range(1, cf.max_order + 1):
        for coef, tup in zip(cf.order_block(order), ordered_tuples(n, order)):
            values += float(coef) * states[:, list(tup)].prod(axis=1)
    return states, values


def naive_min(cf):
    """Full-enumeration argmin with first-seen tie break."""
    states, values = enumerate_all(cf)
    idx = int(np.argmin(values))
    return states[idx], float(values[idx])


def zero_cost_function(n_dims: int, max_order: int):
    """A valid instance whose every coefficient is zero."""
    variance = cx.uniform_order_variance(n_dims, max_order)
    count = cx.coefficient_count(n_dims, max_order)
    return cx.CostFunction(n_dims, max_order, variance, np.zeros(count))
