"""Enumeration kernels in plain numpy.

Same signatures as the compiled ``_ckernels`` module.  These also accept
object-dtype weight arrays, which the engine uses when the common
denominator of a distribution does not fit in int64.
"""

import numpy as np

OP_TRUE, OP_FALSE, OP_EQ, OP_NE, OP_NOT, OP_AND, OP_OR = range(7)


def evaluate_worlds(worlds, targets, parent_ptr, parent_cols, parent_strides,
                    table_ptr, tables):
    """Fill endogenous columns of ``worlds`` in place, one target at a time."""
    n = worlds.shape[0]
    for k in range(len(targets)):
        idx = np.zeros(n, dtype=np.int64)
        for j in range(parent_ptr[k], parent_ptr[k + 1]):
            idx += worlds[:, parent_cols[j]] * parent_strides[j]
        worlds[:, targets[k]] = tables[table_ptr[k] + idx]


def eval_prop(worlds, code):
    n = worlds.shape[0]
    stack = []
    for i in range(0, len(code), 3):
        op = code[i]
        if op == OP_TRUE:
            stack.append(np.ones(n, dtype=bool))
        elif op == OP_FALSE:
            stack.append(np.zeros(n, dtype=bool))
        elif op == OP_EQ:
            stack.append(worlds[:, code[i + 1]] == code[i + 2])
        elif op == OP_NE:
            stack.append(worlds[:, code[i + 1]] != code[i + 2])
        elif op == OP_NOT:
            stack[-1] = ~stack[-1]
        elif op == OP_AND:
            rhs = stack.pop()
            stack[-1] = stack[-1] & rhs
        elif op == OP_OR:
            rhs = stack.pop()
            stack[-1] = stack[-1] | rhs
        else:
            raise ValueError(f"bad opcode {op}")
    return stack.pop().astype(np.uint8)


def masked_sum(weights, mask):
    return int(weights[mask.astype(bool)].sum())


def joint_histogram(worlds, cols, radices, weights, mask, size):
    sel = mask.astype(bool)
    idx = np.zeros(int(sel.sum()), dtype=np.int64)
    for c, r in zip(cols, radices):
        idx += worlds[sel, c] * r
    out = np.zeros(size, dtype=weights.dtype)
    np.add.at(out, idx, weights[sel])
    return out
