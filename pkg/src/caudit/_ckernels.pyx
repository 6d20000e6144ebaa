# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled enumeration kernels (int64 weights only)."""

import numpy as np

from libc.stdint cimport int64_t, uint8_t

cdef enum:
    MAX_STACK = 64


def evaluate_worlds(int64_t[:, ::1] worlds, const int64_t[::1] targets,
                    const int64_t[::1] parent_ptr, const int64_t[::1] parent_cols,
                    const int64_t[::1] parent_strides, const int64_t[::1] table_ptr,
                    const int64_t[::1] tables):
    cdef Py_ssize_t n = worlds.shape[0]
    cdef Py_ssize_t nt = targets.shape[0]
    cdef Py_ssize_t w, k, j
    cdef int64_t idx
    for w in range(n):
        for k in range(nt):
            idx = 0
            for j in range(parent_ptr[k], parent_ptr[k + 1]):
                idx += worlds[w, parent_cols[j]] * parent_strides[j]
            worlds[w, targets[k]] = tables[table_ptr[k] + idx]


def eval_prop(const int64_t[:, ::1] worlds, const int64_t[::1] code):
    cdef Py_ssize_t n = worlds.shape[0]
    cdef Py_ssize_t ncode = code.shape[0]
    cdef Py_ssize_t w, i
    cdef int64_t op
    cdef uint8_t stack[MAX_STACK]
    cdef int sp
    out = np.empty(n, dtype=np.uint8)
    cdef uint8_t[::1] res = out
    for w in range(n):
        sp = 0
        i = 0
        while i < ncode:
            op = code[i]
            if op == 0:
                stack[sp] = 1
                sp += 1
            elif op == 1:
                stack[sp] = 0
                sp += 1
            elif op == 2:
                stack[sp] = worlds[w, code[i + 1]] == code[i + 2]
                sp += 1
            elif op == 3:
                stack[sp] = worlds[w, code[i + 1]] != code[i + 2]
                sp += 1
            elif op == 4:
                stack[sp - 1] = 1 - stack[sp - 1]
            elif op == 5:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] & stack[sp]
            else:
                sp -= 1
                stack[sp - 1] = stack[sp - 1] | stack[sp]
            i += 3
        res[w] = stack[0]
    return out


def masked_sum(const int64_t[::1] weights, const uint8_t[::1] mask):
    cdef Py_ssize_t n = weights.shape[0]
    cdef Py_ssize_t w
    cdef int64_t total = 0
    for w in range(n):
        if mask[w]:
            total += weights[w]
    return total


def joint_histogram(const int64_t[:, ::1] worlds, const int64_t[::1] cols,
                    const int64_t[::1] radices, const int64_t[::1] weights,
                    const uint8_t[::1] mask, Py_ssize_t size):
    cdef Py_ssize_t n = worlds.shape[0]
    cdef Py_ssize_t nc = cols.shape[0]
    cdef Py_ssize_t w, j
    cdef int64_t idx
    out = np.zeros(size, dtype=np.int64)
    cdef int64_t[::1] hist = out
    for w in range(n):
        if not mask[w]:
            continue
        idx = 0
        for j in range(nc):
            idx += worlds[w, cols[j]] * radices[j]
        hist[idx] += weights[w]
    return out
