# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled spatial-hash core.

Twin of mesochat.geometry.hash_py with identical semantics; the placement
loop calls any_overlap once per candidate, which makes this the hottest
path in the whole engine.
"""

from libc.math cimport floor

import numpy as np


IMPLEMENTATION = "cython"

cdef double OVERLAP_SLACK = 1e-9


cdef class HashCore:
    cdef public double cell
    cdef dict cells
    cdef double[::1] xs
    cdef double[::1] ys
    cdef double[::1] zs
    cdef double[::1] rs
    cdef long[::1] ids
    cdef Py_ssize_t n
    cdef Py_ssize_t capacity

    def __init__(self, double cell_size):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.cell = cell_size
        self.cells = {}
        self.capacity = 64
        self.n = 0
        self.xs = np.empty(self.capacity, dtype=np.float64)
        self.ys = np.empty(self.capacity, dtype=np.float64)
        self.zs = np.empty(self.capacity, dtype=np.float64)
        self.rs = np.empty(self.capacity, dtype=np.float64)
        self.ids = np.empty(self.capacity, dtype=np.int_)

    def __len__(self):
        return self.n

    cdef void _grow(self):
        cdef Py_ssize_t new_cap = self.capacity * 2
        cdef double[::1] nxs = np.empty(new_cap, dtype=np.float64)
        cdef double[::1] nys = np.empty(new_cap, dtype=np.float64)
        cdef double[::1] nzs = np.empty(new_cap, dtype=np.float64)
        cdef double[::1] nrs = np.empty(new_cap, dtype=np.float64)
        cdef long[::1] nids = np.empty(new_cap, dtype=np.int_)
        nxs[:self.n] = self.xs[:self.n]
        nys[:self.n] = self.ys[:self.n]
        nzs[:self.n] = self.zs[:self.n]
        nrs[:self.n] = self.rs[:self.n]
        nids[:self.n] = self.ids[:self.n]
        self.xs, self.ys, self.zs, self.rs, self.ids = nxs, nys, nzs, nrs, nids
        self.capacity = new_cap

    def insert(self, long ident, double x, double y, double z, double r):
        if r <= 0:
            raise ValueError("radius must be positive")
        cdef Py_ssize_t idx = self.n
        if idx >= self.capacity:
            self._grow()
        self.xs[idx] = x
        self.ys[idx] = y
        self.zs[idx] = z
        self.rs[idx] = r
        self.ids[idx] = ident
        self.n += 1
        cdef long x0 = <long>floor((x - r) / self.cell)
        cdef long x1 = <long>floor((x + r) / self.cell)
        cdef long y0 = <long>floor((y - r) / self.cell)
        cdef long y1 = <long>floor((y + r) / self.cell)
        cdef long z0 = <long>floor((z - r) / self.cell)
        cdef long z1 = <long>floor((z + r) / self.cell)
        cdef long cx, cy, cz
        cdef list lst
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    key = (cx, cy, cz)
                    lst = <list>self.cells.get(key)
                    if lst is None:
                        self.cells[key] = [idx]
                    else:
                        lst.append(idx)

    def query_candidates(self, double x, double y, double z, double r):
        cdef long x0 = <long>floor((x - r) / self.cell)
        cdef long x1 = <long>floor((x + r) / self.cell)
        cdef long y0 = <long>floor((y - r) / self.cell)
        cdef long y1 = <long>floor((y + r) / self.cell)
        cdef long z0 = <long>floor((z - r) / self.cell)
        cdef long z1 = <long>floor((z + r) / self.cell)
        cdef set seen = set()
        cdef list out = []
        cdef long cx, cy, cz
        cdef Py_ssize_t idx
        cdef list lst
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    lst = <list>self.cells.get((cx, cy, cz))
                    if lst is None:
                        continue
                    for idx in lst:
                        if idx not in seen:
                            seen.add(idx)
                            out.append(self.ids[idx])
        return out

    def query_overlapping(self, double x, double y, double z, double r):
        cdef long x0 = <long>floor((x - r) / self.cell)
        cdef long x1 = <long>floor((x + r) / self.cell)
        cdef long y0 = <long>floor((y - r) / self.cell)
        cdef long y1 = <long>floor((y + r) / self.cell)
        cdef long z0 = <long>floor((z - r) / self.cell)
        cdef long z1 = <long>floor((z + r) / self.cell)
        cdef set seen = set()
        cdef list out = []
        cdef long cx, cy, cz
        cdef Py_ssize_t idx
        cdef double dx, dy, dz, s
        cdef list lst
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    lst = <list>self.cells.get((cx, cy, cz))
                    if lst is None:
                        continue
                    for idx in lst:
                        if idx in seen:
                            continue
                        seen.add(idx)
                        dx = self.xs[idx] - x
                        dy = self.ys[idx] - y
                        dz = self.zs[idx] - z
                        s = self.rs[idx] + r - OVERLAP_SLACK
                        if s > 0.0 and dx * dx + dy * dy + dz * dz < s * s:
                            out.append(self.ids[idx])
        return out

    def any_overlap(self, double x, double y, double z, double r):
        cdef long x0 = <long>floor((x - r) / self.cell)
        cdef long x1 = <long>floor((x + r) / self.cell)
        cdef long y0 = <long>floor((y - r) / self.cell)
        cdef long y1 = <long>floor((y + r) / self.cell)
        cdef long z0 = <long>floor((z - r) / self.cell)
        cdef long z1 = <long>floor((z + r) / self.cell)
        cdef long cx, cy, cz
        cdef Py_ssize_t idx
        cdef double dx, dy, dz, s
        cdef list lst
        cdef set seen = set()
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    lst = <list>self.cells.get((cx, cy, cz))
                    if lst is None:
                        continue
                    for idx in lst:
                        if idx in seen:
                            continue
                        seen.add(idx)
                        dx = self.xs[idx] - x
                        dy = self.ys[idx] - y
                        dz = self.zs[idx] - z
                        s = self.rs[idx] + r - OVERLAP_SLACK
                        if s > 0.0 and dx * dx + dy * dy + dz * dz < s * s:
                            return True
        return False
