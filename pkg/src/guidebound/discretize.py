"""Sparse symmetric finite-difference operators for the full waveguide.

Cell-centered grids: nodes sit at cell centers, walls and Neumann faces
sit on cell faces.  This keeps every 1D building block second-order with
a clean closed form, gives the strip assembly a nonnegative Gershgorin
bound, and lets window slices reuse the node layout of regular slices
(only diagonal closures and severed faces differ).

The axisymmetric tube is reduced per angular sector m to a 2D operator in
(xi, rho); the radial part is the flux-form discretization of
-(1/rho) d/drho (rho d/drho) + m^2/rho^2 symmetrized by sqrt(rho), which
folds the (m^2 - 1/4)/rho^2 effective potential into the face
transmissibilities and needs no boundary row at the axis (rho = 0 falls
on a cell face of the half-offset grid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .bessel import bessel_zero
from .eigensolve import tridiagonal_eigs_below
from .geometry import (
    StripBump,
    StripNeumannWindow,
    TubeRadial,
    WaveguideGeometry,
)

MAX_ANGULAR_ORDER = 5


@dataclass(frozen=True)
class Grid2D:
    """Realized grid: axial extent and per-slice active node counts."""

    kind: str  # "strip" | "tube"
    xi_min: float
    xi_max: float
    h_xi: float
    h_t: float  # transverse step (h_eta for strips, h_rho for tubes)
    slice_counts: tuple[int, ...]

    @property
    def n_xi(self) -> int:
        return len(self.slice_counts)

    @property
    def n_nodes(self) -> int:
        return int(sum(self.slice_counts))

    def xi_center(self, i: int) -> float:
        return self.xi_min + (i + 0.5) * self.h_xi


@dataclass
class SparseSymOperator:
    """Discretized (unshifted) operator with grid metadata.

    threshold_shift carries the continuum transverse threshold of the
    asymptotic cross-section; it is metadata, never subtracted from the
    entries.  discrete_threshold is the lowest transverse eigenvalue of
    the asymptotic section discretized at the same transverse step -- the
    bottom of the discrete quasi-continuum, which is the consistent
    reference for binding energies on this grid.
    """

    matrix: sp.csr_matrix
    grid: Grid2D
    threshold_shift: float
    discrete_threshold: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def slice_sizes(self) -> list[int]:
        return list(self.grid.slice_counts)

    def gershgorin_lower(self) -> float:
        off_abs = abs(self.matrix) - sp.diags(np.abs(self.matrix.diagonal()))
        row_sums = np.asarray(off_abs.sum(axis=1)).ravel()
        return float(np.min(self.matrix.diagonal() - row_sums))

    def dump_coo(self, path) -> None:
        """Coordinate text dump, one 'row col value' per line, 17 digits."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(path, "w") as fh:
            for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
                fh.write(f"{r} {c} {v:.17g}\n")


class _Assembler:
    """Accumulates symmetric (form-scaled) entries slice by slice."""

    def __init__(self):
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.vals: list[np.ndarray] = []

    def add_diag(self, idx, val):
        idx = np.asarray(idx, dtype=np.int64)
        self.rows.append(idx)
        self.cols.append(idx)
        self.vals.append(np.broadcast_to(np.asarray(val, dtype=float), idx.shape).copy())

    def add_sym(self, i, j, val):
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        v = np.broadcast_to(np.asarray(val, dtype=float), i.shape).copy()
        self.rows.extend((i, j))
        self.cols.extend((j, i))
        self.vals.extend((v, v))

    def build(self, n: int) -> sp.csr_matrix:
        rows = np.concatenate(self.rows)
        cols = np.concatenate(self.cols)
        vals = np.concatenate(self.vals)
        mat = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        mat.sum_duplicates()
        return mat


def snap_to_step(x: float, h: float) -> float:
    return h * round(x / h)


def assemble_strip(geom: WaveguideGeometry, h_xi: float, h_eta: float,
                   extent: tuple[float, float]) -> SparseSymOperator:
    """5-point operator for a strip with bumps or a Neumann window/crack.

    The axial extent is truncated to `extent` with Dirichlet ends; the top
    boundary is stair-cased to the nearest cell face; a Neumann window at
    height b severs the transverse face nearest to b over the window
    columns (b = 1 turns the top closure off instead).
    """
    if not isinstance(geom, (StripBump, StripNeumannWindow)):
        raise TypeError("assemble_strip expects a StripBump or StripNeumannWindow")
    if h_xi <= 0 or h_eta <= 0:
        raise ValueError("grid steps must be positive")
    xi_min, xi_max = extent
    lo_s, hi_s = (geom.profile.support if isinstance(geom, StripBump) else geom.window)
    if xi_min > lo_s or xi_max < hi_s:
        raise ValueError("axial extent must cover the perturbation support")
    n_xi = int(round((xi_max - xi_min) / h_xi))
    if n_xi < 3:
        raise ValueError("axial extent too small for the requested step")

    inv_e2 = 1.0 / h_eta**2
    inv_x2 = 1.0 / h_xi**2
    counts = np.empty(n_xi, dtype=np.int64)
    widths = np.empty(n_xi)
    crack_face = np.full(n_xi, -1, dtype=np.int64)  # severed face index, -1 none
    neumann_top = np.zeros(n_xi, dtype=bool)
    for i in range(n_xi):
        cs = geom.cross_section_at(xi_min + (i + 0.5) * h_xi)
        widths[i] = cs.length
        m = max(1, int(round(cs.length / h_eta)))
        counts[i] = m
        if cs.neumann_point is not None:
            face = int(round(cs.neumann_point / h_eta))
            if face >= m:
                neumann_top[i] = True
            else:
                crack_face[i] = face

    offsets = np.concatenate([[0], np.cumsum(counts)])
    n = int(offsets[-1])
    asm = _Assembler()

    for i in range(n_xi):
        m = int(counts[i])
        idx = np.arange(offsets[i], offsets[i] + m)
        # transverse faces: wall closures carry T = 2/h^2 (face at h/2 from
        # the node), interior faces T = 1/h^2
        diag = np.full(m, 2.0 * inv_e2)
        diag[0] += inv_e2  # bottom wall: 2/h^2 closure replaces a 1/h^2 face
        diag[-1] += -inv_e2 + (0.0 if neumann_top[i] else 2.0 * inv_e2)
        couple = np.ones(m - 1, dtype=bool)
        if crack_face[i] > 0:
            j = int(crack_face[i])
            couple[j - 1] = False
            diag[j - 1] -= inv_e2
            diag[j] -= inv_e2
        asm.add_diag(idx, diag)
        asm.add_sym(idx[:-1][couple], idx[1:][couple], -inv_e2)

        # axial faces: Dirichlet closures (T = 2/h^2) at the truncation ends
        # and at staircase steps where the neighbor slice has no node j
        m_left = int(counts[i - 1]) if i > 0 else 0
        m_right = int(counts[i + 1]) if i + 1 < n_xi else 0
        j_all = np.arange(1, m + 1)
        left_T = np.where(j_all <= m_left, inv_x2, 2.0 * inv_x2) if i > 0 \
            else np.full(m, 2.0 * inv_x2)
        right_T = np.where(j_all <= m_right, inv_x2, 2.0 * inv_x2) if i + 1 < n_xi \
            else np.full(m, 2.0 * inv_x2)
        asm.add_diag(idx, left_T + right_T)
        if i + 1 < n_xi:
            mm = min(m, int(counts[i + 1]))
            asm.add_sym(idx[:mm], np.arange(offsets[i + 1], offsets[i + 1] + mm),
                        -inv_x2)

    matrix = asm.build(n)
    grid = Grid2D("strip", xi_min, xi_min + n_xi * h_xi, h_xi, h_eta, tuple(counts))
    w0 = geom.asymptotic_cross_section.length
    n_w = max(1, int(round(w0 / h_eta)))
    discrete_tau = (4.0 * inv_e2) * math.sin(math.pi / (2 * n_w)) ** 2
    stair = float(np.max(np.abs(counts * h_eta - widths)))
    return SparseSymOperator(
        matrix=matrix,
        grid=grid,
        threshold_shift=math.pi**2,
        discrete_threshold=discrete_tau,
        diagnostics={
            "staircase_max": stair,
            "window_columns": int(np.sum(neumann_top) + np.sum(crack_face > 0)),
        },
    )


def assemble_tube_axisym(geom: TubeRadial, angular_m: int, h_xi: float,
                         h_rho: float, extent: tuple[float, float]) -> SparseSymOperator:
    """Angular-sector operator for the axisymmetric tube, symmetrized.

    Entries are those of the generalized (form, mass) pair scaled by the
    cell masses rho_j, which is the sqrt(rho) substitution in discrete
    form.  The m^2/rho^2 centrifugal term sits on the diagonal; the -1/4
    correction of the substituted potential is carried by the face terms.
    """
    if not isinstance(geom, TubeRadial):
        raise TypeError("assemble_tube_axisym expects a TubeRadial geometry")
    if not 0 <= angular_m <= MAX_ANGULAR_ORDER:
        raise ValueError(f"angular order {angular_m} outside verified range "
                         f"[0, {MAX_ANGULAR_ORDER}]")
    if h_xi <= 0 or h_rho <= 0:
        raise ValueError("grid steps must be positive")
    xi_min, xi_max = extent
    lo_s, hi_s = geom.deviation.support
    if xi_min > lo_s or xi_max < hi_s:
        raise ValueError("axial extent must cover the perturbation support")
    n_xi = int(round((xi_max - xi_min) / h_xi))
    if n_xi < 3:
        raise ValueError("axial extent too small for the requested step")

    inv_x2 = 1.0 / h_xi**2
    inv_r2 = 1.0 / h_rho**2
    counts = np.empty(n_xi, dtype=np.int64)
    radii = np.empty(n_xi)
    for i in range(n_xi):
        r = geom.radius(xi_min + (i + 0.5) * h_xi)
        radii[i] = r
        counts[i] = max(1, int(round(r / h_rho)))
    offsets = np.concatenate([[0], np.cumsum(counts)])
    n = int(offsets[-1])
    asm = _Assembler()

    for i in range(n_xi):
        m = int(counts[i])
        idx = np.arange(offsets[i], offsets[i] + m)
        j = np.arange(1, m + 1, dtype=float)
        rho = (j - 0.5) * h_rho
        T_out = (j * h_rho) * inv_r2          # outer-face transmissibility
        diag = np.empty(m)
        diag[0] = T_out[0] / rho[0]           # axis face T is zero
        if m > 1:
            diag[1:] = (T_out[:-1] + T_out[1:]) / rho[1:]
            diag[-1] = T_out[-2] / rho[-1] + 2.0 * T_out[-1] / rho[-1]
        else:
            diag[0] = 2.0 * T_out[0] / rho[0]
        diag += (angular_m / rho) ** 2
        asm.add_diag(idx, diag)
        if m > 1:
            asm.add_sym(idx[:-1], idx[1:], -T_out[:-1] / np.sqrt(rho[:-1] * rho[1:]))

        # axial faces: mass rho cancels, closures as in the strip
        m_left = int(counts[i - 1]) if i > 0 else 0
        m_right = int(counts[i + 1]) if i + 1 < n_xi else 0
        jj = np.arange(1, m + 1)
        left_T = np.where(jj <= m_left, inv_x2, 2.0 * inv_x2) if i > 0 \
            else np.full(m, 2.0 * inv_x2)
        right_T = np.where(jj <= m_right, inv_x2, 2.0 * inv_x2) if i + 1 < n_xi \
            else np.full(m, 2.0 * inv_x2)
        asm.add_diag(idx, left_T + right_T)
        if i + 1 < n_xi:
            mm = min(m, int(counts[i + 1]))
            asm.add_sym(idx[:mm], np.arange(offsets[i + 1], offsets[i + 1] + mm),
                        -inv_x2)

    matrix = asm.build(n)
    grid = Grid2D("tube", xi_min, xi_min + n_xi * h_xi, h_xi, h_rho, tuple(counts))
    tau_cont = (bessel_zero(0, 1) / geom.base_radius) ** 2
    m_asym = max(1, int(round(geom.base_radius / h_rho)))
    d0, o0 = radial_block(m_asym, h_rho, 0)
    ground = tridiagonal_eigs_below(d0, o0, tau_cont * 1.5)
    discrete_tau = ground[0] if ground else tau_cont
    stair = float(np.max(np.abs(counts * h_rho - radii)))
    return SparseSymOperator(
        matrix=matrix,
        grid=grid,
        threshold_shift=tau_cont,
        discrete_threshold=discrete_tau,
        diagnostics={"staircase_max": stair, "angular_m": angular_m},
    )


def radial_block(m_nodes: int, h_rho: float, angular_m: int):
    """Scaled tridiagonal of the radial operator with a Dirichlet outer wall."""
    j = np.arange(1, m_nodes + 1, dtype=float)
    rho = (j - 0.5) * h_rho
    T_out = (j * h_rho) / h_rho**2
    diag = np.empty(m_nodes)
    diag[0] = T_out[0] / rho[0]
    if m_nodes > 1:
        diag[1:] = (T_out[:-1] + T_out[1:]) / rho[1:]
        diag[-1] = T_out[-2] / rho[-1] + 2.0 * T_out[-1] / rho[-1]
    else:
        diag[0] = 2.0 * T_out[0] / rho[0]
    diag += (angular_m / rho) ** 2
    off = -T_out[:-1] / np.sqrt(rho[:-1] * rho[1:]) if m_nodes > 1 else np.empty(0)
    return diag, off
