"""Grids, cell fields, system descriptions and convex extensions.

Every system in the package is described by a :class:`SystemSpec` whose
callables are vectorized over the trailing axis: a state array has shape
``(ncomp, n)`` and the flux returns the same shape, while wave-speed bounds
and admissibility predicates return arrays of shape ``(n,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

# admissible-state margins
POSITIVITY_MARGIN = 1e-10


class InadmissibleStateError(ValueError):
    """A cell left the admissible region of its system."""

    def __init__(self, message, index=None, state=None):
        super().__init__(message)
        self.index = index
        self.state = state


class DegenerateDiffeomorphismError(ValueError):
    pass


# {{{ grid and fields

@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centered grid on a torus ``[a, a + L)`` or a line ``[a, b]``."""

    periodic: bool
    a: float
    b: float
    nx: int

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.nx

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def interfaces(self) -> np.ndarray:
        return self.a + np.arange(self.nx + 1) * self.dx

    def refine(self, factor: int = 2) -> "Grid1D":
        return Grid1D(self.periodic, self.a, self.b, self.nx * factor)


def make_grid(topology: str, nx: int, a: float = 0.0, b: float = 1.0,
              length: Optional[float] = None) -> Grid1D:
    """Build a grid.

    ``topology`` is ``"torus"`` (domain ``[a, a + length)``, ``length``
    defaulting to ``b - a``) or ``"line"`` (domain ``[a, b]``).
    """
    if nx < 4:
        raise ValueError(f"need at least 4 cells, got nx={nx}")
    if topology == "torus":
        if length is not None:
            b = a + length
        periodic = True
    elif topology == "line":
        periodic = False
    else:
        raise ValueError(f"unknown topology {topology!r}")
    if not b > a:
        raise ValueError(f"degenerate domain [{a}, {b}]")
    return Grid1D(periodic, float(a), float(b), int(nx))


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CellField:
    """Cell averages of an ``ncomp``-vector state, stored as ``(ncomp, nx)``."""

    grid: Grid1D
    data: np.ndarray
    quadrature: str = "gauss3"

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 1:
            data = data[None, :]
        if data.shape[1] != self.grid.nx:
            raise ValueError(
                f"field has {data.shape[1]} cells, grid has {self.grid.nx}")
        bad = ~np.isfinite(data)
        if bad.any():
            comp, cell = np.argwhere(bad)[0]
            raise ValueError(
                f"non-finite value in component {comp} of cell {cell}")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def ncomp(self) -> int:
        return self.data.shape[0]

    def component(self, k: int) -> np.ndarray:
        return self.data[k]


@dataclass(frozen=True)
class SpaceTimeField:
    """Snapshots of a cell field; ``frames`` has shape ``(nt, ncomp, nx)``."""

    grid: Grid1D
    times: np.ndarray
    frames: np.ndarray
    steps: Optional[np.ndarray] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim == 2:
            frames = frames[:, None, :]
        if times.ndim != 1 or len(times) == 0 or times[0] != 0.0:
            raise ValueError("snapshot times must start at 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("snapshot times must be strictly increasing")
        if frames.shape[0] != len(times) or frames.shape[2] != self.grid.nx:
            raise ValueError(
                f"frames of shape {frames.shape} do not match "
                f"{len(times)} times and {self.grid.nx} cells")
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "frames", _frozen(frames))

    @property
    def ncomp(self) -> int:
        return self.frames.shape[1]

    def frame(self, k: int) -> CellField:
        return CellField(self.grid, self.frames[k])

    def component(self, k: int) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.times, self.frames[:, k:k + 1, :],
                              self.steps)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "SpaceTimeField":
        """Apply a pointwise state map to every frame."""
        out = np.stack([np.atleast_2d(fn(f)) for f in self.frames])
        return SpaceTimeField(self.grid, self.times, out, self.steps)

    def index_of(self, t: float) -> int:
        k = int(np.searchsorted(self.times, t))
        for j in (k - 1, k):
            if 0 <= j < len(self.times) and math.isclose(
                    self.times[j], t, rel_tol=1e-12, abs_tol=1e-14):
                return j
        raise KeyError(f"t={t} is not a recorded time")

# }}}


# {{{ systems

@dataclass(frozen=True)
class ConvexExtension:
    """A pair ``(E, Q)`` with ``E_t + Q_x = 0`` on smooth solutions.

    ``convex_on`` marks the states on which ``E`` is claimed convex; it is
    ``None`` for pairs that are compatible but not claimed convex (for
    example linear ``E``).
    """

    name: str
    E: Callable[[np.ndarray], np.ndarray]
    Q: Callable[[np.ndarray], np.ndarray]
    convex_on: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass(frozen=True)
class SystemSpec:
    name: str
    ncomp: int
    flux: Callable[[np.ndarray], np.ndarray]
    max_wave_speed: Callable[[np.ndarray], np.ndarray]
    admissible: Callable[[np.ndarray], np.ndarray]
    extensions: tuple = ()
    riemann_exact: Optional[Callable] = None
    component_names: tuple = ()
    # components with identically zero flux; never receive numerical dissipation
    static: tuple = ()
    sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None

    def with_extensions(self, *exts: ConvexExtension) -> "SystemSpec":
        return SystemSpec(self.name, self.ncomp, self.flux,
                          self.max_wave_speed, self.admissible,
                          tuple(self.extensions) + tuple(exts),
                          self.riemann_exact, self.component_names,
                          self.static, self.sampler)


def positive_rows(*rows: int, margin: float = POSITIVITY_MARGIN):
    """Admissibility predicate requiring the given components to exceed ``margin``."""
    def admissible(U):
        U = np.asarray(U)
        ok = np.ones(U.shape[1:], dtype=bool)
        for r in rows:
            ok &= U[r] >= margin
        return ok & np.all(np.isfinite(U), axis=0)
    return admissible

# }}}


# {{{ initial data

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(3)


def sample_ic(grid: Grid1D, fn: Callable[[np.ndarray], np.ndarray],
              quadrature: str = "gauss3") -> CellField:
    """Cell averages of ``fn`` by the 3-point Gauss rule (or midpoint values).

    ``fn`` maps an array of positions of shape ``(n,)`` to states of shape
    ``(ncomp, n)`` or ``(n,)``.
    """
    xc, dx = grid.centers, grid.dx
    if quadrature == "midpoint":
        data = np.atleast_2d(np.asarray(fn(xc), dtype=np.float64))
    elif quadrature == "gauss3":
        data = 0.0
        for node, weight in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
            vals = np.atleast_2d(np.asarray(fn(xc + 0.5 * dx * node),
                                            dtype=np.float64))
            data = data + 0.5 * weight * vals
    else:
        raise ValueError(f"unknown quadrature {quadrature!r}")
    data = np.broadcast_to(data, (data.shape[0], grid.nx))
    bad = ~np.isfinite(data)
    if bad.any():
        comp, cell = np.argwhere(bad)[0]
        raise ValueError(f"non-finite initial value in cell {cell} "
                         f"(x={xc[cell]:.6g}, component {comp})")
    return CellField(grid, data.copy(), quadrature)


def total_variation(values: np.ndarray, periodic: bool = False) -> float:
    """Sum over components of the discrete total variation."""
    values = np.atleast_2d(values)
    tv = np.abs(np.diff(values, axis=-1)).sum()
    if periodic:
        tv += np.abs(values[:, 0] - values[:, -1]).sum()
    return float(tv)

# }}}


# {{{ finite differences and extension checks

def fd_step(s, rel: float) -> np.ndarray:
    return rel * np.maximum(1.0, np.abs(s))


def numerical_jacobian(fn, U: np.ndarray, rel: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian ``d fn / dU`` of shape ``(m, ncomp, n)``."""
    U = np.asarray(U, dtype=np.float64)
    ncomp, n = U.shape
    cols = []
    for k in range(ncomp):
        h = fd_step(U[k], rel)
        Up, Um = U.copy(), U.copy()
        Up[k] += h
        Um[k] -= h
        cols.append((np.atleast_2d(fn(Up)) - np.atleast_2d(fn(Um))) / (2 * h))
    return np.stack(cols, axis=1)


def numerical_gradient(fn, U: np.ndarray, rel: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar state function, ``(ncomp, n)``."""
    return numerical_jacobian(fn, U, rel)[0]


def numerical_hessian(fn, U: np.ndarray, rel: float = 1e-5) -> np.ndarray:
    """Central-difference Hessian of a scalar state function, ``(n, ncomp, ncomp)``."""
    U = np.asarray(U, dtype=np.float64)
    ncomp, n = U.shape
    H = np.empty((n, ncomp, ncomp))
    hs = [fd_step(U[k], rel) for k in range(ncomp)]
    f0 = fn(U)
    for i in range(ncomp):
        for j in range(i, ncomp):
            if i == j:
                Up, Um = U.copy(), U.copy()
                Up[i] += hs[i]
                Um[i] -= hs[i]
                H[:, i, i] = (fn(Up) - 2 * f0 + fn(Um)) / hs[i] ** 2
                continue
            vals = 0.0
            for si, sj, sign in ((1, 1, 1), (1, -1, -1), (-1, 1, -1),
                                 (-1, -1, 1)):
                V = U.copy()
                V[i] += si * hs[i]
                V[j] += sj * hs[j]
                vals = vals + sign * fn(V)
            H[:, i, j] = H[:, j, i] = vals / (4 * hs[i] * hs[j])
    return H


def _sample_admissible(spec: SystemSpec, n_samples: int, seed: int):
    if spec.sampler is None:
        raise ValueError(f"system {spec.name!r} has no state sampler")
    U = np.asarray(spec.sampler(np.random.default_rng(seed), n_samples),
                   dtype=np.float64)
    keep = spec.admissible(U)
    if not keep.any():
        raise ValueError("every sampled state is outside the admissible region")
    return U[:, keep]


def check_extension_compatibility(spec: SystemSpec, ext: ConvexExtension,
                                  n_samples: int = 200, seed: int = 0,
                                  states: Optional[np.ndarray] = None) -> float:
    """Max over sampled states of ``|grad Q - grad E . dF|`` (central differences)."""
    if states is None:
        U = _sample_admissible(spec, n_samples, seed)
    else:
        U = np.asarray(states, dtype=np.float64)
        U = U[:, spec.admissible(U)]
        if U.shape[1] == 0:
            raise ValueError("every supplied state is outside the admissible region")
    gradE = numerical_gradient(ext.E, U)
    gradQ = numerical_gradient(ext.Q, U)
    dF = numerical_jacobian(spec.flux, U)       # (ncomp_out, ncomp_in, n)
    residual = gradQ - np.einsum("in,ijn->jn", gradE, dF)
    return float(np.max(np.abs(residual)))


def min_hessian_eigenvalue(E, U: np.ndarray, rel: float = 1e-5) -> np.ndarray:
    """Smallest eigenvalue of the numerical Hessian of ``E`` at each state."""
    H = numerical_hessian(E, U, rel)
    return np.linalg.eigvalsh(H)[:, 0]


def check_extension_convexity(spec: SystemSpec, ext: ConvexExtension,
                              n_samples: int = 200, seed: int = 0) -> float:
    """Minimum Hessian eigenvalue of ``E`` over sampled states in ``convex_on``."""
    if ext.convex_on is None:
        raise ValueError(f"extension {ext.name!r} is not claimed convex")
    U = _sample_admissible(spec, n_samples, seed)
    U = U[:, ext.convex_on(U)]
    if U.shape[1] == 0:
        raise ValueError("no sampled state lies in the convexity region")
    return float(min_hessian_eigenvalue(ext.E, U).min())

# }}}


# {{{ particle-path lift

def lift_extension(ext: ConvexExtension, to_physical, velocity, name=None,
                   convex_on=None) -> ConvexExtension:
    """Transport a physical pair to the particle-path frame.

    With ``eta = gamma_x`` and ``xi = gamma_t`` the physical pair ``(E, Q)``
    becomes ``(eta E, Q - xi E)`` evaluated at the physical state.
    ``to_physical`` maps particle-path states to ``(phys_state, eta)`` and
    ``velocity`` maps them to ``xi``.
    """
    def E(U):
        phys, eta = to_physical(U)
        return eta * ext.E(phys)

    def Q(U):
        phys, _ = to_physical(U)
        return ext.Q(phys) - velocity(U) * ext.E(phys)

    return ConvexExtension(name or f"lifted {ext.name}", E, Q, convex_on)

# }}}


# {{{ test functions

@dataclass(frozen=True)
class TensorBump:
    """Nonnegative C2 bump ``b((x - xc)/hx) b((t - tc)/ht)`` with ``b(s) = (1 - s^2)^3``.

    Supported on ``[xc - hx, xc + hx] x [tc - ht, tc + ht]``.
    """

    xc: float
    tc: float
    hx: float
    ht: float

    @staticmethod
    def _b(s):
        return np.where(np.abs(s) < 1, (1 - s * s) ** 3, 0.0)

    @staticmethod
    def _db(s):
        return np.where(np.abs(s) < 1, -6 * s * (1 - s * s) ** 2, 0.0)

    @staticmethod
    def _ib(s):
        """``int_{-1}^{s} b``, constant outside ``[-1, 1]``."""
        s = np.clip(s, -1.0, 1.0)
        return s - s ** 3 + 0.6 * s ** 5 - s ** 7 / 7 + 16.0 / 35.0

    @property
    def support(self):
        return (self.xc - self.hx, self.xc + self.hx,
                self.tc - self.ht, self.tc + self.ht)

    def __call__(self, x, t):
        return self._b((x - self.xc) / self.hx) * self._b((t - self.tc) / self.ht)

    def dx(self, x, t):
        return (self._db((x - self.xc) / self.hx) / self.hx
                * self._b((t - self.tc) / self.ht))

    def dt(self, x, t):
        return (self._b((x - self.xc) / self.hx)
                * self._db((t - self.tc) / self.ht) / self.ht)


def trapezoid_weights(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=np.float64)
    w = np.zeros_like(times)
    if len(times) > 1:
        h = np.diff(times)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
    return w

# }}}


def as_states(U: Sequence) -> np.ndarray:
    """Promote a single state or a list of states to shape ``(ncomp, n)``."""
    U = np.asarray(U, dtype=np.float64)
    if U.ndim == 1:
        U = U[:, None]
    return U
