"""Attainable ranges of the causal determinant and optimized boundary curves.

The determinant of a mixture correlation matrix p * C_dc + (1 - p) * C_cc is
extremized over the physical families of both mechanisms: rotation averages
for the channel side and rotated Bell-diagonal correlation blocks for the
state side.  Because the determinant is invariant under proper rotations
applied on either side, the state block can be taken diagonal without loss of
generality, which shrinks the search space.  A multi-start simplex search
produces the boundary curves; an independent random-sampling oracle checks
that they are never exceeded.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, exp, sin, sqrt

import numpy as np

from .channels import (
    MixedUnitaryChannel,
    Unitary2,
    haar_random_unitaries,
    rotations_of,
    unitary_channel,
)
from .linalg import det3, pauli
from .rng import derive_rng
from .states import TwoQubitState, bell_state, random_correlation_blocks, werner_state

# vertices of the set of diagonal correlation blocks of physical Bell-diagonal
# states (the sign patterns of the four Bell states)
TETRA_VERTICES = (
    (-1.0, -1.0, -1.0),
    (-1.0, 1.0, 1.0),
    (1.0, -1.0, 1.0),
    (1.0, 1.0, -1.0),
)

DEFAULT_RESTARTS = 64
DEFAULT_MAXITER = 200
DEFAULT_FATOL = 1e-9
DEFAULT_P_STEPS = 101

_NDC_CLASSES = (1, 2, 3)  # 3 stands for "three or more"


def _terms_for_class(ndc_class: int) -> int:
    if ndc_class not in _NDC_CLASSES:
        raise ValueError(f"ndc_class must be 1, 2 or 3 (meaning >= 3), got {ndc_class!r}")
    return ndc_class


def _mixture_det(x: list[float], n_u: int, p: float) -> float:
    """det of p * sum_m a_m R_m^T + (1 - p) * diag(t), all in plain floats.

    x holds axis-angle vectors for the rotations, weight logits (softmax, only
    for n_u > 1) and four barycentric logits picking t inside the tetrahedron.
    Kept free of numpy: the simplex search calls this tens of millions of times.
    """
    q = 1.0 - p
    if n_u == 1:
        w = (1.0,)
    else:
        logits = x[3 * n_u : 4 * n_u]
        mx = max(logits)
        es = [exp(v - mx) for v in logits]
        s = sum(es)
        w = [e / s for e in es]
    a11 = a12 = a13 = a21 = a22 = a23 = a31 = a32 = a33 = 0.0
    for m in range(n_u):
        wx = x[3 * m]
        wy = x[3 * m + 1]
        wz = x[3 * m + 2]
        th = sqrt(wx * wx + wy * wy + wz * wz)
        if th < 1e-12:
            r11 = r22 = r33 = 1.0
            r12 = r13 = r21 = r23 = r31 = r32 = 0.0
        else:
            ux = wx / th
            uy = wy / th
            uz = wz / th
            c = cos(th)
            s_ = sin(th)
            cc = 1.0 - c
            r11 = c + ux * ux * cc
            r12 = ux * uy * cc - uz * s_
            r13 = ux * uz * cc + uy * s_
            r21 = uy * ux * cc + uz * s_
            r22 = c + uy * uy * cc
            r23 = uy * uz * cc - ux * s_
            r31 = uz * ux * cc - uy * s_
            r32 = uz * uy * cc + ux * s_
            r33 = c + uz * uz * cc
        wm = w[m]
        # accumulate the transpose: correlation of a unitary is R^T
        a11 += wm * r11
        a12 += wm * r21
        a13 += wm * r31
        a21 += wm * r12
        a22 += wm * r22
        a23 += wm * r32
        a31 += wm * r13
        a32 += wm * r23
        a33 += wm * r33
    l0 = x[-4]
    l1 = x[-3]
    l2 = x[-2]
    l3 = x[-1]
    mx = l0 if l0 > l1 else l1
    if l2 > mx:
        mx = l2
    if l3 > mx:
        mx = l3
    e0 = exp(l0 - mx)
    e1 = exp(l1 - mx)
    e2 = exp(l2 - mx)
    e3 = exp(l3 - mx)
    s = e0 + e1 + e2 + e3
    b0 = e0 / s
    b1 = e1 / s
    b2 = e2 / s
    b3 = e3 / s
    t1 = -b0 - b1 + b2 + b3
    t2 = -b0 + b1 - b2 + b3
    t3 = -b0 + b1 + b2 - b3
    c11 = p * a11 + q * t1
    c22 = p * a22 + q * t2
    c33 = p * a33 + q * t3
    c12 = p * a12
    c13 = p * a13
    c21 = p * a21
    c23 = p * a23
    c31 = p * a31
    c32 = p * a32
    return (
        c11 * (c22 * c33 - c23 * c32)
        - c12 * (c21 * c33 - c23 * c31)
        + c13 * (c21 * c32 - c22 * c31)
    )


def _nelder_mead(
    f, x0: list[float], step: float = 0.5, maxiter: int = DEFAULT_MAXITER, fatol: float = DEFAULT_FATOL
) -> tuple[list[float], float]:
    """Minimize f by the standard simplex method; returns (best x, best f)."""
    n = len(x0)
    simplex = [list(x0)]
    for i in range(n):
        pt = list(x0)
        pt[i] += step
        simplex.append(pt)
    fv = [f(pt) for pt in simplex]
    for _ in range(maxiter):
        order = sorted(range(n + 1), key=fv.__getitem__)
        simplex = [simplex[i] for i in order]
        fv = [fv[i] for i in order]
        if fv[-1] - fv[0] < fatol:
            break
        centroid = [sum(simplex[i][d] for i in range(n)) / n for d in range(n)]
        worst = simplex[-1]
        xr = [2.0 * centroid[d] - worst[d] for d in range(n)]
        fr = f(xr)
        if fr < fv[0]:
            xe = [3.0 * centroid[d] - 2.0 * worst[d] for d in range(n)]
            fe = f(xe)
            if fe < fr:
                simplex[-1], fv[-1] = xe, fe
            else:
                simplex[-1], fv[-1] = xr, fr
        elif fr < fv[-2]:
            simplex[-1], fv[-1] = xr, fr
        else:
            if fr < fv[-1]:
                xc = [centroid[d] + 0.5 * (xr[d] - centroid[d]) for d in range(n)]
            else:
                xc = [centroid[d] + 0.5 * (worst[d] - centroid[d]) for d in range(n)]
            fc = f(xc)
            if fc < fr or fc < fv[-1]:
                simplex[-1], fv[-1] = xc, fc
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = [
                        best[d] + 0.5 * (simplex[i][d] - best[d]) for d in range(n)
                    ]
                    fv[i] = f(simplex[i])
    i = min(range(n + 1), key=fv.__getitem__)
    return simplex[i], fv[i]


_VERTEX_LOGITS = (
    [30.0, 0.0, 0.0, 0.0],
    [0.0, 30.0, 0.0, 0.0],
    [0.0, 0.0, 30.0, 0.0],
    [0.0, 0.0, 0.0, 30.0],
)
# barycentric (1/3, 1/3, 1/3, 0) and permutations: the diagonal blocks whose
# entry product attains 1/27
_FACE_CENTER_LOGITS = (
    [0.0, 0.0, 0.0, -30.0],
    [0.0, 0.0, -30.0, 0.0],
    [0.0, -30.0, 0.0, 0.0],
    [-30.0, 0.0, 0.0, 0.0],
)

_PI = 3.141592653589793


def _structured_starts(n_u: int) -> list[list[float]]:
    """Deterministic start points covering the known extremal configurations."""
    rot_presets = [[0.0] * (3 * n_u)]
    if n_u == 2:
        rot_presets.append([0.0, 0.0, 0.0, _PI, 0.0, 0.0])  # identity + x flip
    if n_u == 3:
        rot_presets.append(
            [_PI, 0.0, 0.0, 0.0, _PI, 0.0, 0.0, 0.0, _PI]  # x, y, z flips
        )
    weight_block = [0.0] * n_u if n_u > 1 else []
    t_presets = [[0.0, 0.0, 0.0, 0.0]]
    t_presets.extend(list(v) for v in _VERTEX_LOGITS)
    t_presets.extend(list(v) for v in _FACE_CENTER_LOGITS)
    starts = []
    for rot in rot_presets:
        for t in t_presets:
            starts.append(rot + weight_block + t)
    return starts


def _random_start(n_u: int, rng: np.random.Generator) -> list[float]:
    x: list[float] = []
    for _ in range(n_u):
        axis = rng.standard_normal(3)
        axis /= max(float(np.linalg.norm(axis)), 1e-12)
        angle = float(rng.uniform(0.0, _PI))
        x.extend((angle * axis).tolist())
    if n_u > 1:
        x.extend(rng.normal(0.0, 1.5, size=n_u).tolist())
    x.extend(rng.normal(0.0, 1.5, size=4).tolist())
    return x


def _embed_params(x: list[float], n_src: int, n_dst: int) -> list[float]:
    """Lift a class-n_src parameter vector into class n_dst (extra terms get
    zero rotation and vanishing weight)."""
    if n_dst < n_src:
        raise ValueError("can only embed into a class with more terms")
    rot = list(x[: 3 * n_src]) + [0.0] * (3 * (n_dst - n_src))
    logits = list(x[3 * n_src : 4 * n_src]) if n_src > 1 else [0.0]
    logits += [-40.0] * (n_dst - n_src)
    if n_dst == 1:
        logits = []
    return rot + logits + list(x[-4:])


def _optimize_point(
    n_u: int,
    p: float,
    direction: str,
    restarts: int,
    rng: np.random.Generator,
    extra_starts: tuple[list[float], ...] = (),
    maxiter: int = DEFAULT_MAXITER,
    fatol: float = DEFAULT_FATOL,
) -> tuple[float, list[float]]:
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts!r}")
    sign = -1.0 if direction == "max" else 1.0

    def f(x: list[float]) -> float:
        return sign * _mixture_det(x, n_u, p)

    # structured/extra starts use part of the restart budget; the rest is random
    starts = list(extra_starts) + _structured_starts(n_u)
    best_x: list[float] | None = None
    best_f = float("inf")
    # raw start values fold into the best regardless of budget; the local
    # search can only improve on them
    run_budget = restarts
    for i, x0 in enumerate(starts):
        f0 = f(x0)
        if f0 < best_f:
            best_f, best_x = f0, list(x0)
        if i < run_budget:
            xb, fb = _nelder_mead(f, x0, maxiter=maxiter, fatol=fatol)
            if fb < best_f:
                best_f, best_x = fb, xb
    remaining = max(0, run_budget - len(starts))
    for _ in range(remaining):
        x0 = _random_start(n_u, rng)
        xb, fb = _nelder_mead(f, x0, maxiter=maxiter, fatol=fatol)
        if fb < best_f:
            best_f, best_x = fb, xb
    assert best_x is not None
    return sign * best_f, best_x


def optimize_boundary(
    ndc_class: int,
    p: float,
    direction: str,
    restarts: int = DEFAULT_RESTARTS,
    rng: np.random.Generator | None = None,
) -> float:
    """Extremal causal determinant of a mixture at fixed mixing probability.

    Multi-start simplex search over the channel rotations, their weights and
    the Bell-diagonal correlation block; `direction` picks max or min.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing probability must lie in [0, 1], got {p!r}")
    n_u = _terms_for_class(ndc_class)
    if rng is None:
        rng = derive_rng(0, ndc_class, 0 if direction == "max" else 1)
    value, _ = _optimize_point(n_u, p, direction, restarts, rng)
    return value


@dataclass(frozen=True)
class RangeInterval:
    """Attainable determinant interval with witnesses for both endpoints."""

    lo: float
    hi: float
    attained_lo: str
    attained_hi: str

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo!r}, {self.hi!r}]")


@dataclass(frozen=True)
class BoundaryTable:
    """Optimized lower/upper determinant curves over a grid of mixing probabilities."""

    ndc_class: int
    p_grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    restarts: int
    tolerance: float
    seed: int

    def __post_init__(self) -> None:
        p_grid = np.asarray(self.p_grid, dtype=float)
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if p_grid.ndim != 1 or p_grid.size < 2:
            raise ValueError("p_grid must hold at least two points")
        if np.any(np.diff(p_grid) <= 0) or p_grid[0] < 0.0 or p_grid[-1] > 1.0:
            raise ValueError("p_grid must ascend within [0, 1]")
        if lower.shape != p_grid.shape or upper.shape != p_grid.shape:
            raise ValueError("lower/upper must match the grid length")
        if np.any(lower > upper + 1e-12):
            raise ValueError("lower curve exceeds upper curve")
        _set = object.__setattr__
        for name, arr in (("p_grid", p_grid), ("lower", lower), ("upper", upper)):
            arr = arr.copy()
            arr.setflags(write=False)
            _set(self, name, arr)
        _set(self, "ndc_class", int(self.ndc_class))

    @property
    def resolution(self) -> float:
        return float(np.max(np.diff(self.p_grid)))

    def interval_at(self, p: float) -> tuple[float, float]:
        """Linear interpolation of (lower, upper) at p."""
        if not self.p_grid[0] <= p <= self.p_grid[-1]:
            raise ValueError(f"p={p!r} outside the tabulated grid")
        lo = float(np.interp(p, self.p_grid, self.lower))
        hi = float(np.interp(p, self.p_grid, self.upper))
        return lo, hi


def _optimize_curve(
    n_u: int,
    p_grid: np.ndarray,
    direction: str,
    restarts: int,
    seed: int,
    class_tag: int,
    chain: tuple[np.ndarray, list[list[float]], int] | None = None,
) -> tuple[np.ndarray, list[list[float]]]:
    """Best value and parameters per grid point, with neighbor refinement.

    `chain` carries (values, parameters, term count) of the next-smaller class;
    its configurations are feasible here too, so they seed and floor the search.
    """
    dir_idx = 0 if direction == "max" else 1
    sign = -1.0 if direction == "max" else 1.0
    values = np.empty(len(p_grid))
    xs: list[list[float]] = []
    for i, p in enumerate(p_grid):
        rng = derive_rng(seed, class_tag, dir_idx, i)
        extra: list[list[float]] = []
        if chain is not None:
            extra.append(_embed_params(chain[1][i], chain[2], n_u))
        value, x = _optimize_point(
            n_u, float(p), direction, restarts, rng, extra_starts=extra
        )
        if chain is not None and sign * chain[0][i] < sign * value:
            value = chain[0][i]
        values[i] = value
        xs.append(x)

    def refine(order: range) -> None:
        prev: list[float] | None = None
        for i in order:
            p = float(p_grid[i])

            def f(x: list[float]) -> float:
                return sign * _mixture_det(x, n_u, p)

            if prev is not None:
                xb, fb = _nelder_mead(f, prev)
                if fb < sign * values[i]:
                    values[i] = sign * fb
                    xs[i] = xb
            prev = xs[i]

    refine(range(len(p_grid)))
    refine(range(len(p_grid) - 1, -1, -1))
    return values, xs


def boundary_table(
    ndc_class: int,
    p_grid: np.ndarray | None = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> BoundaryTable:
    """Optimize both boundary curves for one channel class.

    The structured starts include the exact endpoint witnesses, so
    upper(0) = 1/27, upper(1) = 1, and for the >= 3 class lower(0) = -1 and
    lower(1) = -1/27, all to optimizer precision.
    """
    tables = boundary_tables((ndc_class,), p_grid=p_grid, restarts=restarts, seed=seed)
    return tables[ndc_class]


def boundary_tables(
    classes: tuple[int, ...] = (1, 2, 3),
    p_grid: np.ndarray | None = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> dict[int, BoundaryTable]:
    """Boundary tables for several classes with nesting enforced by chaining.

    Classes are optimized in ascending term count; every configuration found
    for a smaller class is feasible for the larger ones, so its value seeds
    and floors the larger search.  The returned intervals are therefore
    monotone: interval(1, p) within interval(2, p) within interval(3, p).
    """
    if p_grid is None:
        p_grid = np.linspace(0.0, 1.0, DEFAULT_P_STEPS)
    p_grid = np.asarray(p_grid, dtype=float)
    out: dict[int, BoundaryTable] = {}
    chain_state: dict[str, tuple[np.ndarray, list[list[float]], int] | None] = {
        "max": None,
        "min": None,
    }
    for ndc_class in sorted(set(classes)):
        n_u = _terms_for_class(ndc_class)
        curves: dict[str, np.ndarray] = {}
        for direction in ("max", "min"):
            values, xs = _optimize_curve(
                n_u,
                p_grid,
                direction,
                restarts,
                seed,
                class_tag=ndc_class,
                chain=chain_state[direction],
            )
            curves[direction] = values
            chain_state[direction] = (values, xs, n_u)
        out[ndc_class] = BoundaryTable(
            ndc_class=ndc_class,
            p_grid=p_grid,
            lower=curves["min"],
            upper=curves["max"],
            restarts=restarts,
            tolerance=DEFAULT_FATOL,
            seed=seed,
        )
    return out


def witness_identity() -> MixedUnitaryChannel:
    """Single-unitary channel with determinant exactly 1."""
    return unitary_channel(pauli(0))


def witness_half_identity_half_flip() -> MixedUnitaryChannel:
    """Two-term channel at the bottom of the two-unitary range (determinant 0)."""
    return MixedUnitaryChannel(
        np.array([0.5, 0.5]), (Unitary2(pauli(0)), Unitary2(pauli(1)))
    )


def witness_equal_pauli_flips() -> MixedUnitaryChannel:
    """Equal mixture of the three Pauli flips (determinant -1/27)."""
    third = np.array([1.0, 1.0, 1.0]) / 3.0
    return MixedUnitaryChannel(
        third, (Unitary2(pauli(1)), Unitary2(pauli(2)), Unitary2(pauli(3)))
    )


def witness_singlet() -> TwoQubitState:
    """Shared state at the bottom of the common-cause range (determinant -1)."""
    return bell_state(3)


def witness_werner_edge() -> TwoQubitState:
    """Werner state at omega = -1/3, the top of the common-cause range (1/27)."""
    return werner_state(-1.0 / 3.0)


def theoretical_range(kind: str, ndc: int = 1) -> RangeInterval:
    """Attainable determinant interval for a pure mechanism.

    kind "dc" with the term count, or "cc" for an arbitrary shared state.
    """
    if kind == "cc":
        return RangeInterval(
            -1.0, 1.0 / 27.0, "singlet state", "werner state at omega = -1/3"
        )
    if kind == "dc":
        if ndc < 1:
            raise ValueError(f"term count must be at least 1, got {ndc!r}")
        if ndc == 1:
            return RangeInterval(1.0, 1.0, "any single unitary", "any single unitary")
        if ndc == 2:
            return RangeInterval(
                0.0,
                1.0,
                "half-half mixture of identity and x flip",
                "any single unitary",
            )
        return RangeInterval(
            -1.0 / 27.0,
            1.0,
            "equal mixture of the three Pauli flips",
            "any single unitary",
        )
    raise ValueError(f"kind must be 'dc' or 'cc', got {kind!r}")


def random_mixture_deltas(
    ndc_class: int, p: float, samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Determinants of `samples` random mixtures at mixing probability p.

    Channels draw Haar unitaries with flat Dirichlet weights; states draw from
    the Hilbert-Schmidt ensemble.  This is the sampling oracle for the
    optimized boundaries.
    """
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples!r}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing probability must lie in [0, 1], got {p!r}")
    n_u = _terms_for_class(ndc_class)
    us = haar_random_unitaries(samples * n_u, rng).reshape(samples, n_u, 2, 2)
    rots = rotations_of(us.reshape(-1, 2, 2)).reshape(samples, n_u, 3, 3)
    weights = rng.dirichlet(np.ones(n_u), size=samples)
    c = np.einsum("sn,snkj->sjk", weights, rots)  # kj->jk transposes each rotation
    if p < 1.0:
        blocks = random_correlation_blocks(samples, rng)
        c = p * c + (1.0 - p) * blocks
    return np.asarray(det3(c))


def empirical_range(
    ndc_class: int, p: float, samples: int, rng: np.random.Generator
) -> RangeInterval:
    """Observed determinant range over random mixtures (the sampling oracle)."""
    deltas = random_mixture_deltas(ndc_class, p, samples, rng)
    i_lo = int(np.argmin(deltas))
    i_hi = int(np.argmax(deltas))
    return RangeInterval(
        float(deltas[i_lo]),
        float(deltas[i_hi]),
        f"random mixture sample {i_lo} of {samples}",
        f"random mixture sample {i_hi} of {samples}",
    )
