"""Discrete Fourier analysis on centered grids.

Convention: F(xi) = integral of f(x) exp(-2 pi i x.xi) dx.  Samples of f on a
GridSpec transform to samples of F on the dual grid (spacing 1/(2L), extent
N/(4L) per axis); dual_grid is an involution, so the inverse transform needs
no extra bookkeeping.  With the cell-volume scaling the pair is exact in the
DFT sense: Parseval holds to rounding, and for smooth functions with
negligible box tails the samples approximate the continuous transform with
spectral accuracy.

On top of the transform: Riesz and Poisson multipliers, maximal functions
over truncated cones, per-axis slab suprema of |F|, and sphere / dyadic-shell
/ cube-face functionals of the spectrum.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.ndimage import map_coordinates, maximum_filter1d

from .gridfn import FORMAT_VERSION, GridFunction, GridSpec
from .norms import lp_norm
from .quadrature import segment_integral
from .rearrange import decreasing_rearrangement, double_star

__all__ = [
    "SpectralFunction",
    "dual_grid",
    "transform",
    "inverse_transform",
    "apply_multiplier",
    "frequency_radii",
    "riesz",
    "spectral_derivative",
    "h1_norm",
    "poisson",
    "poisson_t_derivative",
    "default_time_grid",
    "ball_maximum",
    "vertical_maximal",
    "nontangential_maximal",
    "cone_derivative_check",
    "slab_sup",
    "sup_integral_functional",
    "ShellQuadrature",
    "sphere_integral",
    "dyadic_shell_terms",
    "dyadic_shell_sum",
    "cube_shell_sum",
    "cube_face_vs_annulus",
    "WeightedIntegral",
    "weighted_fourier_integral",
    "save_spectral",
    "load_spectral",
]

MEAN_TOL = 1e-8


def dual_grid(spec: GridSpec) -> GridSpec:
    """Frequency grid dual to spec: spacing 1/(2L), half extent N/(4L)."""
    extents = tuple(n / (4.0 * L) for n, L in zip(spec.points, spec.half_extents))
    return GridSpec(spec.dim, extents, spec.points)


@dataclass(frozen=True)
class SpectralFunction:
    """Complex samples of a Fourier transform on its dual grid."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != self.spec.shape:
            raise ValueError(f"values shape {vals.shape} does not match grid {self.spec.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def abs_values(self) -> np.ndarray:
        return np.abs(self.values)

    def scaled(self, c) -> "SpectralFunction":
        return SpectralFunction(self.spec, self.values * c)


def transform(f: GridFunction) -> SpectralFunction:
    vals = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values)))
    return SpectralFunction(dual_grid(f.spec), vals * f.spec.cell_volume)


def inverse_transform(F: SpectralFunction, kind="real") -> GridFunction:
    spec = dual_grid(F.spec)
    vals = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(F.values))) / spec.cell_volume
    if kind == "real":
        return GridFunction(spec, vals.real, "real")
    return GridFunction(spec, vals, "complex")


def apply_multiplier(F: SpectralFunction, multiplier: np.ndarray) -> SpectralFunction:
    return SpectralFunction(F.spec, F.values * multiplier)


def frequency_radii(spec: GridSpec) -> np.ndarray:
    """|xi| on the (dual) grid spec."""
    mesh = spec.meshgrid()
    return np.sqrt(sum(x ** 2 for x in mesh))


def _origin_index(spec: GridSpec):
    return tuple(n // 2 for n in spec.points)


def _warn_if_not_mean_zero(F: SpectralFunction, what: str):
    scale = float(np.max(np.abs(F.values)))
    if scale == 0:
        return
    dc = abs(F.values[_origin_index(F.spec)])
    if dc > MEAN_TOL * scale:
        warnings.warn(f"{what} applied to a function with nonzero mean "
                      f"(relative weight {dc / scale:.2e}); the result has "
                      "grid-dependent tails", RuntimeWarning, stacklevel=3)


def _riesz_multiplier(spec: GridSpec, j) -> np.ndarray:
    mesh = spec.meshgrid()
    r = frequency_radii(spec)
    # the symbol has no limit at the origin; 0 keeps mean-zero inputs exact
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(r > 0, -1j * mesh[j] / np.where(r > 0, r, 1.0), 0.0)
    return m


def riesz(f: GridFunction, j) -> GridFunction:
    """Riesz transform along axis j (the Hilbert transform when dim is 1)."""
    if not 0 <= j < f.spec.dim:
        raise ValueError(f"axis {j} out of range")
    F = transform(f)
    _warn_if_not_mean_zero(F, "riesz")
    out = apply_multiplier(F, _riesz_multiplier(F.spec, j))
    return inverse_transform(out, f.kind)


def spectral_derivative(f: GridFunction, j) -> GridFunction:
    if not 0 <= j < f.spec.dim:
        raise ValueError(f"axis {j} out of range")
    F = transform(f)
    xi_j = F.spec.meshgrid()[j]
    return inverse_transform(apply_multiplier(F, 2j * np.pi * xi_j), f.kind)


def h1_norm(f: GridFunction) -> float:
    """||f||_1 plus the L^1 norms of all Riesz transforms (truncated domain)."""
    total = lp_norm(f, 1)
    for j in range(f.spec.dim):
        total += lp_norm(riesz(f, j), 1)
    return float(total)


def _poisson_multiplier(spec: GridSpec, t, time_derivative=False) -> np.ndarray:
    r = frequency_radii(spec)
    m = np.exp(-2.0 * np.pi * r * t)
    if time_derivative:
        m = -2.0 * np.pi * r * m
    return m


def poisson(f: GridFunction, t) -> GridFunction:
    """Harmonic extension to height t (Poisson kernel convolution)."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    F = transform(f)
    return inverse_transform(apply_multiplier(F, _poisson_multiplier(F.spec, t)), f.kind)


def poisson_t_derivative(f: GridFunction, t) -> GridFunction:
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    F = transform(f)
    m = _poisson_multiplier(F.spec, t, time_derivative=True)
    return inverse_transform(apply_multiplier(F, m), f.kind)


def default_time_grid(spec: GridSpec, levels=64) -> np.ndarray:
    """Geometric heights [min spacing / 4, 8 max extent] for maximal functions."""
    lo = min(spec.spacing) / 4.0
    hi = 8.0 * max(spec.half_extents)
    return np.geomspace(lo, hi, levels)


def ball_maximum(values: np.ndarray, spec: GridSpec, radius: float) -> np.ndarray:
    """Pointwise max of values over the Euclidean ball of the given radius.

    The ball is sampled at grid nodes; nodes outside the box do not
    contribute.  radius below the spacing returns values unchanged.
    """
    if radius >= math.hypot(*(2.0 * L for L in spec.half_extents)):
        return np.full_like(values, values.max())
    last = spec.dim - 1
    w_last = int(radius / spec.spacing[last] + 1e-9)
    if spec.dim == 1:
        return maximum_filter1d(values, 2 * w_last + 1, mode="nearest")
    # decompose the ball into 1-d windows along the last axis, one per
    # transverse offset; "nearest" padding never wins because the filtered
    # rows are shifted copies whose edges repeat in-box values
    out = np.full_like(values, -np.inf)
    head_spacing = spec.spacing[:-1]
    head_shape = values.shape[:-1]
    ranges = [np.arange(-int(radius / s + 1e-9), int(radius / s + 1e-9) + 1)
              for s in head_spacing]
    for offset in np.stack(np.meshgrid(*ranges, indexing="ij"), -1).reshape(-1, last):
        d2 = sum((o * s) ** 2 for o, s in zip(offset, head_spacing))
        if d2 > radius * radius * (1 + 1e-12):
            continue
        if any(abs(int(o)) >= head_shape[ax] for ax, o in enumerate(offset)):
            continue  # the shifted copy lies entirely outside the box
        w = int(math.sqrt(max(radius * radius - d2, 0.0)) / spec.spacing[last] + 1e-9)
        shifted = values
        for ax, o in enumerate(offset):
            o = int(o)
            if o == 0:
                continue
            pad = np.full_like(shifted, -np.inf)
            n = head_shape[ax]
            src = [slice(None)] * values.ndim
            dst = [slice(None)] * values.ndim
            if o > 0:
                dst[ax] = slice(0, n - o)
                src[ax] = slice(o, n)
            else:
                dst[ax] = slice(-o, n)
                src[ax] = slice(0, n + o)
            pad[tuple(dst)] = shifted[tuple(src)]
            shifted = pad
        filt = maximum_filter1d(shifted, 2 * w + 1, axis=last, mode="nearest")
        np.maximum(out, filt, out=out)
    return out


def _poisson_stack(f: GridFunction, t_grid, time_derivative=False):
    F = transform(f)
    for t in t_grid:
        m = _poisson_multiplier(F.spec, t, time_derivative)
        yield t, np.abs(inverse_transform(apply_multiplier(F, m), "complex").values)


def vertical_maximal(f: GridFunction, t_grid=None) -> GridFunction:
    """sup over sampled heights t of |(P_t * f)(x)|."""
    if t_grid is None:
        t_grid = default_time_grid(f.spec)
    if len(t_grid) == 0:
        raise ValueError("t_grid must not be empty")
    out = np.zeros(f.spec.shape)
    for _, u in _poisson_stack(f, t_grid):
        np.maximum(out, u, out=out)
    return GridFunction(f.spec, out)


def nontangential_maximal(f: GridFunction, t_grid=None, time_derivative=False) -> GridFunction:
    """sup of |P_t * f| (or of its t-derivative) over the sampled cone |x-y| <= t."""
    if t_grid is None:
        t_grid = default_time_grid(f.spec)
    if len(t_grid) == 0:
        raise ValueError("t_grid must not be empty")
    out = np.zeros(f.spec.shape)
    for t, u in _poisson_stack(f, t_grid, time_derivative):
        np.maximum(out, ball_maximum(u, f.spec, t), out=out)
    return GridFunction(f.spec, out)


def cone_derivative_check(f: GridFunction, t_grid=None) -> tuple[np.ndarray, np.ndarray]:
    """Cone sup of |du/dt| vs. the summed cone sups of its conjugate pieces.

    u is the harmonic extension of f; the t-derivative equals minus the sum
    over j of P_t applied to the Riesz transform of the j-th derivative, so
    the left array is dominated by the right one up to rounding.  Both sides
    use the same sampled cone; derivatives are spectral.
    """
    if t_grid is None:
        t_grid = default_time_grid(f.spec)
    F = transform(f)
    spec = f.spec
    mesh = F.spec.meshgrid()
    r = frequency_radii(F.spec)
    lhs = np.zeros(spec.shape)
    rhs_parts = [np.zeros(spec.shape) for _ in range(spec.dim)]
    for t in t_grid:
        pt = _poisson_multiplier(F.spec, t)
        u_t = np.abs(inverse_transform(
            apply_multiplier(F, -2.0 * np.pi * r * pt), "complex").values)
        np.maximum(lhs, ball_maximum(u_t, spec, t), out=lhs)
        for j in range(spec.dim):
            # Riesz of the j-th derivative: symbol 2 pi xi_j^2 / |xi|
            with np.errstate(divide="ignore", invalid="ignore"):
                sym = np.where(r > 0, 2.0 * np.pi * mesh[j] ** 2 / np.where(r > 0, r, 1.0), 0.0)
            v = np.abs(inverse_transform(apply_multiplier(F, sym * pt), "complex").values)
            np.maximum(rhs_parts[j], ball_maximum(v, spec, t), out=rhs_parts[j])
    return lhs, sum(rhs_parts)


# ---------------------------------------------------------------------------
# spectral slab and shell functionals
# ---------------------------------------------------------------------------


def slab_sup(F: SpectralFunction, axis, t) -> GridFunction:
    """Per-slab sup of |F| over the frequencies with |xi_axis| >= t."""
    spec = F.spec
    if spec.dim < 2:
        raise ValueError("needs at least 2 frequency axes")
    if t < 0:
        raise ValueError("t must be nonnegative")
    nodes = spec.axis_nodes(axis)
    mask = np.abs(nodes) >= t
    reduced = spec.drop_axis(axis)
    if not mask.any():
        warnings.warn(f"threshold {t} exceeds the frequency extent; sup is empty",
                      RuntimeWarning, stacklevel=2)
        return GridFunction(reduced, np.zeros(reduced.shape))
    sub = np.compress(mask, np.abs(F.values), axis=axis)
    return GridFunction(reduced, sub.max(axis=axis))


def sup_integral_functional(f: Union[GridFunction, SpectralFunction], axis,
                            levels=64) -> float:
    """Integral over t > 0 of the running average, at t^(n-1), of the slab sup.

    The slab sup at threshold t is rearranged over its (n-1)-dimensional
    frequency domain and averaged up to measure t^(n-1); the t-integral uses
    a geometric grid with a constant continuation below the first node (the
    integrand tends to a finite limit) and drops t beyond the frequency
    extent, where the sup vanishes.
    """
    F = transform(f) if isinstance(f, GridFunction) else f
    n = F.spec.dim
    if n < 2:
        raise ValueError("needs at least 2 frequency axes")
    t_hi = F.spec.half_extents[axis]
    t_lo = F.spec.spacing[axis] / 256.0
    ts = np.geomspace(t_lo, t_hi, levels)
    vals = np.empty(levels)
    for i, t in enumerate(ts):
        g = slab_sup(F, axis, t)
        prof = decreasing_rearrangement(g)
        if prof.values.size == 0:
            vals[i] = 0.0
        else:
            vals[i] = double_star(prof, t ** (n - 1))
    total = vals[0] * t_lo
    for i in range(levels - 1):
        total += segment_integral(ts[i], ts[i + 1], vals[i], vals[i + 1])
    return float(total)


@dataclass(frozen=True)
class ShellQuadrature:
    """Angular x radial sampling rule for sphere integrals of a spectrum.

    dim 2 uses a trapezoid rule with angular_count points on the circle; dim
    3 a latitude-longitude product rule, Gauss-Legendre in the cosine of the
    polar angle (polar_count) times trapezoid in azimuth (azimuth_count).
    Weights sum to the exact unit-sphere measure.  radial_count is the number
    of sample radii per dyadic shell.
    """

    dim: int
    radial_count: int = 16
    angular_count: int = 64
    polar_count: int = 24
    azimuth_count: int = 48

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        counts = [self.radial_count, self.angular_count] if self.dim == 2 else \
            [self.radial_count, self.polar_count, self.azimuth_count]
        if any(c < 8 for c in counts):
            raise ValueError("all sample counts must be at least 8")

    def directions(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit vectors and weights summing to the unit-sphere measure."""
        if self.dim == 2:
            a = self.angular_count
            phi = 2.0 * np.pi * np.arange(a) / a
            dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
            return dirs, np.full(a, 2.0 * np.pi / a)
        x, wx = np.polynomial.legendre.leggauss(self.polar_count)
        a = self.azimuth_count
        phi = 2.0 * np.pi * np.arange(a) / a
        sin_th = np.sqrt(1.0 - x ** 2)
        dirs = np.stack([
            np.outer(sin_th, np.cos(phi)).ravel(),
            np.outer(sin_th, np.sin(phi)).ravel(),
            np.repeat(x, a),
        ], axis=1)
        w = np.repeat(wx, a) * (2.0 * np.pi / a)
        return dirs, w


def _interp_abs(F: SpectralFunction, points: np.ndarray) -> np.ndarray:
    """Multilinear interpolation of |F| at physical frequency points (K, n)."""
    spec = F.spec
    coords = np.empty((spec.dim, points.shape[0]))
    for ax in range(spec.dim):
        coords[ax] = (points[:, ax] + spec.half_extents[ax]) / spec.spacing[ax]
    return map_coordinates(np.abs(F.values), coords, order=1, mode="constant", cval=0.0)


def sphere_integral(F: SpectralFunction, r, quad: ShellQuadrature) -> float:
    """Surface integral of |F| over the sphere of radius r."""
    if quad.dim != F.spec.dim:
        raise ValueError("quadrature dimension does not match the grid")
    if not 0 < r <= min(F.spec.half_extents):
        raise ValueError(f"radius {r} outside the frequency extent")
    dirs, w = quad.directions()
    vals = _interp_abs(F, r * dirs)
    return float(np.dot(w, vals) * r ** (F.spec.dim - 1))


def _shell_range(F: SpectralFunction) -> range:
    lo = math.ceil(math.log2(max(F.spec.spacing)))
    hi = math.floor(math.log2(min(F.spec.half_extents))) - 1
    return range(lo, hi + 1)


def dyadic_shell_terms(F: SpectralFunction, quad: ShellQuadrature):
    """(k, sup over sampled r in [2^k, 2^(k+1)] of the sphere integral) pairs.

    Covers the dyadic shells the grid resolves: one cell <= 2^k and
    2^(k+1) <= extent; the (finitely many in principle) shells outside are
    skipped.
    """
    ks = list(_shell_range(F))
    sups = np.zeros(len(ks))
    for i, k in enumerate(ks):
        radii = np.geomspace(2.0 ** k, 2.0 ** (k + 1), quad.radial_count)
        sups[i] = max(sphere_integral(F, r, quad) for r in radii)
    return np.array(ks), sups


def dyadic_shell_sum(F: SpectralFunction, weight_exponent: float,
                     quad: ShellQuadrature) -> float:
    """Sum over resolvable shells of 2^(k w) times the shell sup."""
    ks, sups = dyadic_shell_terms(F, quad)
    return float(np.sum(2.0 ** (ks * weight_exponent) * sups))


def _face_integrals(F: SpectralFunction, j: int, face_half: float) -> np.ndarray:
    """Rectangle-rule integral of |F| over {|xi_m| <= face_half, m != j}, per xi_j."""
    spec = F.spec
    av = np.abs(F.values)
    area = 1.0
    for m in range(spec.dim):
        if m == j:
            continue
        keep = np.abs(spec.axis_nodes(m)) <= face_half + 1e-12
        av = np.compress(keep, av, axis=m)
        area *= spec.spacing[m]
    axes = tuple(m for m in range(spec.dim) if m != j)
    return av.sum(axis=axes) * area


def cube_shell_sum(F: SpectralFunction) -> float:
    """Cube-face analogue of the dyadic shell sum, on grid-aligned planes.

    Sum over axes j and resolvable k of 2^(k (2 - n)) times the sup, over
    frequency nodes with 2^k <= |xi_j| <= 2^(k+1), of the integral of |F|
    over the face {|xi_m| <= 2^k, m != j}.
    """
    spec = F.spec
    if spec.dim < 2:
        raise ValueError("needs at least 2 frequency axes")
    w = 2 - spec.dim
    total = 0.0
    for j in range(spec.dim):
        nodes = np.abs(spec.axis_nodes(j))
        for k in _shell_range(F):
            mask = (nodes >= 2.0 ** k) & (nodes <= 2.0 ** (k + 1))
            if not mask.any():
                continue
            faces = _face_integrals(F, j, 2.0 ** k)
            total += 2.0 ** (k * w) * float(faces[mask].max())
    return float(total)


def cube_face_vs_annulus(F: SpectralFunction, k: int) -> tuple[float, float]:
    """Face sups against the integral over the dyadic box annulus.

    Returns (lhs, rhs): lhs sums over axes j the sup, over nodes with
    2^(k-1) <= |xi_j| <= 2^k, of the |F| integral over the face
    {|xi_m| <= 2^k, m != j}; rhs integrates |F| over the annulus between the
    sup-norm boxes of half sides 2^(k-1) and 2^k.  Covering the annulus by
    slabs bounds rhs by 2^k times lhs.
    """
    spec = F.spec
    if spec.dim < 2:
        raise ValueError("needs at least 2 frequency axes")
    half, inner = 2.0 ** k, 2.0 ** (k - 1)
    lhs = 0.0
    for j in range(spec.dim):
        nodes = np.abs(spec.axis_nodes(j))
        mask = (nodes >= inner) & (nodes <= half)
        if not mask.any():
            continue
        faces = _face_integrals(F, j, half)
        lhs += float(faces[mask].max())
    mesh = spec.meshgrid()
    in_outer = np.ones(spec.shape, dtype=bool)
    in_inner = np.ones(spec.shape, dtype=bool)
    for x in mesh:
        in_outer &= np.abs(x) <= half
        in_inner &= np.abs(x) <= inner
    annulus = in_outer & ~in_inner
    rhs = float(np.sum(np.abs(F.values)[annulus]) * spec.cell_volume)
    return lhs, rhs


class WeightedIntegral(NamedTuple):
    value: float
    near_origin: float


def weighted_fourier_integral(F: SpectralFunction, gamma: float) -> WeightedIntegral:
    """Rectangle rule of |F(xi)| |xi|^gamma over the punctured frequency grid.

    near_origin isolates the contribution of the nodes within one cell of the
    origin, where a negative gamma makes the rule most sensitive to the
    discretization; a large share there means the value is unreliable.
    """
    spec = F.spec
    r = frequency_radii(spec)
    av = np.abs(F.values)
    mask = r > 0
    with np.errstate(divide="ignore"):
        integrand = np.where(mask, av * np.where(mask, r, 1.0) ** gamma, 0.0)
    cell = spec.cell_volume
    value = float(integrand.sum() * cell)
    near = mask & (r <= math.hypot(*spec.spacing) + 1e-12)
    return WeightedIntegral(value, float(integrand[near].sum() * cell))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def save_spectral(path, F: SpectralFunction):
    header = json.dumps({"format_version": FORMAT_VERSION, "grid": F.spec.to_dict()},
                        sort_keys=True)
    buf = io.BytesIO()
    np.savez(buf, header=np.frombuffer(header.encode(), dtype=np.uint8),
             values=F.values)
    data = buf.getvalue()
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)) or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_spectral(path) -> SpectralFunction:
    with np.load(path) as npz:
        header = json.loads(npz["header"].tobytes().decode())
        if header.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format version {header.get('format_version')}")
        spec = GridSpec.from_dict(header["grid"])
        return SpectralFunction(spec, npz["values"])
