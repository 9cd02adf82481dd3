"""Characteristic polynomials and their roots for matrices up to 4x4.

Coefficient sequences are ordered highest degree first, as in ``numpy.polyval``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidArgumentError, NumericalFailureError, UnsupportedDimensionError

MAX_DIMENSION = 4
ABERTH_BUDGET = 200
ABERTH_RESTARTS = 4
FL_ERROR_FACTOR = 4.0
VIETA_TOLERANCE = 1e-8


@dataclass(frozen=True)
class CharPoly:
    coefficients: tuple
    # Optional absolute error estimate per coefficient; used to decide when
    # nearby computed roots are numerically one multiple root.
    error_bounds: Optional[tuple] = None

    def __post_init__(self):
        c = tuple(float(v) for v in self.coefficients)
        if not c or c[0] != 1.0:
            raise InvalidArgumentError("characteristic polynomial must be monic")
        if not all(math.isfinite(v) for v in c):
            raise InvalidArgumentError("characteristic polynomial has non-finite coefficients")
        object.__setattr__(self, "coefficients", c)
        if self.error_bounds is not None:
            e = tuple(float(v) for v in self.error_bounds)
            if len(e) != len(c) or not all(v >= 0 and math.isfinite(v) for v in e):
                raise InvalidArgumentError("error_bounds must be finite, nonnegative and match the coefficients")
            object.__setattr__(self, "error_bounds", e)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        return np.polyval(self.coefficients, z)


def characteristic_polynomial(matrix) -> CharPoly:
    """``det(lambda*I - A)`` by the Faddeev-LeVerrier recursion.

    With ``M_0 = 0`` and ``c_0 = 1``: ``M_k = A M_{k-1} + c_{k-1} I`` and
    ``c_k = -tr(A M_k) / k``.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_DIMENSION:
        raise UnsupportedDimensionError(f"characteristic polynomial supports n <= {MAX_DIMENSION}, got {n}")
    if n == 0 or not np.all(np.isfinite(a)):
        raise InvalidArgumentError("matrix must be non-empty with finite entries")
    coeffs = [1.0]
    m = np.zeros_like(a)
    eye = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * eye
        coeffs.append(-np.trace(a @ m) / k)
    # Rounding in the recursion is relative to the matrix, not to c_k itself.
    norm = float(np.linalg.norm(a))
    bounds = tuple(FL_ERROR_FACTOR * n * k * np.finfo(float).eps * norm**k for k in range(n + 1))
    return CharPoly(tuple(coeffs), bounds)


def _coefficients(poly) -> np.ndarray:
    c = poly.coefficients if isinstance(poly, CharPoly) else poly
    c = np.array(c, dtype=complex if np.iscomplexobj(c) else float)
    if c.ndim != 1 or c.size < 2:
        raise InvalidArgumentError("need a polynomial of degree >= 1")
    if c[0] == 0:
        raise InvalidArgumentError("leading coefficient must be non-zero")
    return c


def _quadratic(a, b, c):
    if not any(isinstance(v, complex) and v.imag != 0 for v in (a, b, c)):
        a, b, c = float(np.real(a)), float(np.real(b)), float(np.real(c))
        disc = b * b - 4 * a * c
        if disc < 0:
            re, im = -b / (2 * a), math.sqrt(-disc) / (2 * a)
            return [complex(re, im), complex(re, -im)]
        # Cancellation-free form.
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    else:
        sq = cmath.sqrt(b * b - 4 * a * c)
        q = -0.5 * (b + sq if (b.conjugate() * sq).real >= 0 else b - sq)
    if q == 0:
        return [0j, 0j]
    return [q / a, c / q]


def _initial_guesses(c: np.ndarray, rng) -> np.ndarray:
    """Starting points on circles whose radii come from the Newton polygon.

    With ``p(z) = sum a_k z^k``, each edge ``(i, j)`` of the upper convex hull
    of the points ``(k, log|a_k|)`` carries ``j - i`` roots of modulus about
    ``(|a_i| / |a_j|)^(1/(j-i))``.
    """
    n = c.size - 1
    a = np.abs(c[::-1])
    ks = [k for k in range(n + 1) if a[k] > 0]
    logs = {k: math.log(a[k]) for k in ks}
    hull = []
    for k in ks:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # Drop j when it lies on or below the chord from i to k.
            if (logs[j] - logs[i]) * (k - i) <= (logs[k] - logs[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    offset = 0.4 if rng is None else rng.uniform(0, 2 * math.pi)
    guesses = []
    for i, j in zip(hull, hull[1:]):
        m = j - i
        radius = math.exp((logs[i] - logs[j]) / m)
        angles = offset + 2 * math.pi * np.arange(m) / m + i
        guesses.extend(radius * np.exp(1j * angles))
    return np.array(guesses, dtype=complex)


def _aberth(c: np.ndarray, z: np.ndarray):
    """Aberth-Ehrlich iteration; a root is frozen once its residual drops to
    the rounding level of Horner evaluation or its correction stalls."""
    dc = np.polyder(c)
    abs_c = np.abs(c)
    eps = np.finfo(float).eps
    frozen = np.zeros(z.size, dtype=bool)
    for _ in range(ABERTH_BUDGET):
        for k in range(z.size):
            if frozen[k]:
                continue
            pk = np.polyval(c, z[k])
            noise = 8 * eps * np.polyval(abs_c, abs(z[k]))
            if abs(pk) <= noise:
                frozen[k] = True
                continue
            dpk = np.polyval(dc, z[k])
            diff = z[k] - np.delete(z, k)
            if dpk == 0 or np.any(diff == 0):
                return z, False
            ratio = pk / dpk
            step = ratio / (1.0 - ratio * np.sum(1.0 / diff))
            if not np.isfinite(step):
                return z, False
            z[k] -= step
            if abs(step) <= 4 * eps * abs(z[k]):
                frozen[k] = True
        if frozen.all():
            return z, True
    return z, False


def _residual(c, z) -> float:
    return float(np.max(np.abs(np.polyval(c, z)))) if np.size(z) else 0.0


def _noise_floor(c: np.ndarray, z, error_bounds: Optional[np.ndarray]) -> float:
    """Residual size explained by rounding or by known coefficient errors."""
    if error_bounds is None:
        return 8 * np.finfo(float).eps * float(np.polyval(np.abs(c), abs(z)))
    return float(np.polyval(error_bounds, abs(z)))


def _polish_clusters(c: np.ndarray, z: np.ndarray, error_bounds: Optional[np.ndarray] = None) -> np.ndarray:
    """Replace clusters around a multiple root by their polished centroid.

    A root of multiplicity ``m`` is only found to ``eps**(1/m)`` accuracy.
    Roots whose Newton inclusion discs ``n (|p| + noise) / |p'|`` overlap form
    a cluster; its centroid is refined by Newton's method on ``p^(m-1)``, for
    which the root is simple, and kept only if its residual is at the noise
    floor. Distinct but close roots therefore stay apart.
    """
    n = z.size
    dc = np.polyder(c)
    radius = np.empty(n)
    for k in range(n):
        num = abs(np.polyval(c, z[k])) + _noise_floor(c, z[k], error_bounds)
        den = abs(np.polyval(dc, z[k]))
        radius[k] = np.inf if den == 0 else n * num / den
    # Union of overlapping discs.
    label = list(range(n))

    def find(i):
        while label[i] != i:
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radius[i] + radius[j]:
                label[find(j)] = find(i)
    out = z.copy()
    for root in set(find(i) for i in range(n)):
        members = [k for k in range(n) if find(k) == root]
        while len(members) > 1:
            center = _cluster_center(c, z[members])
            # Every member's own disc must contain the refined center.
            inside = [k for k in members if abs(z[k] - center) <= radius[k]]
            if len(inside) == len(members):
                if abs(np.polyval(c, center)) <= _noise_floor(c, center, error_bounds):
                    out[members] = center
                break
            members = inside
    return out


def _cluster_center(c: np.ndarray, members: np.ndarray) -> complex:
    """Centroid refined by Newton's method on ``p^(m-1)``."""
    m = members.size
    center = np.mean(members)
    d = np.polyder(c, m - 1)
    dd = np.polyder(d)
    for _ in range(8):
        den = np.polyval(dd, center)
        if den == 0:
            break
        step = np.polyval(d, center) / den
        center -= step
        if abs(step) <= 4 * np.finfo(float).eps * max(abs(center), 1e-300):
            break
    return center


def _newton_polish(c: np.ndarray, z: np.ndarray, simple: np.ndarray) -> np.ndarray:
    dc = np.polyder(c)
    for k in np.flatnonzero(simple):
        for _ in range(3):
            d = np.polyval(dc, z[k])
            if d == 0:
                break
            cand = z[k] - np.polyval(c, z[k]) / d
            if abs(np.polyval(c, cand)) < abs(np.polyval(c, z[k])):
                z[k] = cand
            else:
                break
    return z


def _pair_conjugates(z: np.ndarray) -> np.ndarray:
    scale = max(float(np.max(np.abs(z))), 1e-300)
    z = z.copy()
    z[np.abs(z.imag) <= 1e-12 * scale] = z[np.abs(z.imag) <= 1e-12 * scale].real
    upper = [k for k in range(z.size) if z[k].imag > 0]
    lower = [k for k in range(z.size) if z[k].imag < 0]
    if len(upper) != len(lower):
        return z
    for k in upper:
        j = min(lower, key=lambda j: abs(z[j] - np.conj(z[k])))
        lower.remove(j)
        mid = 0.5 * (z[k] + np.conj(z[j]))
        z[k], z[j] = mid, np.conj(mid)
    return z


def polynomial_roots(poly: Union[CharPoly, Sequence[float]], seed: int = 0) -> np.ndarray:
    """All roots with multiplicity, as a complex array.

    Degrees 1 and 2 use closed forms; higher degrees use Aberth simultaneous
    iteration with randomized restarts, followed by cluster and Newton
    polishing. Real polynomials return exact conjugate pairs.

    Coefficients whose magnitudes are so spread out that powers of some root
    fall into the subnormal range (below about 1e-308) are not supported.
    """
    c = _coefficients(poly)
    real = np.isrealobj(c)
    c = c / c[0]
    # Strip zero roots exactly.
    n_zero = 0
    while c.size > 1 and c[-1] == 0:
        c = c[:-1]
        n_zero += 1
    zeros = np.zeros(n_zero, dtype=complex)
    n = c.size - 1
    if n == 0:
        return zeros
    if n == 1:
        roots = np.array([-c[1]], dtype=complex)
    elif n == 2:
        roots = np.array(_quadratic(c[0], c[1], c[2]), dtype=complex)
    else:
        # Rescale z = rho * y so that every |c_k| / rho**k <= 1; rho bounds the
        # root moduli up to a factor 2. Powers are formed from k-th roots so
        # tiny or huge coefficients do not under- or overflow.
        k = np.arange(n + 1)
        kth = np.abs(c[1:]) ** (1.0 / k[1:])
        rho = float(np.max(kth))

        def scaled(values):
            values = np.asarray(values)
            mags = np.concatenate([[1.0], (np.abs(values[1:]) ** (1.0 / k[1:]) / rho) ** k[1:]])
            phase = np.ones_like(values)
            nz = values != 0
            phase[nz] = values[nz] / np.abs(values[nz])
            return mags * phase

        cs = scaled(c)
        bounds = None
        if isinstance(poly, CharPoly) and poly.error_bounds is not None:
            bounds = scaled(np.array(poly.error_bounds[: c.size]))
            bounds[0] = 0.0
        # A trailing coefficient that underflows after scaling is a root below
        # the representable range; it is reported as zero.
        while cs[-1] == 0:
            cs = cs[:-1]
            zeros = np.append(zeros, 0.0)
        if bounds is not None:
            bounds = bounds[: cs.size]
        # Small residuals alone can hide two iterates stuck on one root, so
        # attempts are ranked by how well the rebuilt coefficients match.
        rng = None
        best, best_mismatch, best_res = None, np.inf, np.inf
        for attempt in range(ABERTH_RESTARTS + 1):
            z, converged = _aberth(cs, _initial_guesses(cs, rng))
            if np.all(np.isfinite(z)):
                z = _polish_clusters(cs, z, bounds)
                best_res = min(best_res, _residual(cs, z))
                mismatch = float(np.max(np.abs(np.poly(z) - cs)))
                if converged and mismatch < best_mismatch:
                    best, best_mismatch = z, mismatch
                if converged and mismatch <= VIETA_TOLERANCE:
                    break
            rng = np.random.default_rng(seed + attempt)
        if best is None:
            raise NumericalFailureError(
                f"Aberth iteration did not converge in {ABERTH_BUDGET} iterations", best_residual=best_res
            )
        roots = best
        simple = np.array([np.sum(roots == r) == 1 for r in roots])
        roots = rho * _newton_polish(cs, roots, simple)
    if real:
        roots = _pair_conjugates(roots)
    roots = np.concatenate([roots, zeros])
    full = _coefficients(poly)
    full = full / full[0]
    # 1e-9 (1 + |c|), scaled by |root|^n: evaluating p at a large root cannot
    # be more accurate than eps * |root|^n.
    bound = 1e-9 * (1.0 + float(np.linalg.norm(full))) * np.maximum(1.0, np.abs(roots)) ** (full.size - 1)
    excess = np.abs(np.polyval(full, roots)) / bound
    if roots.size and np.max(excess) > 1:
        worst = int(np.argmax(excess))
        res = float(abs(np.polyval(full, roots[worst])))
        raise NumericalFailureError(f"root residual {res:.3g} exceeds {bound[worst]:.3g}", best_residual=res)
    return roots


def descartes_positive_root_bound(coefficients: Sequence[float]) -> int:
    """Number of sign changes in the non-zero coefficients."""
    nonzero = [float(v) for v in coefficients if float(v) != 0.0]
    if not nonzero:
        raise InvalidArgumentError("all coefficients are zero")
    if float(coefficients[0]) == 0.0:
        raise InvalidArgumentError("leading coefficient must be non-zero")
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if (a > 0) != (b > 0))


def routh_hurwitz_cubic(A: float, B: float, C: float) -> bool:
    """True iff every root of ``x^3 + A x^2 + B x + C`` has negative real part."""
    return A > 0 and C > 0 and A * B - C > 0


def deflate(coefficients: Sequence[float], root: float) -> tuple:
    """Synthetic division by ``(x - root)``; returns (quotient, remainder)."""
    out = [float(coefficients[0])]
    for a in coefficients[1:]:
        out.append(float(a) + root * out[-1])
    return tuple(out[:-1]), out[-1]


def irreducible_blocks(matrix) -> list:
    """Index sets of the diagonal blocks of a block-triangular permutation.

    These are the strongly connected components of the graph with an edge
    ``i -> j`` whenever ``A[i, j] != 0``; eigenvalues of the whole matrix are
    the union of the eigenvalues of these blocks.
    """
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    reach = (a != 0) | np.eye(n, dtype=bool)
    for _ in range(n):
        reach = reach | ((reach.astype(int) @ reach.astype(int)) > 0)
    mutual = reach & reach.T
    blocks, seen = [], set()
    for i in range(n):
        if i not in seen:
            block = [j for j in range(n) if mutual[i, j]]
            seen.update(block)
            blocks.append(block)
    return blocks


def matrix_eigenvalues(matrix, seed: int = 0) -> np.ndarray:
    """Eigenvalues of a matrix with n <= 4, block by block.

    Isolating decoupled blocks first (as eigenvalue balancing does) keeps
    structurally exact eigenvalues exact instead of recovering them from a
    polynomial with nearby roots.
    """
    a = np.array(matrix, dtype=float)
    characteristic_polynomial(a)  # validates shape, size and finiteness
    out = []
    for block in irreducible_blocks(a):
        sub = a[np.ix_(block, block)]
        out.extend(polynomial_roots(characteristic_polynomial(sub), seed=seed))
    return np.array(out, dtype=complex)
