"""Dense complex-matrix kernel.

Validation, determinants, operator norms, Hermitian and unitary
eigendecompositions, the principal logarithm of a unitary, spectral
projections, and the matrix JSON format.  Everything downstream (invariants,
Bott machinery, word evaluation) is built on these primitives.

Numerics are delegated to LAPACK through numpy: determinants via LU with
partial pivoting (`getrf`), Hermitian eigenproblems via `eigh`.  Unitary
matrices are diagonalized through their commuting Cartesian parts
H = (w + w*)/2 and K = (w - w*)/2i rather than a general nonsymmetric
solver, which keeps the eigenbasis orthonormal by construction and the
procedure deterministic; see :func:`unitary_eig`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS
from .errors import (
    BranchCut,
    DimensionMismatch,
    FormatError,
    NoSpectralGap,
    NotHermitian,
    NotUnitary,
)

__all__ = [
    "Unitary",
    "EigenSystem",
    "as_cmatrix",
    "adjoint",
    "lu_det",
    "op_norm",
    "herm_eig",
    "unitary_eig",
    "principal_log_unitary",
    "exp_skew",
    "spectral_projection",
    "matrix_to_json",
    "matrix_from_json",
]


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a square complex128 array with finite entries."""
    try:
        a = np.asarray(m, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"matrix entries must be numbers: {exc}") from None
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch("expected a square matrix", shape=tuple(a.shape))
    if not np.isfinite(a).all():
        raise FormatError("matrix entries must be finite")
    return a


def adjoint(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def lu_det(m) -> complex:
    """Determinant via LU with partial pivoting."""
    return complex(np.linalg.det(as_cmatrix(m)))


def op_norm(m) -> float:
    """Operator norm: sqrt of the top eigenvalue of m* m."""
    a = as_cmatrix(m)
    top = np.linalg.eigvalsh(adjoint(a) @ a)[-1]
    return math.sqrt(max(float(top), 0.0))


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + adjoint(m)) / 2


@dataclass(frozen=True)
class Unitary:
    """A square matrix together with its witnessed unitarity defect.

    ``utol`` is the measured ``||m* m - 1||_op`` at construction, not a
    requested bound; it is kept so downstream error analyses can cite it.
    Use :meth:`of` to construct (it validates), treat ``m`` as immutable.
    """

    m: np.ndarray
    utol: float

    @classmethod
    def of(cls, m, tol: float = DEFAULTS.unitarity) -> "Unitary":
        a = as_cmatrix(m)
        defect = op_norm(adjoint(a) @ a - np.eye(a.shape[0]))
        if defect > tol:
            raise NotUnitary("unitarity defect above tolerance", defect=defect, tol=tol)
        return cls(a, defect)

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    def adjoint(self) -> "Unitary":
        return Unitary(self.m.conj().T, self.utol)

    def __matmul__(self, other: "Unitary") -> "Unitary":
        if not isinstance(other, Unitary):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch("product of unitaries of different sizes",
                                    left=self.dim, right=other.dim)
        return Unitary.of(self.m @ other.m)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues plus an orthonormal eigenbasis (columns of ``vectors``)."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ adjoint(self.vectors)

    def apply(self, scalar_fn) -> np.ndarray:
        """Functional calculus: scalar_fn maps the eigenvalue array pointwise."""
        return (self.vectors * scalar_fn(self.values)) @ adjoint(self.vectors)


def _fix_column_phases(vectors: np.ndarray, floor: float = 1e-8) -> np.ndarray:
    # Deterministic gauge: rotate each eigenvector so its first coordinate of
    # magnitude > floor lands on the positive real axis.
    v = np.array(vectors, copy=True)
    for j in range(v.shape[1]):
        col = v[:, j]
        hits = np.flatnonzero(np.abs(col) > floor)
        i0 = int(hits[0]) if hits.size else int(np.argmax(np.abs(col)))
        phase = col[i0] / abs(col[i0])
        v[:, j] = col * phase.conjugate()
    return v


def herm_eig(h, tol: float = DEFAULTS.hermiticity) -> EigenSystem:
    """Eigendecomposition of a self-adjoint matrix, values real ascending."""
    a = as_cmatrix(h)
    defect = op_norm(a - adjoint(a))
    if defect > tol:
        raise NotHermitian("self-adjointness defect above tolerance",
                           defect=defect, tol=tol)
    values, vectors = np.linalg.eigh(_hermitize(a))
    return EigenSystem(values, _fix_column_phases(vectors))


def _cluster_stops(sorted_reals: np.ndarray, width: float) -> list[int]:
    # Greedy split of an ascending sequence at gaps wider than `width`.
    stops = []
    for i in range(1, len(sorted_reals)):
        if sorted_reals[i] - sorted_reals[i - 1] > width:
            stops.append(i)
    stops.append(len(sorted_reals))
    return stops


def unitary_eig(w: Unitary, cluster_width: float = DEFAULTS.cluster_width) -> EigenSystem:
    """Eigendecomposition of a unitary via its commuting Cartesian parts.

    For unitary w the Hermitian matrices H = (w + w*)/2 and K = (w - w*)/2i
    commute, and w = H + iK.  Diagonalizing H alone misreads eigenvectors
    whenever two eigenvalues of w share a real part (e.g. conjugate phases
    e^{i t} and e^{-i t}), so eigenvalues of H are grouped into clusters of
    width ``cluster_width`` and K is compressed to each cluster's eigenspace
    and diagonalized there.  The result is ordered by ascending real part,
    ties broken by ascending imaginary part, with each eigenvector's leading
    significant coordinate rotated to the positive real axis.
    """
    a = w.m
    n = w.dim
    h = _hermitize((a + adjoint(a)) / 2)
    k = _hermitize((a - adjoint(a)) / 2j)
    h_vals, h_vecs = np.linalg.eigh(h)
    vectors = np.empty((n, n), dtype=np.complex128)
    start = 0
    for stop in _cluster_stops(h_vals, cluster_width):
        basis = h_vecs[:, start:stop]
        if stop - start == 1:
            vectors[:, start:stop] = basis
        else:
            compressed = _hermitize(adjoint(basis) @ k @ basis)
            _, refine = np.linalg.eigh(compressed)
            vectors[:, start:stop] = basis @ refine
        start = stop
    vectors = _fix_column_phases(vectors)
    # Rayleigh quotients: exact eigenvalues for exact invariant lines, and the
    # right reporting choice either way.
    values = np.einsum("ij,ik,kj->j", vectors.conj(), a, vectors)
    return EigenSystem(values, vectors)


def principal_log_unitary(w: Unitary,
                          margin: float = DEFAULTS.branch_margin,
                          cluster_width: float = DEFAULTS.cluster_width) -> np.ndarray:
    """Principal logarithm of a unitary: skew-Hermitian L with exp(L) = w.

    Eigenvalue phases are taken in (-pi, pi); any eigenvalue within
    ``margin`` of -1 makes the branch choice meaningless and raises
    :class:`BranchCut`.
    """
    es = unitary_eig(w, cluster_width)
    return _log_from_eigensystem(es, margin)


def _log_from_eigensystem(es: EigenSystem, margin: float) -> np.ndarray:
    dist = np.abs(es.values + 1.0)
    worst = int(np.argmin(dist))
    if dist[worst] <= margin:
        raise BranchCut("eigenvalue too close to -1 for the principal logarithm",
                        distance=float(dist[worst]), margin=margin,
                        eigenvalue=complex(es.values[worst]))
    log = es.apply(lambda vals: 1j * np.angle(vals))
    return (log - adjoint(log)) / 2


def exp_skew(l, herm_tol: float = DEFAULTS.hermiticity) -> Unitary:
    """Exponential of a skew-Hermitian matrix, returned as a Unitary.

    Computed by Hermitian eigendecomposition of -iL, so the result is
    unitary to working precision by construction.
    """
    a = as_cmatrix(l)
    es = herm_eig(-1j * a, tol=herm_tol)
    return Unitary.of(es.apply(lambda vals: np.exp(1j * vals)))


def spectral_projection(e,
                        threshold: float = DEFAULTS.projection_threshold,
                        gap: float = DEFAULTS.projection_gap,
                        herm_tol: float = DEFAULTS.hermiticity) -> tuple[np.ndarray, int]:
    """Spectral projection of a self-adjoint matrix above a threshold.

    Requires the spectrum to clear the band (threshold - gap, threshold + gap);
    an eigenvalue inside the band means the projection is not stable at this
    precision and raises :class:`NoSpectralGap`.  Returns (p, rank).
    """
    es = herm_eig(e, tol=herm_tol)
    inside = np.abs(es.values - threshold) < gap
    if inside.any():
        worst = float(es.values[inside][0])
        raise NoSpectralGap("eigenvalue inside the forbidden band",
                            eigenvalue=worst, threshold=threshold, gap=gap)
    above = es.vectors[:, es.values > threshold]
    p = above @ adjoint(above)
    return _hermitize(p), above.shape[1]


# -- matrix JSON --------------------------------------------------------------
#
# {"dim": n, "re": [n*n reals], "im": [n*n reals]}, row-major.  Python's json
# module prints doubles with repr (shortest round-trip form), so write->read
# is bit-exact for finite values; non-finite values are rejected outright.

def matrix_to_json(m) -> dict:
    a = as_cmatrix(m)
    return {
        "dim": int(a.shape[0]),
        "re": [float(x) for x in a.real.ravel()],
        "im": [float(x) for x in a.imag.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict) or not {"dim", "re", "im"} <= set(obj):
        raise FormatError("matrix object must have keys dim, re, im")
    try:
        n = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed matrix object: {exc}") from None
    if n < 1 or re.shape != (n * n,) or im.shape != (n * n,):
        raise FormatError("matrix entry count does not match dim",
                          dim=n, re_len=int(re.size), im_len=int(im.size))
    return as_cmatrix((re + 1j * im).reshape(n, n))
