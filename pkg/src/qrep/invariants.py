"""Scalar invariants of almost-commuting unitary data.

* :func:`kappa` — the trace-logarithm invariant (1/2pi i) tr(log w), an
  integer whenever det(w) = 1, in its standard and normalized-trace forms.
* :func:`winding_number_det_segment` — the winding number of the loop
  t -> det((1-t) 1 + t w), computed purely from determinants by adaptive
  argument tracking.  This is the cross-check for kappa: the two must agree
  and share no machinery (the winding code never sees an eigenvalue of w).
* :func:`exel_homotopy_gap` — the maximal deviation between the linear
  segment (1-t) 1 + t w and the one-parameter group exp(t log w); the
  identity wn = kappa rests on this staying below 1.
* :func:`kazhdan_stability` — the quantitative stability experiment for
  products of commutators: small hypothesis norms force the invariant of
  the perturbed tuple to match, witnessed along an explicit homotopy.
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
    HypothesisViolated,
    NotALoop,
    PathSingular,
)
from .matcore import Unitary, herm_eig, lu_det, op_norm, principal_log_unitary, unitary_eig

__all__ = [
    "InvariantReport",
    "kappa",
    "winding_number_det_segment",
    "exel_homotopy_gap",
    "StabilityReport",
    "kazhdan_stability",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class InvariantReport:
    """A scalar invariant with its integrality verdict and error budget.

    ``rounded`` is present only when integrality is expected (e.g. det = 1
    for the standard trace); ``is_integer`` additionally demands the residual
    |value - rounded| stay within the reported tolerance.
    """

    name: str
    value: float
    rounded: int | None
    is_integer: bool
    defect_data: dict
    tolerances: dict

    def to_json(self) -> dict:
        obj = {
            "name": self.name,
            "value": self.value,
            "is_integer": self.is_integer,
            "defect_data": dict(self.defect_data),
            "tolerances": dict(self.tolerances),
        }
        if self.rounded is not None:
            obj["rounded"] = self.rounded
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "InvariantReport":
        try:
            return cls(
                name=obj["name"],
                value=float(obj["value"]),
                rounded=int(obj["rounded"]) if "rounded" in obj else None,
                is_integer=bool(obj["is_integer"]),
                defect_data=dict(obj["defect_data"]),
                tolerances=dict(obj["tolerances"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed invariant report: {exc}") from None


def _integrality(value: float, expected: bool, integer_tol: float):
    if not expected:
        return None, False
    rounded = int(round(value))
    return rounded, abs(value - rounded) <= integer_tol


def kappa(w: Unitary,
          trace_mode: str = "standard",
          *,
          margin: float = DEFAULTS.branch_margin,
          cluster_width: float = DEFAULTS.cluster_width,
          integer_tol: float = DEFAULTS.integer_residual,
          det_tol: float = DEFAULTS.det_one) -> InvariantReport:
    """Trace-logarithm invariant (1/2pi i) tr(log w) of a unitary.

    ``trace_mode`` "standard" uses the matrix trace, under which the value
    is an integer whenever det(w) = 1; "normalized" divides by the dimension
    (the tracial-state version, integer only in multiples of 1/n).  The
    spectrum must stay ``margin`` away from -1 or :class:`BranchCut` is
    raised.  ``defect_data`` records ||w - 1|| and which norm domain (< 1,
    < 2) the input satisfies; the normalized form is classically stated for
    ||w - 1|| < 1 but is computed whenever the logarithm exists.
    """
    if trace_mode not in ("standard", "normalized"):
        raise ValueError(f"unknown trace_mode {trace_mode!r}")
    es = unitary_eig(w, cluster_width)
    dist = np.abs(es.values + 1.0)
    nearest = float(dist.min())
    if nearest <= margin:
        raise BranchCut("spectrum within margin of -1; invariant undefined",
                        distance=nearest, margin=margin)
    theta = np.angle(es.values)
    n = w.dim
    total = float(theta.sum()) / _TWO_PI
    value = total if trace_mode == "standard" else total / n
    norm_dev = op_norm(w.m - np.eye(n))
    det_dev = abs(lu_det(w.m) - 1.0)
    expected = trace_mode == "standard" and det_dev <= det_tol
    rounded, is_integer = _integrality(value, expected, integer_tol)
    return InvariantReport(
        name="kappa" if trace_mode == "standard" else "kappa_tau",
        value=value,
        rounded=rounded,
        is_integer=is_integer,
        defect_data={
            "norm_w_minus_1": norm_dev,
            "min_dist_to_minus_1": nearest,
            "det_deviation": det_dev,
            "domain_lt_1": bool(norm_dev < 1.0),
            "domain_lt_2": bool(norm_dev < 2.0),
        },
        tolerances={
            "branch_margin": margin,
            "cluster_width": cluster_width,
            "integer_residual": integer_tol,
            "det_one": det_tol,
        },
    )


def winding_number_det_segment(w: Unitary,
                               *,
                               samples: int = DEFAULTS.winding_samples,
                               max_depth: int = DEFAULTS.winding_max_depth,
                               loop_tol: float = DEFAULTS.loop_closure,
                               floor: float = DEFAULTS.path_floor,
                               integer_tol: float = DEFAULTS.integer_residual) -> InvariantReport:
    """Winding number of t -> det((1-t) 1 + t w) around 0, by determinants only.

    The loop starts and ends at 1 (hence the |det(w) - 1| <= loop_tol gate).
    The argument is accumulated over an adaptively bisected partition of
    [0, 1]: an interval is split while its endpoint argument increment
    exceeds pi/2, with the stricter cap pi/16 wherever |det| dips below
    0.1x the largest magnitude seen, since small determinants mean fast
    argument motion and risk of aliasing a full turn.  A determinant below
    ``floor``, or an increment still ambiguous at depth ``max_depth``,
    raises :class:`PathSingular`.

    Deliberately independent of :func:`kappa`: no eigenvalues of w are used.
    """
    m = w.m
    n = w.dim
    det_dev = abs(lu_det(m) - 1.0)
    if det_dev > loop_tol:
        raise NotALoop("det(w) is not 1; the determinant path is not a loop",
                       deviation=det_dev, tol=loop_tol)
    eye = np.eye(n)

    state = {"runmax": 0.0, "minabs": math.inf, "evals": 0}

    def pencil(t: float) -> complex:
        d = lu_det((1.0 - t) * eye + t * m)
        a = abs(d)
        state["runmax"] = max(state["runmax"], a)
        state["minabs"] = min(state["minabs"], a)
        state["evals"] += 1
        if a < floor:
            raise PathSingular("determinant vanishes along the segment path",
                               t=t, abs_det=a)
        return d

    def track(t0, d0, t1, d1, depth) -> float:
        step = np.angle(d1 / d0)
        dipped = min(abs(d0), abs(d1)) < 0.1 * state["runmax"]
        cap = math.pi / 16 if dipped else math.pi / 2
        if abs(step) <= cap:
            return step
        if depth >= max_depth:
            raise PathSingular("argument increment unresolvable at depth cap",
                               t0=t0, t1=t1, increment=float(step), depth=depth)
        tm = 0.5 * (t0 + t1)
        dm = pencil(tm)
        return track(t0, d0, tm, dm, depth + 1) + track(tm, dm, t1, d1, depth + 1)

    ts = np.linspace(0.0, 1.0, samples + 1)
    ds = [pencil(float(t)) for t in ts]
    total = 0.0
    for i in range(samples):
        total += track(float(ts[i]), ds[i], float(ts[i + 1]), ds[i + 1], 0)
    value = total / _TWO_PI
    rounded, is_integer = _integrality(value, True, integer_tol)
    return InvariantReport(
        name="winding_number",
        value=value,
        rounded=rounded,
        is_integer=is_integer,
        defect_data={
            "det_deviation": det_dev,
            "min_abs_det_sampled": state["minabs"],
            "max_abs_det_sampled": state["runmax"],
            "det_evaluations": float(state["evals"]),
        },
        tolerances={
            "loop_closure": loop_tol,
            "path_floor": floor,
            "integer_residual": integer_tol,
            "winding_samples": samples,
            "winding_max_depth": max_depth,
        },
    )


def exel_homotopy_gap(w: Unitary,
                      *,
                      grid: int = DEFAULTS.homotopy_grid,
                      margin: float = DEFAULTS.branch_margin,
                      cluster_width: float = DEFAULTS.cluster_width) -> float:
    """Max over t of ||(1-t) 1 + t w  -  exp(t log w)||.

    Both paths are functions of w, so in w's eigenbasis the difference is
    diagonal and its operator norm is the max over eigenvalues e^{i s} of
    the scalar |(1-t) + t e^{i s} - e^{i t s}|; the reduction to scalars is
    exact, not an approximation.  The max is taken on a uniform grid of
    ``grid`` points and then refined around the maximizer.  Values below 1
    certify that the determinant loop of the linear segment is homotopic to
    the exponential path through invertibles, which is what ties the
    winding number to kappa.
    """
    es = unitary_eig(w, cluster_width)
    dist = np.abs(es.values + 1.0)
    if float(dist.min()) <= margin:
        raise BranchCut("spectrum within margin of -1; log path undefined",
                        distance=float(dist.min()), margin=margin)
    theta = np.angle(es.values)[None, :]
    lam = np.exp(1j * theta)

    def deviation(ts: np.ndarray) -> np.ndarray:
        t = ts[:, None]
        return np.abs((1.0 - t) + t * lam - np.exp(1j * t * theta)).max(axis=1)

    ts = np.linspace(0.0, 1.0, grid)
    devs = deviation(ts)
    i = int(np.argmax(devs))
    best = float(devs[i])
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, grid - 1)]
    for _ in range(4):
        ts = np.linspace(lo, hi, 65)
        devs = deviation(ts)
        i = int(np.argmax(devs))
        best = max(best, float(devs[i]))
        lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, 64)]
    return best


def _commutator_product(pairs: list[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    n = pairs[0][0].shape[0]
    out = np.eye(n, dtype=np.complex128)
    for u, v in pairs:
        out = out @ u @ v @ u.conj().T @ v.conj().T
    return out


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the commutator-product stability experiment."""

    genus: int
    dim: int
    bound: float                    # 1/(5 g): the hypothesis budget
    relator_defect: float           # ||prod [u_i, v_i] - 1|| for the base tuple
    relator_defect_alt: float       # same for the perturbed tuple
    max_generator_distance: float   # max over i of ||u_i - u'_i||, ||v_i - v'_i||
    homotopy_max_deviation: float   # max sampled ||w(t) - 1|| along the homotopy
    homotopy_ok: bool               # deviation stayed < 1 at every sample
    samples: int
    kappa_start: InvariantReport
    kappa_end: InvariantReport
    equal: bool

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "dim": self.dim,
            "bound": self.bound,
            "relator_defect": self.relator_defect,
            "relator_defect_alt": self.relator_defect_alt,
            "max_generator_distance": self.max_generator_distance,
            "homotopy_max_deviation": self.homotopy_max_deviation,
            "homotopy_ok": self.homotopy_ok,
            "samples": self.samples,
            "kappa_start": self.kappa_start.to_json(),
            "kappa_end": self.kappa_end.to_json(),
            "equal": self.equal,
        }


def kazhdan_stability(g: int,
                      pairs: list[tuple[Unitary, Unitary]],
                      pairs_alt: list[tuple[Unitary, Unitary]],
                      *,
                      samples: int = DEFAULTS.stability_samples,
                      margin: float = DEFAULTS.branch_margin) -> StabilityReport:
    """Stability of the trace-logarithm invariant under small perturbations.

    Hypotheses (all strict, all measured and reported): the commutator
    product of the base tuple is within 1/(5g) of 1, and each perturbed
    generator is within 1/(5g) of its original.  Under them, the straight
    homotopy u_i(t) = u_i exp(t log(u_i* u_i')) (likewise v) keeps the
    commutator product w(t) within distance 1 of the identity, so its
    invariant cannot jump; the report carries the sampled maximum of
    ||w(t) - 1|| plus both endpoint invariants.

    Raises :class:`HypothesisViolated` naming the first bound that fails.
    """
    pairs = [tuple(p) for p in pairs]
    pairs_alt = [tuple(p) for p in pairs_alt]
    if not (len(pairs) == len(pairs_alt) == g) or g < 1:
        raise DimensionMismatch("expected g pairs in each tuple",
                                g=g, base=len(pairs), perturbed=len(pairs_alt))
    dims = {u.dim for p in pairs + pairs_alt for u in p}
    if len(dims) != 1:
        raise DimensionMismatch("tuple entries of mixed dimensions",
                                dims=sorted(dims))
    n = dims.pop()
    bound = 1.0 / (5.0 * g)

    w0 = _commutator_product([(u.m, v.m) for u, v in pairs])
    base_defect = op_norm(w0 - np.eye(n))
    if base_defect >= bound:
        raise HypothesisViolated("commutator product too far from 1",
                                 which="relator", value=base_defect, bound=bound)
    max_dist = 0.0
    for i, ((u, v), (u2, v2)) in enumerate(zip(pairs, pairs_alt), start=1):
        for label, a, b in (("u", u, u2), ("v", v, v2)):
            d = op_norm(a.m - b.m)
            max_dist = max(max_dist, d)
            if d >= bound:
                raise HypothesisViolated("generator perturbation too large",
                                         which=f"{label}_{i}", value=d, bound=bound)

    # Eigendata of the homotopy generators: u_i* u_i' is unitary and close to
    # 1, so its principal log exists with room to spare.
    arcs = []
    for (u, v), (u2, v2) in zip(pairs, pairs_alt):
        lu = principal_log_unitary(u.adjoint() @ u2, margin=margin)
        lv = principal_log_unitary(v.adjoint() @ v2, margin=margin)
        arcs.append((herm_eig(-1j * lu), herm_eig(-1j * lv)))

    eye = np.eye(n)
    worst = 0.0
    for t in np.linspace(0.0, 1.0, samples):
        moved = []
        for (u, v), (eu, ev) in zip(pairs, arcs):
            ut = u.m @ eu.apply(lambda vals: np.exp(1j * t * vals))
            vt = v.m @ ev.apply(lambda vals: np.exp(1j * t * vals))
            moved.append((ut, vt))
        worst = max(worst, op_norm(_commutator_product(moved) - eye))

    w1 = _commutator_product([(u.m, v.m) for u, v in pairs_alt])
    kappa_start = kappa(Unitary.of(w0), margin=margin)
    kappa_end = kappa(Unitary.of(w1), margin=margin)
    equal = (kappa_start.is_integer and kappa_end.is_integer
             and kappa_start.rounded == kappa_end.rounded)
    return StabilityReport(
        genus=g,
        dim=n,
        bound=bound,
        relator_defect=base_defect,
        relator_defect_alt=op_norm(w1 - eye),
        max_generator_distance=max_dist,
        homotopy_max_deviation=worst,
        homotopy_ok=worst < 1.0,
        samples=samples,
        kappa_start=kappa_start,
        kappa_end=kappa_end,
        equal=equal,
    )
