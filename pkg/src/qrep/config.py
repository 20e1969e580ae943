"""Numerical policy in one place.

Every tolerance, threshold, and sampling density used by the library lives
in the :class:`Tolerances` dataclass so that reports can record exactly the
policy under which a number was produced.  Library functions take the
specific bounds they need as keyword arguments whose defaults come from
``DEFAULTS``; the CLI additionally honours ``QREP_TOL_*`` environment
variables (see :func:`from_env`).
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # matrix predicates
    unitarity: float = 1e-8         # max allowed ||m* m - 1||_op
    hermiticity: float = 1e-8       # max allowed ||m - m*||_op
    # logarithms and eigen decompositions
    branch_margin: float = 1e-6     # min allowed distance of spectrum to -1
    cluster_width: float = 1e-7     # eigenvalue clustering width (real parts)
    # almost projections
    projection_threshold: float = 0.5
    projection_gap: float = 0.1     # forbidden half-band around the threshold
    defect_max: float = 0.125       # ||e^2 - e|| bound for a usable rank
    # integrality
    integer_residual: float = 1e-6  # |value - round(value)| for integer claims
    det_one: float = 1e-8           # |det(w) - 1| for integrality to apply
    # determinant path tracking
    loop_closure: float = 1e-6      # |det(w) - 1| for the path to be a loop
    path_floor: float = 1e-12       # |det| below this is treated as singular
    winding_samples: int = 64       # initial uniform subdivision of [0, 1]
    winding_max_depth: int = 40     # bisection depth cap per interval
    # homotopy scans
    homotopy_grid: int = 257        # samples for the linear-path deviation max
    stability_samples: int = 65     # samples along a stability homotopy

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULTS = Tolerances()

_ENV_PREFIX = "QREP_TOL_"


def from_env(base: Tolerances = DEFAULTS, environ=None) -> Tolerances:
    """Return ``base`` with any ``QREP_TOL_<FIELD>`` overrides applied.

    Field names map to upper case, e.g. ``QREP_TOL_BRANCH_MARGIN=1e-9``.
    Integer fields are parsed as integers.  Unknown variables with the
    prefix raise ``ValueError`` so typos do not silently do nothing.
    """
    env = os.environ if environ is None else environ
    fields = {f.name: f for f in dataclasses.fields(Tolerances)}
    updates = {}
    for key, raw in env.items():
        if not key.startswith(_ENV_PREFIX):
            continue
        name = key[len(_ENV_PREFIX):].lower()
        if name not in fields:
            raise ValueError(f"unknown tolerance variable {key}")
        caster = int if fields[name].type == "int" else float
        updates[name] = caster(raw)
    return dataclasses.replace(base, **updates) if updates else base
