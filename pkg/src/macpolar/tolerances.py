"""Numerical thresholds shared across the package.

The defaults can be overridden for a whole process with the environment
variable ``MACPOLAR_TOLERANCES="eps_zero,ratio,oracle"``, e.g.
``MACPOLAR_TOLERANCES=1e-10,1e-8,1e-6``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_VAR = "MACPOLAR_TOLERANCES"


@dataclass(frozen=True)
class Tolerances:
    eps_zero: float = 1e-9  # probability / DFT coefficient treated as zero at or below this
    ratio: float = 1e-7  # unimodularity, fingerprint consistency, homomorphism laws
    oracle: float = 1e-6  # equality of mutual informations in brute-force checks

    def __post_init__(self):
        for name in ("eps_zero", "ratio", "oracle"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be positive")

    @classmethod
    def from_env(cls) -> Tolerances:
        raw = os.environ.get(ENV_VAR, "").strip()
        if not raw:
            return cls()
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) != 3:
            raise ValueError(f"{ENV_VAR} must hold three comma-separated numbers, got {raw!r}")
        return cls(*(float(p) for p in parts))


def resolve(tol: Tolerances | None) -> Tolerances:
    return tol if tol is not None else Tolerances.from_env()
