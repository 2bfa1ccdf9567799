"""Central numerical tolerances.

All validity checks in the package read their thresholds from a single
``Tolerances`` record so that tests can tighten or loosen them uniformly.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10   # max |H - H^dagger| entrywise
    psd: float = 1e-8            # allowed magnitude of negative eigenvalues
    trace: float = 1e-8          # allowed |tr - 1| for states
    fidelity_clip: float = 1e-6  # slack before clipping fidelity into [0, 1]


DEFAULT = Tolerances()
