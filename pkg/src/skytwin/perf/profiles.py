"""Time-sampled flight profiles.

``FlightProfile`` is both the corpus record handed to the model fitter and
the output of closed-loop prediction: parallel arrays sampled at a fixed
time step, carrying altitude, speed, climb rate, and along-track distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..units import FL_TO_FT


@dataclass
class FlightProfile:
    t: np.ndarray          # s, strictly increasing
    fl: np.ndarray         # flight level (continuous)
    cas: np.ndarray        # knots
    rocd: np.ndarray | None = None     # ft/min; derived from fl when absent
    dist_nm: np.ndarray | None = None  # along-track ground distance
    lat: np.ndarray | None = None
    lon: np.ndarray | None = None
    cruise_cas: float | None = None    # knots, for the cruise-speed PMF
    cruise_mach: float | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.fl = np.asarray(self.fl, dtype=float)
        self.cas = np.asarray(self.cas, dtype=float)
        if self.t.ndim != 1 or self.fl.shape != self.t.shape or self.cas.shape != self.t.shape:
            raise ValueError("profile arrays must be 1-D and equal length")
        if len(self.t) >= 2 and not np.all(np.diff(self.t) > 0):
            raise ValueError("profile times must be strictly increasing")
        if self.rocd is None:
            self.rocd = np.gradient(self.fl, self.t) * FL_TO_FT * 60.0 if len(self.t) >= 2 else np.zeros_like(self.t)
        else:
            self.rocd = np.asarray(self.rocd, dtype=float)
        if self.dist_nm is not None:
            self.dist_nm = np.asarray(self.dist_nm, dtype=float)

    def __len__(self) -> int:
        return len(self.t)

    def fl_span(self) -> float:
        return float(self.fl.max() - self.fl.min())

    def value_at_fl(self, quantity: np.ndarray, fl: float, descending: bool) -> float | None:
        """Interpolate a parallel array at the first monotone crossing of
        ``fl``; None when the profile never reaches it."""
        lo, hi = float(self.fl.min()), float(self.fl.max())
        if not (lo <= fl <= hi):
            return None
        f, q = _monotone_in_fl(self.fl, quantity, descending)
        return float(np.interp(fl, f, q))


def _monotone_in_fl(fl: np.ndarray, q: np.ndarray, descending: bool) -> tuple[np.ndarray, np.ndarray]:
    """Filter samples to a strictly monotone FL sequence (ascending output),
    keeping the first visit to each level."""
    if descending:
        run = np.minimum.accumulate(fl)
    else:
        run = np.maximum.accumulate(fl)
    keep = np.empty(len(fl), dtype=bool)
    keep[0] = True
    keep[1:] = run[1:] != run[:-1]
    f, v = fl[keep], q[keep]
    if descending:
        f, v = f[::-1], v[::-1]
    # drop exact duplicates so np.interp sees strictly ascending abscissae
    uniq = np.empty(len(f), dtype=bool)
    uniq[0] = True
    uniq[1:] = np.diff(f) > 0
    return f[uniq], v[uniq]
