"""Unit conversion constants.

All internal physics runs in SI; exposed interfaces use knots, flight
levels, and nautical miles. The constants below are fixed so that every
conversion in the codebase is bit-reproducible.
"""

KT_TO_MS = 0.514444          # knots -> m/s
MS_TO_KT = 1.0 / KT_TO_MS
FT_TO_M = 0.3048
M_TO_FT = 1.0 / FT_TO_M
FL_TO_M = 30.48              # one flight level = 100 ft
M_TO_FL = 1.0 / FL_TO_M
FL_TO_FT = 100.0
NMI_TO_M = 1852.0
M_TO_NMI = 1.0 / NMI_TO_M
FPM_TO_MS = FT_TO_M / 60.0   # ft/min -> m/s
MS_TO_FPM = 1.0 / FPM_TO_MS

EARTH_RADIUS_NMI = 3440.065  # mean spherical radius

G0 = 9.80665                 # m/s^2
