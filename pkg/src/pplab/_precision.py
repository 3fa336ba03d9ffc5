import mpmath

WORKING_DPS = 40
TAIL_CUTOFF = mpmath.mpf("1e-40")
