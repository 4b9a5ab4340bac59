"""Golden vectors for the 16-area worked example used across the suite.

Values carry the precision they were displayed at (2 or 3 decimals); the
matching tolerances in the tests account for that rounding.
"""

import numpy as np

# 16-area quantity signal, total 6272
Q16 = np.array(
    [19, 12, 153, 71, 13, 79, 7, 33, 16, 270, 812, 135, 241, 14, 60, 4337],
    dtype=np.float64,
)

# one lowpass pass over Q16 (displayed to 2 decimals, not exactly rounded)
A1_2DP = np.array([2093.40, 148.01, 61.97, 49.33, -15.24, 808.72, 262.17, 1026.60])

# level-2 approximation coefficients
A2_3DP = np.array([2272.128, 136.352, 158.422, 569.098])

# 16 x 4 reconstruction operator for length 16, level 2, daubechies:2
MREC_3DP = np.array([
    [0.637, 0.0, 0.0, -0.137],
    [0.296, 0.233, 0.0, -0.029],
    [0.079, 0.404, 0.0, 0.017],
    [-0.012, 0.512, 0.0, 0.0],
    [-0.137, 0.637, 0.0, 0.0],
    [-0.029, 0.296, 0.233, 0.0],
    [0.017, 0.079, 0.404, 0.0],
    [0.0, -0.012, 0.512, 0.0],
    [0.0, -0.137, 0.637, 0.0],
    [0.0, -0.029, 0.296, 0.233],
    [0.0, 0.017, 0.079, 0.404],
    [0.0, 0.0, -0.012, 0.512],
    [0.0, 0.0, -0.137, 0.637],
    [0.233, 0.0, -0.029, 0.296],
    [0.404, 0.0, 0.017, 0.079],
    [0.512, 0.0, 0.0, -0.012],
])

# level-2 approximation on the signal grid, A_2 = M_rec . a_2
A2_GRID_3DP = np.array([
    1369.821, 687.286, 244.677, 41.992, -224.980, 11.373, 112.860, 79.481,
    82.240, 175.643, 244.757, 289.584, 340.918, 693.698, 965.706, 1156.942,
])

# goal layout of the worked example (1-based positions)
LOWER_POSITIONS = (1, 2, 3, 14, 15, 16)
RAISE_POSITIONS = (5, 6, 7, 8, 9, 10)

# replacement coefficients quoted as a feasible point of the 12-row system
A2_HAT = np.array([0.0, 379.097, 31805.084, 5464.854])

# rebuilt approximation from A2_HAT
A2_HAT_GRID_3DP = np.array([
    -750.103, -70.090, 244.677, 194.196, 241.583, 7530.756, 12879.498,
    16287.810, 20216.058, 10670.153, 4734.636, 2409.508, -883.021, 693.698,
    965.706, -66.997,
])

# reassembled signal before the shift
QHAT_3DP = np.array([
    -2100.924, -745.376, 153.000, 223.204, 479.563, 7598.383, 12773.639,
    16241.328, 20149.818, 10764.510, 5301.879, 2254.924, -982.939, 14.000,
    60.000, 3113.061,
])

OFFSET = 2500.0
C_RANGE = (0.0539, 0.0549)

# masked integer signal as displayed; position 8 (1019) is the documented
# misprint, the displayed row sums to 6271 instead of 6272
QTILDE_PRINTED = np.array(
    [22, 95, 144, 148, 162, 549, 831, 1019, 1232, 722, 424, 259, 83, 137, 139, 305],
    dtype=np.int64,
)

# six-decimal daubechies:2 lowpass taps
D4_LOWPASS_6DP = np.array([0.482963, 0.836516, 0.224144, -0.129410])


def worked_goal_entries() -> list:
    """Goal file entries reproducing the worked example's layout."""
    entries = [{"index": i, "goal": "lower"} for i in LOWER_POSITIONS]
    entries += [{"index": i, "goal": "raise"} for i in RAISE_POSITIONS]
    return entries
