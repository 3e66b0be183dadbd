"""Values produced by the standalone scripts in tests/oracles, frozen for the suite.

Regenerate with ``python tests/oracles/<name>.py``; test_oracles.py checks
that the fast oracles still reproduce them.
"""

HEISENBERG = {
    "b_times_a": (1, 1, -1),
    "inverse_of_ab": (-1, -1, -1),
    "sphere_sizes_ab_r10": [1, 4, 12, 36, 82, 164, 294, 476, 724, 1052, 1464],
    "length_of_c": 4,
    "naive_ball_abc_r2": 29,
    "cocycle_max_norm_r8": [0, 1, 4, 9, 16, 25, 36, 49, 64],
}

BS2_SPHERE_SIZES_R10 = [1, 4, 12, 26, 50, 98, 184, 336, 606, 1086, 1914]

BS2_SUBLEVEL = {
    2: {"total": 11, "max_word_length": 2, "cumulative_by_radius": [1, 5, 11]},
    4: {"total": 59, "max_word_length": 6, "cumulative_by_radius": [1, 5, 17, 37, 53, 57, 59]},
    6: {"total": 279, "max_word_length": 10,
        "cumulative_by_radius": [1, 5, 17, 43, 91, 155, 213, 249, 269, 277, 279]},
}

ANOSOV_SUBLEVEL = {
    2: {"total": 5, "max_word_length": 1, "cumulative_by_radius": [1, 5]},
    4: {"total": 51, "max_word_length": 4, "cumulative_by_radius": [1, 7, 33, 47, 51]},
}

CRYSTO = {"reflection": "yes", "minus-identity": "yes", "triangle": "no", "swap": "no"}
