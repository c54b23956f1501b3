"""Reference parameter sets

The ``figures`` command walks these lists. Each entry carries a ``name``
that becomes the stem of its output files.
"""

# Field profiles at the first two resonances (n = 30); deformed j flagged approximate
FIGURE_FIELDS: list[dict] = [
    {"name": "field_nu1_exact_j1", "n": 30, "nu": 1, "j": 1},
    {"name": "field_nu1_deformed_j2", "n": 30, "nu": 1, "j": 2},
    {"name": "field_nu1_deformed_j28", "n": 30, "nu": 1, "j": 28},
    {"name": "field_nu1_exact_j29", "n": 30, "nu": 1, "j": 29},
    {"name": "field_nu2_exact_j2", "n": 30, "nu": 2, "j": 2},
    {"name": "field_nu2_deformed_j3", "n": 30, "nu": 2, "j": 3},
    {"name": "field_nu2_deformed_j29", "n": 30, "nu": 2, "j": 29},
    {"name": "field_nu2_exact_j30", "n": 30, "nu": 2, "j": 30},
]

# Multimers; "j" is quoted as j_n when r divides it and as j_h otherwise
FIGURE_MULTIMERS: list[dict] = [
    {"name": "dimer_h3", "n": 7, "r": 2, "h": 3, "j": 2},
    {"name": "dimer_h4", "n": 9, "r": 2, "h": 4, "j": 1},
    {"name": "trimer_h3", "n": 11, "r": 3, "h": 3, "j": 3},
    {"name": "tetramer_h5", "n": 23, "r": 4, "h": 5, "j": 8},
]

# Resonance overlaps |u_ν·a⁽ʲ⁾| for even and odd chains
FIGURE_PROFILES: list[dict] = [
    {"name": "profile_n50_nu2", "n": 50, "nu": 2},
    {"name": "profile_n50_nu1", "n": 50, "nu": 1},
    {"name": "profile_n51_nu2", "n": 51, "nu": 2},
    {"name": "profile_n51_nu1", "n": 51, "nu": 1},
]

# Deformed-wave structure of a long chain
FIGURE_DEFORMED: list[dict] = [
    {"name": "deformed_n100_nu2", "n": 100, "nu": 2, "b1": 1e-3},
    {"name": "deformed_n100_nu1", "n": 100, "nu": 1, "b1": 1e-3},
]
