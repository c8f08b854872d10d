"""Published IBM one-month data set and the matrices estimated from it.

Matrices are transcribed as printed (2-3 decimals); use
:func:`published_model` to get a row-normalized :class:`HmmModel`.
All dictionaries are keyed by the differencing lag k (1..6).
"""

from __future__ import annotations

from .model import DEFAULT_STATES, DEFAULT_SYMBOLS, TRANSCRIPTION_TOLERANCE, HmmModel, model_from_dict, uniform_initial

IBM_CLOSES = (
    77.91, 77.39, 76.5, 75.86, 77.45, 79.33, 79.51, 79.15, 79.95, 78.56,
    79.07, 77.4, 77.28, 77.95, 77.33, 76.7, 77.73, 77.07, 77.9, 75.7,
)  # fmt: skip

# Printed k-day differences and symbols; entry t belongs to close t + k.
PUBLISHED_DIFFS = {
    1: (-0.52, -0.89, -0.64, 1.59, 1.88, 0.18, -0.36, 0.8, -1.39, 0.51,
        -1.67, -0.12, 0.67, -0.62, -0.63, 1.03, -0.66, 0.83, -2.2),
    2: (-1.41, -1.53, 0.95, 3.47, 2.06, -0.18, 0.44, -0.59, -0.88, -1.16,
        -1.79, 0.55, 0.05, -1.25, 0.4, 0.37, 0.17, -1.37),
    3: (-2.05, 0.06, 2.83, 3.65, 1.7, 0.62, -0.95, -0.08, -2.55, -1.28,
        -1.12, -0.07, -0.58, -0.22, -0.26, 1.2, -2.03),
    4: (-0.46, 1.94, 3.01, 3.29, 2.5, -0.77, -0.44, -1.75, -2.67, -0.61,
        -1.74, -0.7, 0.45, -0.88, 0.57, -1.0),
    5: (1.42, 2.12, 2.65, 4.09, 1.11, -0.26, -2.11, -1.87, -2.0, -1.23,
        -2.37, 0.33, -0.21, -0.05, -1.63),
    6: (1.6, 1.76, 3.45, 2.7, 1.62, -1.93, -2.23, -1.2, -2.62, -1.86,
        -1.34, -0.33, 0.62, -2.25),
}  # fmt: skip

PUBLISHED_SYMBOLS = {
    1: "DDDIIIDIDIDDIDDIDID",
    2: "DDIIIDIDDDDIIDIIID",
    3: "DIIIIIDDDDDDDDDID",
    4: "DIIIIDDDDDDDIDID",
    5: "IIIIIDDDDDDIDDD",
    6: "IIIIIDDDDDDDID",
}

PUBLISHED_TRANSITIONS = {
    1: [[0, 0, 1, 0, 0, 0],
        [0, 0, 0.5, 0.5, 0, 0],
        [0, 0.143, 0.143, 0, 0.571, 0.143],
        [0.5, 0, 0.5, 0, 0, 0],
        [0.25, 0.25, 0.5, 0, 0, 0],
        [0, 0, 0, 0.5, 0, 0.5]],
    2: [[0.4, 0, 0.4, 0.2, 0, 0],
        [0.33, 0.33, 0.33, 0, 0, 0],
        [0.33, 0.17, 0.5, 0, 0, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0]],
    3: [[0, 0.5, 0.5, 0, 0, 0],
        [0, 0.25, 0.75, 0, 0, 0],
        [0.2, 0.2, 0.2, 0.2, 0, 0.2],
        [0.5, 0.5, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0.5, 0.5]],
    4: [[0.33, 0.33, 0.33, 0, 0, 0],
        [0, 0, 0.33, 0.67, 0, 0],
        [0.67, 0, 0, 0, 0.33, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0.33, 0, 0, 0, 0.67]],
    5: [[0.5, 0.25, 0.25, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [0.33, 0, 0.67, 0, 0, 0],
        [0, 0.5, 0, 0, 0.5, 0],
        [0, 0, 0, 0, 0.5, 0.5],
        [0, 0, 0, 1, 0, 0]],
    6: [[0.5, 0.5, 0, 0, 0, 0],
        [0.5, 0, 0.5, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [0.33, 0, 0, 0, 0.33, 0.33],
        [0, 0, 0, 0, 0.5, 0.5]],
}  # fmt: skip

PUBLISHED_EMISSIONS = {
    1: [[0, 1], [0.5, 0.5], [0.71, 0.29], [0, 1], [0, 1], [1, 0]],
    2: [[0.6, 0.4], [0.33, 0.67], [0.5, 0.5], [1, 0], [0, 1], [0, 1]],
    3: [[0.5, 0.5], [0, 1], [0.4, 0.6], [0, 1], [1, 0], [1, 0]],
    4: [[0, 1], [0.67, 0.33], [0.33, 0.67], [0, 1], [1, 0], [0.67, 0.33]],
    5: [[0.25, 0.75], [0, 1], [0, 1], [0.5, 0.5], [1, 0], [1, 0]],
    6: [[0, 1], [0, 1], [1, 0], [0, 1], [0.67, 0.33], [1, 0]],
}

# Printed steady-state vectors. The k=4 vector sums to 0.36 and is not a
# probability distribution.
PUBLISHED_STEADY_STATE = {
    1: (0.06, 0.11, 0.39, 0.11, 0.22, 0.11),
    2: (0.29, 0.18, 0.35, 0.06, 0.06, 0.06),
    3: (0.13, 0.25, 0.31, 0.13, 0.06, 0.13),
    4: (0.04, 0.04, 0.04, 0.13, 0.07, 0.04),
    5: (0.29, 0.14, 0.21, 0.14, 0.14, 0.07),
    6: (0.31, 0.15, 0.08, 0.08, 0.23, 0.15),
}

# One optimum state sequence per lag, with its printed symbol track
# (start marker first; symbol p is emitted by state p - 1).
OPTIMUM_SEQUENCES = {
    1: ("S1 S3 S5 S3 S5 S3 S5", "ε D I D I D I"),
    2: ("S1 S3 S1 S1 S3 S1 S1", "ε I D D I D D"),
    3: ("S1 S2 S3 S4 S1 S3 S4", "ε D D I D I I"),
    4: ("S1 S2 S4 S2 S4 S2 S3", "ε D I D I D D"),
    5: ("S1 S2 S1 S1 S1 S2 S1", "ε D D I I D D"),
    6: ("S1 S2 S3 S4 S1 S2 S3", "ε D D I D D D"),
}

PUBLISHED_COMPARE_SUMS = {1: 1.0, 2: 1.29, 3: 1.86, 4: 1.43, 5: 2.14, 6: 2.14}
PUBLISHED_FITNESS = {1: 1.0, 2: 0.76, 3: 0.54, 4: 0.70, 5: 0.47, 6: 0.47}

LAG_LABELS = {k: f"{k}-day" for k in range(1, 7)}


def optimum_state_indices(k: int) -> list[int]:
    """State indices (0-based) of the printed optimum sequence for lag k."""
    return [int(tok[1:]) - 1 for tok in OPTIMUM_SEQUENCES[k][0].split()]


def optimum_symbol_labels(k: int) -> list[str]:
    return OPTIMUM_SEQUENCES[k][1].split()


def published_model_dict(k: int) -> dict:
    return {
        "states": list(DEFAULT_STATES),
        "symbols": list(DEFAULT_SYMBOLS),
        "transition": [list(map(float, r)) for r in PUBLISHED_TRANSITIONS[k]],
        "emission": [list(map(float, r)) for r in PUBLISHED_EMISSIONS[k]],
        "initial": uniform_initial(len(DEFAULT_STATES)).tolist(),
        "meta": {"source": f"published {k}-day matrices", "lag": k},
    }


def published_model(k: int) -> HmmModel:
    """Row-normalized model built from the printed matrices for lag k."""
    return model_from_dict(published_model_dict(k), TRANSCRIPTION_TOLERANCE)


def ibm_csv(headerless: bool = True) -> str:
    if headerless:
        return "".join(f"{c}\n" for c in IBM_CLOSES)
    # Real trading dates are not given; consecutive calendar days stand in.
    import datetime as dt

    start = dt.date(2000, 1, 1)
    rows = [f"{(start + dt.timedelta(days=i)).isoformat()},{c}\n" for i, c in enumerate(IBM_CLOSES)]
    return "date,close\n" + "".join(rows)
