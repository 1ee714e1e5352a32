"""One small valid configuration per CLI command."""

MIN = {"name": "min", "params": {"b": 1}}

CONFIGS = {
    "gram": {
        "kernel": {"name": "gaussian", "params": {"sigma": 0.5}},
        "measure": {"atoms": [0.0, 0.5, 1.0], "weights": [0.2, 0.3, 0.5]},
    },
    "spectrum": {"kernel": MIN, "measure": {"kind": "grid", "a": 0, "b": 1, "m": 1024}, "tunables": {"top_n": 10}},
    "diagnose": {
        "kernel": MIN,
        "measure": {"kind": "grid", "a": 0, "b": 1, "m": 64},
        "tunables": {"levels": [64, 128, 256], "top_n": 5},
    },
    "seq-example": {"pair": {"name": "paper_example"}, "tunables": {"horizon": 2000}},
    "ivar-verdict": {
        "kernel": {"name": "diagonal_sequence", "params": {"nu": "1"}},
        "measure": {"atoms": [1, 2], "weights": [0.5, 0.5]},
        "weights": {"product": {"rule": "inverse_square"}},
        "tunables": {"top_n": 8},
    },
    "ivar-spectrum": {
        "kernel": MIN,
        "measure": {"kind": "grid", "a": 0, "b": 1, "m": 128},
        "weights": {"product": {"rule": "pow2"}},
        "assume_l2_orthogonal": True,
        "tunables": {"top_n": 8, "rank": 4},
    },
    "kgamma": {
        "kernel": MIN,
        "measure": {"kind": "grid", "a": 0, "b": 1, "m": 32},
        "weights": {"product": {"rule": "pow2"}},
        "x": [0.5, 0.5],
        "y": [0.5, 0.5],
        "tunables": {"truncation": 2},
        "membership": {"prefix": [0.5, 0.5]},
    },
}
