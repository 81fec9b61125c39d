"""JSON Schemas for the file formats the CLI reads and writes."""

_PROBABILITY_ROW = {"type": "array", "items": {"type": "number"}, "minItems": 2}

VARIABLE_SCHEMA = {
    "type": "object",
    "required": ["name", "states"],
    "properties": {
        "name": {"type": "string"},
        "states": {"type": "array", "items": {"type": "string"}, "minItems": 2},
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["variables", "arcs"],
    "properties": {
        "variables": {"type": "array", "items": VARIABLE_SCHEMA},
        "arcs": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "string"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
        "cpts": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": _PROBABILITY_ROW,
            },
        },
        "score": {
            "type": "object",
            "required": ["total_log_marginal", "families"],
            "properties": {
                "total_log_marginal": {"type": "number"},
                "families": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["child", "parents", "log_g", "exact"],
                        "properties": {
                            "child": {"type": "string"},
                            "parents": {
                                "type": "array",
                                "items": {"type": "string"},
                            },
                            "log_g": {"type": "number"},
                            "exact": {"type": "boolean"},
                        },
                    },
                },
            },
        },
    },
}

SCORE_REPORT_SCHEMA = {
    "type": "object",
    "required": ["model", "total_log_marginal", "families"],
    "properties": {
        "model": MODEL_SCHEMA,
        "total_log_marginal": {"type": "number"},
        "families": MODEL_SCHEMA["properties"]["score"]["properties"]["families"],
        "oracle": {
            "type": "object",
            "required": ["policy", "exact_marginal"],
            "properties": {
                "policy": {"type": "string"},
                "exact_marginal": {"type": "number"},
                "log_exact_marginal": {"type": ["number", "null"]},
            },
        },
    },
}

ESTIMATE_REPORT_SCHEMA = {
    "type": "object",
    "required": ["child", "parents", "configurations"],
    "properties": {
        "child": {"type": "string"},
        "parents": {"type": "array", "items": {"type": "string"}},
        "fraction_missing": {"type": "number"},
        "configurations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "config", "obs", "comp", "p_hat", "p_min", "p_max", "alpha_hat",
                ],
                "properties": {
                    "config": {"type": "string"},
                    "obs": {"type": "array", "items": {"type": "integer"}},
                    "comp": {"type": "array", "items": {"type": "integer"}},
                    "p_hat": _PROBABILITY_ROW,
                    "p_min": _PROBABILITY_ROW,
                    "p_max": _PROBABILITY_ROW,
                    "alpha_hat": {"type": "number"},
                    "exact_expectation": _PROBABILITY_ROW,
                },
            },
        },
    },
}

GENERATIVE_SPEC_SCHEMA = {
    "type": "object",
    "required": ["variables", "arcs", "cpts", "n"],
    "properties": {
        "name": {"type": ["string", "null"]},
        "variables": {"type": "array", "items": VARIABLE_SCHEMA},
        "arcs": MODEL_SCHEMA["properties"]["arcs"],
        "cpts": MODEL_SCHEMA["properties"]["cpts"],
        "n": {"type": "integer", "minimum": 0},
        "seed": {"type": ["integer", "null"]},
    },
}

BENCH_REPORT_SCHEMA = {
    "type": "object",
    "required": ["meta", "rows"],
    "properties": {
        "meta": {
            "type": "object",
            "required": ["spec", "n", "order", "seeds", "ladder", "rng"],
        },
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "seed",
                    "pct_available",
                    "arcs",
                    "arc_difference",
                    "minus_log_marginal",
                    "marginals",
                ],
                "properties": {
                    "seed": {"type": "integer"},
                    "pct_available": {"type": "integer"},
                    "arcs": {"type": "array", "items": {"type": "string"}},
                    "arc_difference": {"type": "integer", "minimum": 0},
                    "minus_log_marginal": {"type": "number"},
                    "marginals": {
                        "type": "object",
                        "additionalProperties": _PROBABILITY_ROW,
                    },
                },
            },
        },
    },
}

PHI_FILE_SCHEMA = {
    "type": "object",
    "additionalProperties": _PROBABILITY_ROW,
}
