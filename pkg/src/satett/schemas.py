"""JSON schemas for the CLI config files and the CSV sidecar mapping.

The published copies live under docs/schemas/; these dicts are the
source of truth the CLI validates against, and a test keeps the two in
sync.
"""

METHOD_ENUM = [
    "naive", "cov-adj", "dr-glm", "dr-ranger", "covbal", "riesz", "cdml",
    "dr-bart", "dr-bayglm",
]

DATA_SIDECAR_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "$id": "satett/data-sidecar",
    "title": "Column-name mapping for a two-source trial CSV",
    "type": "object",
    "properties": {
        "outcome": {"type": "string"},
        "treatment": {"type": "string"},
        "source": {"type": "string"},
        "subgroup": {"type": "string"},
        "covariates": {
            "type": "array",
            "items": {"type": "string"},
            "minItems": 1,
        },
    },
    "required": ["outcome", "treatment", "source", "subgroup", "covariates"],
    "additionalProperties": False,
}

SIMULATE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "$id": "satett/simulate-config",
    "title": "Configuration for `satett simulate`",
    "type": "object",
    "properties": {
        "scenario": {"type": "integer", "enum": [1, 2, 3]},
        "methods": {
            "type": "array",
            "items": {"type": "string", "enum": METHOD_ENUM},
            "minItems": 1,
        },
        "reps": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "n_ext": {"type": "integer", "minimum": 1},
        "n_ext_grid": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 1,
        },
        "misspec_grid": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {
                    "type": "string",
                    "enum": ["data_treatment", "outcome"],
                },
            },
            "minItems": 1,
        },
        "options": {
            "type": "object",
            "properties": {
                "lambda": {"type": "number", "exclusiveMinimum": 0},
                "ridge": {"type": "number", "minimum": 0},
                "bootstrap_b": {"type": "integer", "minimum": 2},
            },
            "additionalProperties": False,
        },
        "out_dir": {"type": "string"},
    },
    "required": ["scenario", "methods"],
    "additionalProperties": False,
}

ANALYZE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "$id": "satett/analyze-config",
    "title": "Configuration for `satett analyze`",
    "type": "object",
    "properties": {
        "data": {"type": "string"},
        "schema": {
            "oneOf": [{"type": "string"}, DATA_SIDECAR_SCHEMA],
        },
        "methods": {
            "type": "array",
            "items": {"type": "string", "enum": METHOD_ENUM},
            "minItems": 1,
        },
        "subgroups": {
            "type": "array",
            "items": {"type": "integer"},
            "minItems": 1,
        },
        "seed": {"type": "integer", "minimum": 0},
        "options": {
            "type": "object",
            "properties": {
                "lambda": {"type": "number", "exclusiveMinimum": 0},
                "ridge": {"type": "number", "minimum": 0},
                "bootstrap_b": {"type": "integer", "minimum": 2},
            },
            "additionalProperties": False,
        },
        "out": {"type": "string"},
    },
    "required": ["data", "schema", "methods"],
    "additionalProperties": False,
}

ALL_SCHEMAS = {
    "data_sidecar": DATA_SIDECAR_SCHEMA,
    "simulate_config": SIMULATE_SCHEMA,
    "analyze_config": ANALYZE_SCHEMA,
}
