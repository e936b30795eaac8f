"""Published JSON schemas for CLI reports and simulation summaries."""

_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "shape": {"enum": ["rectangular", "gaussian", "spherical"]},
        "scale": {"type": "number", "exclusiveMinimum": 0},
        "width": {"type": "integer", "minimum": 1},
        "radius": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "workers": {"type": "integer", "minimum": 1},
        "collect_radii": {"type": "boolean"},
        "radii_cap": {"type": "integer", "minimum": 1},
    },
    "required": [
        "shape", "scale", "width", "radius", "trials",
        "seed", "workers", "collect_radii", "radii_cap",
    ],
    "additionalProperties": False,
}

SUMMARY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "kinkscope simulation summary",
    "type": "object",
    "properties": {
        "schema_version": {"const": "1"},
        "config": _CONFIG_SCHEMA,
        "count_histogram": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "trials": {"type": "integer", "minimum": 0},
        "empirical_mean": {"type": "number"},
        "empirical_variance": {"type": "number", "minimum": 0},
        "radii_sample": {"type": "array", "items": {"type": "number", "minimum": 0}},
    },
    "required": [
        "schema_version", "config", "count_histogram", "trials",
        "empirical_mean", "empirical_variance", "radii_sample",
    ],
    "additionalProperties": False,
}

CLI_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "kinkscope CLI report",
    "type": "object",
    "properties": {
        "schema_version": {"const": "1"},
        "command": {"enum": ["predict", "simulate", "compare", "sweep"]},
        "inputs": {"type": "object"},
        "outputs": {"type": "object"},
        "timing_ms": {"type": "integer", "minimum": 0},
    },
    "required": ["schema_version", "command", "inputs", "outputs", "timing_ms"],
    "additionalProperties": False,
}
