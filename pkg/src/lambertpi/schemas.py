"""JSON Schemas and CSV headers for the files the CLI writes."""

STEP_RESPONSE_CSV_HEADER = ["t", "y", "u"]
SWEEP_CSV_HEADER = ["gamma", "overshoot_pct", "ts_over_L"]

_number = {"type": "number"}
_nullable_number = {"type": ["number", "null"]}

_plant = {
    "type": "object",
    "required": ["K", "T", "L"],
    "properties": {"K": _number, "T": _number, "L": _number},
}
_gains = {
    "type": "object",
    "required": ["kp", "ki"],
    "properties": {"kp": _number, "ki": _number},
}
_metrics = {
    "type": "object",
    "required": ["overshoot_pct", "settling_time", "settled"],
    "properties": {
        "overshoot_pct": {"type": "number", "minimum": 0},
        "settling_time": _nullable_number,
        "settled": {"type": "boolean"},
        "peak_time": _number,
        "band_pct": _number,
    },
}
_comparison_row = {
    "type": "object",
    "required": ["method", "case", "kp_coef", "ki_coef", "gains", "gamma", "metrics"],
    "properties": {
        "method": {"enum": ["chr", "lambert_w"]},
        "case": {"enum": ["no_overshoot", "overshoot_20"]},
        "kp_coef": _number,
        "ki_coef": _number,
        "gains": _gains,
        "gamma": _number,
        "metrics": _metrics,
    },
}

TUNING_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["plant", "spec", "gamma", "gains", "poles", "metrics", "chr"],
    "properties": {
        "schema_version": {"type": "string"},
        "plant": _plant,
        "spec": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["no_overshoot", "target_overshoot"]},
                "target_pct": _nullable_number,
            },
        },
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "regime": {"enum": ["overdamped", "critically_damped", "underdamped"]},
        "gains": _gains,
        "poles": {
            "type": "array",
            "minItems": 2,
            "maxItems": 2,
            "items": {"type": "object", "required": ["re", "im"], "properties": {"re": _number, "im": _number}},
        },
        "metrics": _metrics,
        "chr": {"oneOf": [{"type": "null"}, _comparison_row]},
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}

COMPARISON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["plant", "rows"],
    "properties": {
        "schema_version": {"type": "string"},
        "plant": _plant,
        "rows": {"type": "array", "minItems": 4, "maxItems": 4, "items": _comparison_row},
    },
}
