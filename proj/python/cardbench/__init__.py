"""Python interface to the transition-card obstruction benchmark.

Cards travel as canonical JSON strings; the helpers here parse the JSON
results returned by the compiled core into plain dicts.
"""

import json

try:
    from . import _core
except ImportError:  # built outside the package (plain CMake build)
    import _core

SchemaError = _core.SchemaError
ConfigError = _core.ConfigError
PredictionDomainError = _core.PredictionDomainError

schema_version = _core.schema_version
generate_benchmark = _core.generate_benchmark
validate_card = _core.validate_card
graph_feature_length = _core.graph_feature_length
write_benchmark_dir = _core.write_benchmark_dir
read_benchmark_dir = _core.read_benchmark_dir


def _weights_arg(weights):
    if weights is None:
        return ""
    if isinstance(weights, str):
        return weights
    return json.dumps(weights)


def rank_card(card, weights=None):
    """Ranks one card; returns a dict with selected_id, margin, candidates."""
    return json.loads(_core.rank_card(card, _weights_arg(weights)))


def rank_benchmark(cards, weights=None):
    """Ranks a list of cards; returns {"metrics": ..., "results": [...]}."""
    return json.loads(_core.rank_benchmark(list(cards), _weights_arg(weights)))


def obstruction_score(signature, weights=None):
    """Weighted obstruction score of a signature dict."""
    return _core.obstruction_score(json.dumps(signature), _weights_arg(weights))


def kernel_leave_family_out(cards, weights=None):
    """Leave-family-out kernel-probe metrics over ranked signatures."""
    return json.loads(_core.kernel_leave_family_out(list(cards), _weights_arg(weights)))


def stress_eval(cards, seed=0, weights=None, jobs=1):
    """Adversarial expansion metrics and per-card margin reports."""
    return json.loads(_core.stress_eval(list(cards), seed, _weights_arg(weights), jobs))


__all__ = [
    "SchemaError",
    "ConfigError",
    "PredictionDomainError",
    "schema_version",
    "generate_benchmark",
    "validate_card",
    "graph_feature_length",
    "write_benchmark_dir",
    "read_benchmark_dir",
    "rank_card",
    "rank_benchmark",
    "obstruction_score",
    "kernel_leave_family_out",
    "stress_eval",
]
