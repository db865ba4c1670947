import json

import pytest

import cardbench


def test_schema_version():
    assert cardbench.schema_version() == "1.0"


def test_generate_and_validate():
    cards = cardbench.generate_benchmark(seed=42, variants=1)
    assert len(cards) == 6
    for text in cards:
        card = json.loads(text)
        assert card["schema_version"] == "1.0"
        assert cardbench.validate_card(text) == []


def test_generation_is_deterministic():
    a = cardbench.generate_benchmark(seed=42, variants=1)
    b = cardbench.generate_benchmark(seed=42, variants=1)
    assert a == b


def test_rank_card():
    cards = cardbench.generate_benchmark(seed=42, variants=1)
    pendulum = next(t for t in cards if json.loads(t)["family_id"] == "pendulum_finite")
    result = cardbench.rank_card(pendulum)
    assert result["selected_id"]
    ranks = [c["rank"] for c in result["candidates"]]
    assert ranks == sorted(ranks)
    scores = [c["score"] for c in result["candidates"]]
    assert scores == sorted(scores)
    assert len(result["candidates"][0]["psi"]) == cardbench.graph_feature_length()


def test_obstruction_score_worked_example():
    signature = {
        "r_source": 0.1,
        "r_overlap": 0.1,
        "r_target": 0.2,
        "gluing": 0.1,
        "constraint": 0.0,
        "limit": 0.0,
        "cost": 1.6,
    }
    assert cardbench.obstruction_score(signature) == pytest.approx(1.05, abs=1e-12)
    # The validation residual is diagnostic only and must not move the score.
    signature["r_validation"] = 5.0
    assert cardbench.obstruction_score(signature) == pytest.approx(1.05, abs=1e-12)


def test_benchmark_dir_roundtrip(tmp_path):
    cards = cardbench.generate_benchmark(seed=7, variants=1)
    cardbench.write_benchmark_dir(cards, 7, str(tmp_path / "bench"))
    loaded = cardbench.read_benchmark_dir(str(tmp_path / "bench"))
    assert sorted(loaded) == sorted(cards)


def test_malformed_card_raises_schema_error():
    with pytest.raises(cardbench.SchemaError):
        cardbench.validate_card("{not json")
