import json

import numpy as np
import pytest

from blochsteer.config import (SEED_ENV_VAR, ConfigError, apply_overrides,
                               load_config, parse_config, solver_model)

PLANAR_DOC = {"a": [-3.0, -4.0], "b": [1.0, 2.0]}
SPATIAL_DOC = {
    "A": [[4.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 6.0]],
    "b": [1.0, 2.0, 3.0],
}


def sigma_minus_doc():
    # |0><1| as [re, im] pairs
    op = [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
    return {"lindblad_ops": [op]}


class TestModelForms:
    def test_planar_shorthand(self):
        config = parse_config(PLANAR_DOC)
        assert config.dimension == 2
        assert np.allclose(config.model.b, [1.0, 2.0, 0.0])
        assert np.allclose(np.diag(config.model.B), [-3.0, -4.0, 0.0])

    def test_attenuation_form(self):
        config = parse_config(SPATIAL_DOC)
        assert config.dimension == 3
        assert np.allclose(config.model.A, SPATIAL_DOC["A"])

    def test_lindblad_form(self):
        config = parse_config(sigma_minus_doc())
        assert config.lindblad_ops is not None
        assert np.allclose(config.model.B, np.diag([-0.5, -0.5, -1.0]))

    def test_missing_model(self):
        with pytest.raises(ConfigError):
            parse_config({"objective": "time"})

    def test_multiple_forms_rejected(self):
        doc = dict(PLANAR_DOC)
        doc["A"] = SPATIAL_DOC["A"]
        with pytest.raises(ConfigError):
            parse_config(doc)

    def test_attenuation_without_drift(self):
        with pytest.raises(ConfigError):
            parse_config({"A": SPATIAL_DOC["A"]})


class TestFieldValidation:
    def test_unknown_field(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_config({**PLANAR_DOC, "objektive": "time"})

    def test_bad_objective(self):
        with pytest.raises(ConfigError, match="objective"):
            parse_config({**PLANAR_DOC, "objective": "fuel"})

    def test_bad_types(self):
        for key, value in (("order", 1.5), ("seed", "zero"),
                           ("epsilon", "tiny"), ("grid_panels", True)):
            with pytest.raises(ConfigError):
                parse_config({**PLANAR_DOC, key: value})

    def test_bounds(self):
        for key, value in (("epsilon", 0.0), ("delta", -1.0),
                           ("grid_panels", 1), ("multistart", 0),
                           ("order", 0), ("zeroed_control", 4)):
            with pytest.raises(ConfigError):
                parse_config({**PLANAR_DOC, key: value})

    def test_dimension_contradiction(self):
        with pytest.raises(ConfigError, match="dimension"):
            parse_config({**PLANAR_DOC, "dimension": 3})

    def test_defaults(self):
        config = parse_config(PLANAR_DOC)
        assert config.objective == "time"
        assert config.epsilon == 1e-3 and config.delta == 1e-3
        assert config.grid_panels == 1000
        assert config.resolved_multistart() == 25
        assert parse_config(SPATIAL_DOC).resolved_multistart() == 50


class TestSeedResolution:
    def test_env_default(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "42")
        assert parse_config(PLANAR_DOC).seed == 42

    def test_document_beats_env(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "42")
        assert parse_config({**PLANAR_DOC, "seed": 7}).seed == 7

    def test_bad_env_value(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "many")
        with pytest.raises(ConfigError):
            parse_config(PLANAR_DOC)

    def test_override_beats_document(self):
        config = parse_config({**PLANAR_DOC, "seed": 7})
        assert apply_overrides(config, seed=9).seed == 9
        assert apply_overrides(config, seed=None).seed == 7


class TestLoading:
    def test_json(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps({**PLANAR_DOC, "order": 3}))
        assert load_config(path).order == 3

    def test_yaml(self, tmp_path):
        path = tmp_path / "model.yaml"
        path.write_text("a: [-3, -4]\nb: [1, 2]\nobjective: energy\n")
        assert load_config(path).objective == "energy"

    def test_unparseable(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)


class TestSolverModel:
    def test_diagonal_passthrough(self):
        config = parse_config(PLANAR_DOC)
        model, rotation = solver_model(config)
        assert model is config.model
        assert rotation is None

    def test_rotation_for_coupled_drift(self):
        doc = {
            "A": [[4.0, 0.5, 0.0], [0.5, 5.0, 0.0], [0.0, 0.0, 6.0]],
            "b": [1.0, 2.0, 3.0],
        }
        config = parse_config(doc)
        model, rotation = solver_model(config)
        model.diagonal_rates()  # must not raise
        assert np.allclose(rotation @ rotation.T, np.eye(3), atol=1e-12)

    def test_resolved_document_roundtrips(self):
        config = parse_config({**PLANAR_DOC, "seed": 5})
        doc = config.to_document()
        assert doc["seed"] == 5
        assert doc["model"]["b"] == [1.0, 2.0, 0.0]
