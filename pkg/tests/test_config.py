"""Config parsing: defaults, validation paths, round-trip."""

import json

import pytest

from ehsim.actuator import DisplacementConvention
from ehsim.config import (
    config_from_dict,
    config_to_dict,
    default_config,
    load_config,
    save_config,
)
from ehsim.errors import ConfigError


class TestDefaults:
    def test_empty_object_gives_full_defaults(self):
        cfg = config_from_dict({})
        assert cfg == default_config()
        assert cfg.actuator.oil_volume == 2500.0
        assert cfg.calibration.mixing_parameter == pytest.approx(9.828e-5)
        assert cfg.stack.actuator_count == 30
        assert cfg.stack.convention is DisplacementConvention.TOTAL_AS_DELTA_H
        assert cfg.stack.preload_displacement == 0.05
        assert cfg.mechanism.rod_length == 35.0
        assert cfg.controller.kp == 0.75
        assert cfg.controller.ki == 0.035
        assert cfg.waveform.square.frequency == 20.0
        assert cfg.waveform.overlay.amplitude == 2.5
        assert cfg.waveform.breakdown_limit == 7.0
        assert len(cfg.teleop.objects) == 4

    def test_partial_override(self):
        cfg = config_from_dict({"actuator": {"oil_volume": 3000.0}, "seed": 7})
        assert cfg.actuator.oil_volume == 3000.0
        assert cfg.actuator.bladder_width == 12.5
        assert cfg.seed == 7


class TestValidation:
    def test_error_names_offending_field(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"actuator": {"oil_volume": -1}})
        assert err.value.field == "actuator.oil_volume"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"actuator": {"oil_volumee": 2500.0}})
        assert "oil_volumee" in err.value.field

    def test_unknown_top_level_section_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"acutator": {}})

    def test_wrong_type_rejected(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"controller": {"kp": "strong"}})
        assert err.value.field == "controller.kp"

    def test_cross_field_invariant_wrapped(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"mechanism": {"rod_length": 10.0, "vertical_offset": 12.0}})
        assert err.value.field.startswith("mechanism")

    def test_enum_choice_checked(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"actuator": {"stack_convention": "sideways"}})
        assert err.value.field == "actuator.stack_convention"

    def test_overlay_null_disables(self):
        cfg = config_from_dict({"waveform": {"overlay": None}})
        assert cfg.waveform.overlay is None

    def test_duplicate_object_labels_rejected(self):
        objs = [{"label": "a", "linear_stiffness": 0.1},
                {"label": "a", "linear_stiffness": 0.2}]
        with pytest.raises(ConfigError):
            config_from_dict({"teleop": {"objects": objs}})

    def test_unknown_demo_object_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"experiments": {"teleop_demo": {"object": "granite"}}})

    def test_parse_error_carries_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"seed": 1,,}')
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert "line 1" in str(err.value)


class TestRoundTrip:
    def test_dict_round_trip(self):
        cfg = config_from_dict({
            "seed": 99,
            "actuator": {"stack_convention": "per_actuator", "preload": 0.1},
            "waveform": {"square": {"amplitude": 4.0}},
            "experiments": {"track": {"shape": "triangle", "amplitude": 0.3}},
        })
        assert config_from_dict(config_to_dict(cfg)) == cfg

    def test_file_round_trip(self, tmp_path):
        cfg = default_config()
        path = save_config(cfg, tmp_path / "cfg.json")
        assert load_config(path) == cfg
        # file is plain JSON
        json.loads(path.read_text())

    def test_default_round_trip(self):
        cfg = default_config()
        assert config_from_dict(config_to_dict(cfg)) == cfg

    def test_overlay_none_round_trip(self):
        cfg = config_from_dict({"waveform": {"overlay": None}})
        again = config_from_dict(config_to_dict(cfg))
        assert again == cfg
        assert again.waveform.overlay is None

    def test_infinite_slew_round_trip(self, tmp_path):
        # json encodes float('inf') as the Infinity literal, which the
        # parser accepts back; ideal square edges stay configurable
        cfg = config_from_dict({"waveform": {"square": {"slew_rate": float("inf")}}})
        assert cfg.waveform.square.slew_rate == float("inf")
        path = save_config(cfg, tmp_path / "inf.json")
        assert load_config(path) == cfg
