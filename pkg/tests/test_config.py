"""Config text parsing, serialization round trips, and error reporting."""

import numpy as np
import pytest

from tilthover import ConfigError, load_platform, load_preset, preset_names, serialize, to_platform
from tilthover.config import platform_dict


class TestRoundTrip:
    def test_all_presets_survive_serialize_load(self, presets):
        for name, platform in presets.items():
            again = load_platform(serialize(platform))
            assert again == platform, name

    def test_plain_dict_is_loadable(self, presets):
        import yaml

        d = platform_dict(presets["dualtilt-trirotor"])
        assert load_platform(yaml.safe_dump(d)) == presets["dualtilt-trirotor"]

    def test_to_platform_passthrough_and_parse(self, presets):
        p = presets["quadrotor"]
        assert to_platform(p) is p
        assert to_platform(serialize(p)) == p


class TestParsing:
    def test_minimal_fixed_platform(self):
        p = load_platform(
            """
            mass: 1.5
            propellers:
              - position: [0.2, 0.0, 0.0]
                tilt: fixed
                direction: [0, 0, 1]
                u_max: 10
            """
        )
        assert p.mass == 1.5
        assert p.gravity == 9.81
        assert len(p.propellers) == 1

    def test_degree_suffix_converts(self):
        text = """
        mass: 1.0
        propellers:
          - position: [0.2, 0.0, 0.0]
            tilt: radial
            alpha_range_deg: [-90, 90]
            u_max: 10
        """
        p = load_platform(text)
        lo, hi = p.propellers[0].capability.alpha_range
        assert lo == pytest.approx(-np.pi / 2)
        assert hi == pytest.approx(np.pi / 2)

    def test_gamma_deg_checked_against_arm_angle(self):
        template = """
        mass: 1.0
        propellers:
          - position: [{x}, {y}, 0.0]
            tilt: fixed
            direction: [0, 0, 1]
            gamma_deg: 30
            u_max: 10
        """
        x = 0.2 * np.cos(np.radians(30))
        y = 0.2 * np.sin(np.radians(30))
        p = load_platform(template.format(x=x, y=y))
        assert p.propellers[0].gamma == pytest.approx(np.radians(30))
        with pytest.raises(ConfigError, match="gamma"):
            load_platform(template.format(x=0.2, y=0.0))

    def test_inertia_row_major_and_nested_agree(self):
        base = """
        mass: 2.0
        inertia: {spec}
        propellers:
          - {{position: [0.2, 0.0, 0.0], tilt: fixed, direction: [0, 0, 1], u_max: 5}}
        """
        nested = load_platform(base.format(spec="[[0.02, 0, 0], [0, 0.03, 0], [0, 0, 0.04]]"))
        flat = load_platform(base.format(spec="[0.02, 0, 0, 0, 0.03, 0, 0, 0, 0.04]"))
        np.testing.assert_allclose(nested.inertia_matrix, flat.inertia_matrix)
        np.testing.assert_allclose(np.diag(nested.inertia_matrix), [0.02, 0.03, 0.04])


class TestErrors:
    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("[1, 2, 3]", "root must be a mapping"),
            ("mass: 1.0", "config.propellers"),
            ("propellers: []\nmass: 1.0", "config.propellers"),
            ("mass: 1.0\nbogus: 3\npropellers: [{}]", "bogus"),
            (
                "mass: oops\npropellers:\n- {position: [0.2, 0, 0], tilt: fixed, direction: [0, 0, 1], u_max: 5}",
                "config.mass",
            ),
            (
                "mass: 1.0\npropellers:\n- {position: [0.2, 0, 0], tilt: warp, u_max: 5}",
                "tilt",
            ),
            (
                "mass: 1.0\npropellers:\n- {position: [0.2, 0, 0], tilt: fixed, direction: [0, 0, 1], u_max: 5, tilt_speed: 9}",
                "tilt_speed",
            ),
            (
                "mass: 1.0\npropellers:\n- {position: [0.2, 0], tilt: fixed, direction: [0, 0, 1], u_max: 5}",
                "position",
            ),
            (
                "mass: 1.0\npropellers:\n- {position: [0.2, 0, 0], tilt: radial, alpha_range: [2, -2], u_max: 5}",
                "finite interval",
            ),
            ("mass: [unclosed", "parse error"),
        ],
    )
    def test_bad_documents_raise_config_error(self, text, fragment):
        with pytest.raises(ConfigError, match=fragment):
            load_platform(text)

    def test_config_error_is_value_error(self):
        assert issubclass(ConfigError, ValueError)

    def test_validation_failures_are_wrapped(self):
        # negative mass passes parsing, fails Platform validation
        text = """
        mass: -1.0
        propellers:
          - {position: [0.2, 0, 0], tilt: fixed, direction: [0, 0, 1], u_max: 5}
        """
        with pytest.raises(ConfigError, match="mass"):
            load_platform(text)


class TestPresets:
    def test_names_are_stable(self):
        assert preset_names() == [
            "quadrotor",
            "birotor-dualtilt",
            "trirotor-tail",
            "trirotor-radial",
            "dualtilt-trirotor",
            "dualtilt-trirotor-failed3",
        ]

    def test_unknown_preset(self):
        with pytest.raises(KeyError, match="unknown preset"):
            load_preset("octocopter")

    def test_presets_are_fresh_objects(self):
        a = load_preset("quadrotor")
        b = load_preset("quadrotor")
        assert a == b
