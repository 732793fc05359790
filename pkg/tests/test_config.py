import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from sqglab.config import (
    ENV_VAR,
    ConfigError,
    Experiment,
    ExperimentConfig,
    dump_config,
    load_config,
    save_config,
)


class TestDefaults:
    def test_default_config_is_valid(self):
        cfg = ExperimentConfig()
        assert cfg.experiment is Experiment.SIMULATE
        assert cfg.gevrey_params().zeta == pytest.approx(0.5)
        assert cfg.grid_spec().n == 128

    def test_snapshot_times_include_decay_times(self):
        cfg = ExperimentConfig.from_dict({"solver": {"snapshot_times": [0.25]}, "decay": {"times": [0.5]}})
        assert cfg.snapshot_times() == (0.25, 0.5)
        assert cfg.solver_config().snapshot_times == (0.25, 0.5)


class TestValidation:
    def test_supercritical_kappa(self):
        with pytest.raises(ConfigError) as exc:
            ExperimentConfig.from_dict({"gevrey": {"kappa": 1.5}})
        assert exc.value.field_name == "gevrey.kappa"
        assert str(exc.value).startswith("gevrey.kappa:")

    @pytest.mark.parametrize(
        "data, name",
        [
            ({"bogus": 1}, "bogus"),
            ({"grid": {"m": 3}}, "grid.m"),
            ({"seed": -1}, "seed"),
            ({"seed": 2**64}, "seed"),
            ({"experiment": "run"}, "experiment"),
            ({"grid": {"n": 33}}, "grid"),
            ({"solver": {"scheme": "RK2"}}, "solver"),
            ({"picard": {"advection": "x"}}, "picard.advection"),
            ({"verify": {"families": ["Nope"]}}, "verify.families"),
            ({"verify": {"axis": "t", "values": [1]}}, "verify.axis"),
            ({"verify": {"axis": "s"}}, "verify.values"),
            ({"decay": {"n_max": 13}}, "decay.n_max"),
            ({"decay": {"times": [2.0]}}, "decay.times"),
        ],
    )
    def test_errors_name_field(self, data, name):
        with pytest.raises(ConfigError) as exc:
            ExperimentConfig.from_dict(data)
        assert exc.value.field_name == name

    def test_non_mapping(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict([1, 2])


_configs = st.builds(
    lambda seed, n, dt, lam, fam, trials, times: ExperimentConfig.from_dict(
        {
            "seed": seed,
            "grid": {"n": n},
            "solver": {"dt": dt, "snapshot_times": times},
            "gevrey": {"lam": lam},
            "verify": {"families": [fam], "n_trials": trials, "params": {fam: {"s": 0.5}}},
        }
    ),
    st.integers(0, 2**64 - 1),
    st.sampled_from([16, 32, 64]),
    st.floats(1e-4, 0.5),
    st.floats(0.01, 10.0),
    st.sampled_from(["Commutator", "Convexity", "TitiInterp"]),
    st.integers(1, 100),
    st.one_of(st.none(), st.lists(st.floats(0.01, 1.0), min_size=1, max_size=4, unique=True).map(sorted)),
)


class TestRoundTrip:
    @given(_configs)
    def test_dict_round_trip(self, cfg):
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    @given(_configs)
    def test_yaml_round_trip(self, cfg):
        assert ExperimentConfig.from_dict(yaml.safe_load(dump_config(cfg))) == cfg

    def test_file_and_env(self, tmp_path, monkeypatch):
        cfg = ExperimentConfig.from_dict({"seed": 9, "experiment": "picard"})
        p = tmp_path / "c.yaml"
        save_config(cfg, p)
        assert load_config(p) == cfg
        monkeypatch.setenv(ENV_VAR, str(p))
        assert load_config() == cfg

    def test_missing_sources(self, tmp_path, monkeypatch):
        monkeypatch.delenv(ENV_VAR, raising=False)
        with pytest.raises(ConfigError):
            load_config()
        with pytest.raises(ConfigError):
            load_config(tmp_path / "none.yaml")
        bad = tmp_path / "bad.yaml"
        bad.write_text("a: [1,\n")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_overrides_and_hash_record(self):
        cfg = ExperimentConfig()
        new = cfg.with_overrides(seed=5, output_dir="elsewhere")
        assert new.seed == 5 and new.output_dir == "elsewhere"
        assert cfg.with_overrides() is cfg
        assert "output_dir" not in new.hash_record()
        assert cfg.with_overrides(output_dir="x").hash_record() == cfg.hash_record()
