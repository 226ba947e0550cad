import numpy as np
import pytest

from simbeam.exceptions import ConfigurationError
from simbeam.models import SimConfig, SweepSpec, load_config


def test_empty_config_takes_reference_values():
    config = SimConfig.parse({})

    assert config.system.carrier_freq == 28e9
    assert (config.system.M, config.system.K, config.system.P_T) == (4, 4, 10.0)
    assert (config.geometry.N_x, config.geometry.N_y, config.geometry.L) == (7, 7, 7)
    assert config.geometry.H_BS == 10.0
    assert config.geometry.T_SIM == 5.0
    assert config.geometry.d_UE == 10.0
    assert config.channel.C0 == -60.0
    assert config.channel.alpha == 3.5
    assert config.channel.noise_power == -104.0
    assert (config.channel.gain_bs, config.channel.gain_ue) == (5.0, 0.0)
    assert config.optimizer.ao_tolerance == 1e-6
    assert config.optimizer.inner_max == config.optimizer.outer_max == 100
    assert config.system.trial_count == 100
    assert config == load_config()


def test_derived_quantities():
    config = SimConfig()
    lam = 299792458.0 / 28e9

    assert config.N == 49
    assert config.wavelength == pytest.approx(lam)
    assert config.d_layer == pytest.approx(5 * lam / 7)
    assert config.meta_atom_size == pytest.approx((lam / 2, lam / 2))
    assert config.transmit_power_mw == pytest.approx(10.0)
    assert config.noise_power_mw == pytest.approx(10 ** -10.4)
    assert config.antenna_gain == pytest.approx(10 ** 0.5)


def test_explicit_meta_atom_size():
    config = SimConfig.parse({'geometry': {'d_x': 0.004, 'd_y': 0.005}})
    assert config.meta_atom_size == (0.004, 0.005)


def test_zero_layers_rejected_with_field_path():
    with pytest.raises(ConfigurationError) as exc:
        SimConfig.parse({'geometry': {'L': 0}})

    assert ('geometry.L', 'must be >= 1') in exc.value.errors
    assert 'geometry.L' in str(exc.value)


@pytest.mark.parametrize('data', [
    {'system': {'M': 3, 'K': 4}},
    {'geometry': {'N_x': 4, 'N_y': 5}},
    {'optimizer': {'damping': 0.0}},
    {'optimizer': {'armijo_shrink': 1.0}},
    {'system': {'carrier_freq': -1.0}},
    {'channel': {'alpha': 0}},
    {'geometry': {'unknown_key': 1}},
    {'sweep': {'values': []}},
    {'sweep': {'values': [1, 1]}},
    {'sweep': {'trials': 0}},
])
def test_invalid_values_rejected(data):
    with pytest.raises(ConfigurationError):
        SimConfig.parse(data)


def test_non_mapping_rejected():
    with pytest.raises(ConfigurationError):
        SimConfig.parse([1, 2])


def test_round_trip(tmp_path):
    config = SimConfig.parse({'system': {'P_T': 20.0, 'base_seed': 7},
                              'geometry': {'L': 3, 'd_x': 0.004},
                              'sweep': {'axis': 'PT', 'values': [0, 10, 20], 'trials': 5}})
    path = config.write(tmp_path / 'config.yml')

    loaded = load_config(path)
    assert loaded == config
    assert load_config(loaded.write(tmp_path / 'again.yml')) == loaded


def test_read_partial_file(tmp_path):
    path = tmp_path / 'config.yml'
    path.write_text("system:\n  K: 2\n  M: 2\ngeometry:\n  L: 4\n")

    config = load_config(path)
    assert (config.K, config.M, config.L) == (2, 2, 4)
    assert config.geometry.N_x == 7


def test_include_sibling_file(tmp_path):
    (tmp_path / 'optimizer.yml').write_text("damping: 0.25\nouter_max: 20\n")
    path = tmp_path / 'config.yml'
    path.write_text("optimizer: !include optimizer.yml\n")

    config = load_config(path)
    assert config.optimizer.damping == 0.25
    assert config.optimizer.outer_max == 20


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match='does not exist'):
        load_config(tmp_path / 'absent.yml')


def test_malformed_yaml(tmp_path):
    path = tmp_path / 'broken.yml'
    path.write_text("system: [1, 2\n")
    with pytest.raises(ConfigurationError, match='malformed'):
        load_config(path)


def test_with_axis():
    config = SimConfig()

    assert config.with_axis('L', 3).L == 3
    users = config.with_axis('K', 6)
    assert (users.K, users.M) == (6, 6)
    assert config.with_axis('PT', 25).system.P_T == 25.0
    atoms = config.with_axis('N', 100)
    assert (atoms.geometry.N_x, atoms.geometry.N_y, atoms.N) == (10, 10, 100)
    # the original is untouched
    assert config.L == 7 and config.N == 49


@pytest.mark.parametrize('axis, value', [('N', 50), ('L', 2.5), ('L', 0)])
def test_with_axis_rejects(axis, value):
    with pytest.raises(ConfigurationError):
        SimConfig().with_axis(axis, value)


def test_sweep_defaults_and_scheme_order():
    sweep = SweepSpec(schemes=['codebook', 'ao', 'ao'])
    assert sweep.schemes == ['ao', 'codebook']
    assert np.array_equal(SweepSpec().values, np.arange(1, 11))


def test_extended_model_helpers():
    config = SimConfig()
    assert config['geometry'].L == 7
    assert config.geometry.get('d_x', 1.0) == 1.0
    assert config.setdefault('sweep', SweepSpec(axis='K')).axis == 'K'
    assert config.sweep.axis == 'K'
