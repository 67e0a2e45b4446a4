import pytest

from abtof import CODATA2018, electron_speed_from_energy, experiment_solenoid


@pytest.fixture(scope="session")
def constants():
    return CODATA2018


@pytest.fixture()
def solenoid_1ma():
    """The experiment's solenoid carrying 1 mA."""
    return experiment_solenoid(current=1e-3)


@pytest.fixture(scope="session")
def v40():
    """Electron speed at 40 eV."""
    return electron_speed_from_energy(40.0)
