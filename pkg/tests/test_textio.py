import numpy as np
import pytest

from conftest import DATA
from wickfock.errors import ConfigurationError, ModelError
from wickfock.models import OscillatorModel, TimeGrid, finite_difference, oscillator_two_point
from wickfock.quasifree import one_particle_space
from wickfock.textio import (format_two_point, load_smearing, load_two_point, parse_smearing, parse_two_point,
                             save_two_point)


def test_two_point_round_trip(tmp_path):
    tp = oscillator_two_point(OscillatorModel(1.1, TimeGrid(5, 0.3)))
    path = tmp_path / "w.txt"
    save_two_point(tp, path)
    back = load_two_point(path)
    assert np.array_equal(back.W, tp.W)
    assert format_two_point(back).splitlines()[1] == "5"


def test_two_point_errors():
    with pytest.raises(ConfigurationError):
        parse_two_point("")
    with pytest.raises(ConfigurationError):
        parse_two_point("2\n1 0 0 0\n")
    with pytest.raises(ConfigurationError):
        parse_two_point("2\n1 0 0\n0 0 1 0\n")
    with pytest.raises(ConfigurationError):
        parse_two_point("x\n")
    with pytest.raises(ConfigurationError):
        load_two_point(DATA / "missing.txt")


def test_non_positive_file_is_rejected():
    tp = load_two_point(DATA / "not-positive.txt")
    with pytest.raises(ModelError, match="eigenvalue -5"):
        one_particle_space(tp)


def test_smearing_file():
    g = TimeGrid(6, 0.5)
    spec = load_smearing(DATA / "file-smearing.txt", g)
    assert spec.class_S and len(spec.terms) == 2
    np.testing.assert_allclose(spec.terms[1].Q, finite_difference(1, g) * 0.5)
    np.testing.assert_allclose(spec.terms[0].f, [1, 0.25, 0, 0, 0, 0.25])


def test_smearing_parse_errors():
    g = TimeGrid(3)
    with pytest.raises(ConfigurationError):
        parse_smearing("stencil identity\n", g)
    with pytest.raises(ConfigurationError):
        parse_smearing("term\ng 1 1 1\n", g)
    with pytest.raises(ConfigurationError):
        parse_smearing("term\nstencil identity\ng 1 1\n", g)
    with pytest.raises(ConfigurationError):
        parse_smearing("term\nstencil 0:x\ng 1 1 1\n", g)
    with pytest.raises(ConfigurationError):
        parse_smearing("term\nstencil identity\ng 1 1 1\nf 1 1 1\n", g)
    with pytest.raises(ConfigurationError):
        parse_smearing("term\nstencil identity\nbogus 1\n", g)
    spec = parse_smearing("term\nstencil identity\nf 1 2 3\n", g)
    assert not spec.class_S
