import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsample.ising import (
    IsingModel,
    decode_sk,
    degeneracy_census,
    encode_sk,
    energy,
    load_model,
    sk_code_bits,
    sk_degeneracy_table,
    spectrum,
)
from oracles import loop_energies, random_integer_model

CENSUS_N5 = {1: 24192, 2: 7200, 3: 480, 4: 480, 6: 384, 10: 32}


def two_spin_ferromagnet() -> IsingModel:
    return IsingModel(n=2, h=(0, 0), j=((0, 1, -1),))


class TestEnergy:
    def test_ferromagnet_aligned(self):
        assert energy(two_spin_ferromagnet(), 0b00) == -1

    def test_ferromagnet_antialigned(self):
        assert energy(two_spin_ferromagnet(), 0b01) == 1

    def test_single_field(self):
        m = IsingModel(n=1, h=(1,), j=())
        assert energy(m, 0) == 1
        assert energy(m, 1) == -1

    def test_out_of_range_config(self):
        with pytest.raises(ValueError):
            energy(two_spin_ferromagnet(), 4)
        with pytest.raises(ValueError):
            energy(two_spin_ferromagnet(), -1)

    def test_returns_exact_int(self):
        assert isinstance(energy(two_spin_ferromagnet(), 2), int)

    @given(st.integers(0, 7), st.data())
    def test_spin_flip_covariance_without_fields(self, config, data):
        # With h = 0, complementing all bits flips every spin, leaving
        # pair products unchanged.
        vals = data.draw(st.lists(st.integers(-5, 5), min_size=3, max_size=3))
        m = IsingModel(n=3, h=(0, 0, 0), j=((0, 1, vals[0]), (0, 2, vals[1]), (1, 2, vals[2])))
        assert energy(m, config) == energy(m, config ^ 0b111)


class TestSpectrum:
    def test_two_spin_ferromagnet(self):
        spec = spectrum(two_spin_ferromagnet())
        assert spec.c_min == -1
        assert spec.c_max == 1
        assert spec.ground_states.tolist() == [0b00, 0b11]
        assert spec.degeneracy == 2

    def test_matches_per_config_loop(self):
        rng = np.random.default_rng(7)
        for n in (2, 3, 4):
            for _ in range(5):
                m = random_integer_model(rng, n)
                spec = spectrum(m)
                expected = loop_energies(m)
                assert spec.energies.tolist() == expected
                assert spec.c_min == min(expected)
                assert spec.c_max == max(expected)
                argmin = [z for z, e in enumerate(expected) if e == min(expected)]
                assert spec.ground_states.tolist() == argmin

    def test_energies_stay_integer(self):
        spec = spectrum(two_spin_ferromagnet())
        assert spec.energies.dtype == np.int64

    def test_resource_limit(self):
        m = decode_sk(0, n=5)
        with pytest.raises(ValueError, match="exceeds"):
            spectrum(m, max_n=4)

    def test_sk_degeneracy_classes(self):
        rng = np.random.default_rng(3)
        for code in rng.integers(0, 1 << 15, size=25):
            assert spectrum(decode_sk(int(code))).degeneracy in CENSUS_N5


class TestSkCodec:
    def test_code_zero_all_minus(self):
        m = decode_sk(0)
        assert m.h == (-1,) * 5
        assert all(v == -1 for _, _, v in m.j)

    def test_code_max_all_plus(self):
        m = decode_sk((1 << 15) - 1)
        assert m.h == (1,) * 5
        assert all(v == 1 for _, _, v in m.j)

    def test_round_trip_random_codes(self):
        rng = np.random.default_rng(11)
        for code in rng.integers(0, 1 << 15, size=100):
            assert encode_sk(decode_sk(int(code))) == int(code)

    @given(st.integers(0, (1 << 15) - 1))
    def test_round_trip_property(self, code):
        assert encode_sk(decode_sk(code)) == code

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            decode_sk(1 << 15)
        with pytest.raises(ValueError):
            decode_sk(-1)

    def test_encode_rejects_non_sk(self):
        with pytest.raises(ValueError):
            encode_sk(IsingModel(n=2, h=(1, 1), j=()))
        with pytest.raises(ValueError):
            encode_sk(IsingModel(n=2, h=(2, 1), j=((0, 1, 1),)))


class TestCensus:
    def test_census_counts(self):
        assert degeneracy_census(5) == CENSUS_N5

    def test_census_partitions_ensemble(self):
        assert sum(degeneracy_census(5).values()) == 1 << sk_code_bits(5)

    def test_table_matches_spectrum(self):
        table = sk_degeneracy_table(5)
        assert table[0] == spectrum(decode_sk(0)).degeneracy
        rng = np.random.default_rng(5)
        for code in rng.integers(0, 1 << 15, size=20):
            assert table[code] == spectrum(decode_sk(int(code))).degeneracy

    def test_resource_limit(self):
        with pytest.raises(ValueError, match="exceeds"):
            sk_degeneracy_table(7)


class TestModelIO:
    def test_dict_round_trip(self):
        m = IsingModel(n=3, h=(1, -2, 0), j=((0, 2, 3), (1, 2, -1)))
        assert IsingModel.from_dict(m.to_dict()) == m

    def test_load_model(self, tmp_path):
        m = decode_sk(4242)
        path = tmp_path / "model.json"
        path.write_text(json.dumps(m.to_dict()))
        assert load_model(str(path)) == m

    def test_load_model_malformed(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="invalid JSON"):
            load_model(str(path))
        path.write_text(json.dumps({"n": 2, "h": [0, 0]}))
        with pytest.raises(ValueError, match="malformed"):
            load_model(str(path))

    def test_validation(self):
        with pytest.raises(ValueError):
            IsingModel(n=2, h=(0,), j=())
        with pytest.raises(ValueError):
            IsingModel(n=2, h=(0, 0), j=((1, 1, 1),))
        with pytest.raises(ValueError):
            IsingModel(n=3, h=(0, 0, 0), j=((0, 1, 1), (0, 1, 2)))

    def test_digest_is_stable(self):
        m = decode_sk(99)
        assert m.digest() == decode_sk(99).digest()
        assert m.digest() != decode_sk(100).digest()


@settings(max_examples=30)
@given(st.integers(2, 4), st.integers(0, 2**10))
def test_spectrum_argmin_is_exact(n, seed):
    rng = np.random.default_rng(seed)
    m = random_integer_model(rng, n)
    spec = spectrum(m)
    assert spec.c_min <= spec.c_max
    assert spec.degeneracy >= 1
    assert all(int(spec.energies[z]) == spec.c_min for z in spec.ground_states)
