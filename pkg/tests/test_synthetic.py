import numpy as np
import pytest

from tsagg.preprocess import spectrum
from tsagg.synthetic import PROFILE_KINDS, generate


class TestBasics:
    @pytest.mark.parametrize("kind", PROFILE_KINDS)
    def test_deterministic_per_seed(self, kind):
        a = generate(kind, 17, 500)
        b = generate(kind, 17, 500)
        assert np.array_equal(a.values, b.values)

    @pytest.mark.parametrize("kind", PROFILE_KINDS)
    def test_all_values_finite(self, kind):
        raw = generate(kind, 3, 2000)
        assert np.all(np.isfinite(raw.values))

    def test_different_seeds_differ(self):
        a = generate("wind_like", 0, 400)
        b = generate("wind_like", 1, 400)
        assert not np.array_equal(a.values, b.values)

    def test_solar_never_negative(self):
        assert generate("solar_like", 9, 4000).values.min() >= 0.0

    def test_household_strictly_positive(self):
        assert generate("household_load_like", 9, 4000).values.min() > 0.0

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown profile kind"):
            generate("lunar_like", 0, 100)

    def test_too_short_horizon_rejected(self):
        with pytest.raises(ValueError, match="48"):
            generate("solar_like", 0, 24)


class TestSpectralShape:
    @pytest.mark.parametrize("kind", ["solar_like", "regional_load_like"])
    @pytest.mark.parametrize("seed", [0, 1])
    def test_daily_and_annual_lines_dominate(self, kind, seed):
        raw = generate(kind, seed, 8760)
        spec = spectrum(raw)
        top2 = sorted(spec.dominant_frequencies(kind, 2))
        assert top2[0] == pytest.approx(1.0 / 8760.0, rel=1e-9)
        assert top2[1] == pytest.approx(1.0 / 24.0, rel=1e-9)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_wind_daily_line_not_dominant(self, seed):
        raw = generate("wind_like", seed, 8760)
        spec = spectrum(raw)
        amps = spec.amplitudes[:, 0]
        daily_bin = int(np.argmin(np.abs(spec.frequencies_per_hour - 1.0 / 24.0)))
        assert int(np.argmax(amps)) != daily_bin
