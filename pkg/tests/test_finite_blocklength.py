# pylint: skip-file
import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from polardp.error import InvalidArgument
from polardp.finite_blocklength import (channel_rate, dispersion, dp_capacity, gp_rate, h2, h2_inv, q_function,
                                        q_inv, rd_rate)
from polardp.model import FbParams


def reference_h2(q):
    getcontext().prec = 50
    q = Decimal(q)
    one = Decimal(1)
    return float(-(q * q.ln() + (one - q) * (one - q).ln()) / Decimal(2).ln())


class TestEntropy:
    def test_endpoints(self):
        assert h2(0.0) == 0.0
        assert h2(1.0) == 0.0
        assert h2(0.5) == pytest.approx(1.0)

    @pytest.mark.parametrize("q", [1e-6, 0.01, 0.11, 0.3, 0.4999])
    def test_against_high_precision(self, q):
        assert h2(q) == pytest.approx(reference_h2(q), abs=1e-12)

    def test_vectorized(self):
        values = h2(np.array([0.0, 0.11, 0.5]))
        assert values.shape == (3,)
        assert values[1] == pytest.approx(h2(0.11))

    def test_inverse(self):
        assert h2_inv(h2(0.21)) == pytest.approx(0.21, abs=1e-10)
        assert h2_inv(0.0) == 0.0
        assert h2_inv(1.0) == 0.5
        with pytest.raises(InvalidArgument):
            h2(1.2)
        with pytest.raises(InvalidArgument):
            h2_inv(-0.1)


class TestGaussianTail:
    def test_known_values(self):
        assert q_inv(0.5) == pytest.approx(0.0, abs=1e-12)
        assert q_inv(0.001) == pytest.approx(3.090232, abs=1e-6)

    @pytest.mark.parametrize("u", [1e-6, 1e-4, 1e-3, 0.01, 0.1, 0.3, 0.5])
    def test_round_trip(self, u):
        assert q_function(q_inv(u)) == pytest.approx(u, abs=1e-9)

    def test_against_erfc(self):
        for x in (-1.0, 0.0, 0.7, 3.0):
            assert q_function(x) == pytest.approx(0.5 * math.erfc(x / math.sqrt(2.0)), rel=1e-12)

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.5])
    def test_domain(self, u):
        with pytest.raises(InvalidArgument):
            q_inv(u)


class TestRates:
    def test_dispersion_vanishes_at_half(self):
        assert dispersion(0.5) == pytest.approx(0.0, abs=1e-15)
        assert dispersion(0.11) > 0

    def test_rd_rate_without_dispersion_term(self):
        assert rd_rate(1024, 0.31, 0.5) == pytest.approx(1.0 - h2(0.31), abs=1e-15)
        assert rd_rate(1024, 0.31, 0.5) == pytest.approx(0.106826, abs=1e-6)

    def test_rd_rate_in_blocklength(self):
        rates = [rd_rate(N, 0.3, 0.01) for N in (256, 1024, 4096)]
        assert rates == sorted(rates, reverse=True)
        rates = [rd_rate(N, 0.3, 0.9) for N in (256, 1024, 4096)]
        assert rates == sorted(rates)

    def test_channel_rate(self):
        assert channel_rate(1024, 0.11, 0.001) == pytest.approx(0.41383, abs=1e-4)
        assert channel_rate(1024, 0.11, 0.5) == pytest.approx(1.0 - h2(0.11) + 10.0 / 2048)
        assert channel_rate(10 ** 12, 0.11, 0.001) == pytest.approx(1.0 - h2(0.11), abs=1e-5)

    def test_gp_rate_limit(self):
        assert gp_rate(FbParams(10 ** 9, 0.1, 0.3)) == pytest.approx(0.412295, abs=1e-4)
        assert dp_capacity(0.1, 0.3) == pytest.approx(0.412295, abs=1e-6)

    def test_gp_rate_degenerates_at_equal_parameters(self):
        assert gp_rate(FbParams(1024, 0.2, 0.2)) < 0.0

    def test_gp_rate_monotone(self):
        grid = np.round(np.arange(0.12, 0.49, 0.01), 2)
        by_D = [gp_rate(FbParams(1024, 0.11, D)) for D in grid]
        assert np.all(np.diff(by_D) > 0)
        by_p = [gp_rate(FbParams(1024, p, 0.45)) for p in np.round(np.arange(0.01, 0.44, 0.01), 2)]
        assert np.all(np.diff(by_p) < 0)

    def test_params_validation(self):
        with pytest.raises(InvalidArgument):
            FbParams(1024, 0.6, 0.3)
        with pytest.raises(InvalidArgument):
            FbParams(0, 0.1, 0.3)
