import random
from fractions import Fraction as F

import pytest
from mpmath import mp

from heegnerlab.ellcurve import CurveModel, point, point_add
from heegnerlab.errors import IdentityPoint, PrecisionUnachievable
from heegnerlab.lattice import (
    Lattice,
    complex_log_embedding,
    curve_equation_residual,
    elliptic_log,
    periods,
    weierstrass_map,
    weierstrass_p,
)

E37 = CurveModel(0, 0, 1, -1, 0, 37)
E32 = CurveModel(0, 0, 0, -1, 0, 32)
E49 = CurveModel(1, -1, 0, -2, -1, 49)

PREC = 200


def quadrature_real_period(E, workprec):
    """tanh-sinh oracle for the real period, independent of the AGM."""
    with mp.workprec(workprec):
        c4, c6 = E.c_invariants
        g2, g3 = mp.mpf(c4) / 12, mp.mpf(c6) / 216
        roots = sorted(
            (mp.re(r) for r in mp.polyroots([4, 0, -g2, -g3], extraprec=80)),
            reverse=True,
        )
        e1 = roots[0]

        def f(s):
            t = e1 + s * s
            return 2 / mp.sqrt(4 * (t - roots[1]) * (t - roots[2]))

        return 2 * mp.quad(f, [0, 1, 10, mp.inf], maxdegree=10)


class TestPeriods:
    def test_37a_values(self):
        L = periods(E37, PREC)
        with mp.workprec(PREC):
            assert abs(L.omega1 - mp.mpf("2.993458646231959629832009979")) < 1e-24
            assert abs(mp.im(L.omega2) - mp.mpf("2.451389381986790060854224831")) < 1e-24
            assert abs(mp.re(L.omega2)) < 1e-40

    def test_32a_square_lattice(self):
        L = periods(E32, PREC)
        with mp.workprec(PREC):
            # CM by i: the lattice is square
            assert abs(L.omega2 / L.omega1 - mp.mpc(0, 1)) < mp.mpf(2) ** -190

    def test_32a_agm_matches_quadrature_oracle(self):
        L = periods(E32, PREC)
        oracle = quadrature_real_period(E32, PREC + 40)
        with mp.workprec(PREC + 40):
            assert abs(L.omega1 - oracle) < mp.mpf(2) ** -(PREC - 8)

    def test_49a_rhombic(self):
        L = periods(E49, PREC)
        with mp.workprec(PREC):
            # complex conjugation fixes the lattice: w2 + conj(w2) in Z*w1
            s = L.omega2 + mp.conj(L.omega2)
            k = mp.nint(mp.re(s / L.omega1))
            assert abs(s - k * L.omega1) < mp.mpf(2) ** -180

    def test_bad_precision_rejected(self):
        with pytest.raises(PrecisionUnachievable):
            periods(E37, 20)
        with pytest.raises(PrecisionUnachievable):
            periods(E37, 4000)


class TestWeierstrassP:
    def test_periodicity(self):
        L = periods(E37, PREC)
        with mp.workprec(PREC + 20):
            z = mp.mpf("0.3") * L.omega1 + mp.mpf("0.21") * L.omega2
            p1, dp1 = weierstrass_p(z, L, PREC)
            p2, dp2 = weierstrass_p(z + 3 * L.omega1 - 2 * L.omega2, L, PREC)
            assert abs(p1 - p2) < mp.mpf(2) ** -(PREC - 15)
            assert abs(dp1 - dp2) < mp.mpf(2) ** -(PREC - 15)

    def test_evenness(self):
        L = periods(E49, PREC)
        with mp.workprec(PREC + 20):
            z = mp.mpf("0.27") * L.omega1 + mp.mpf("0.4") * L.omega2
            p1, dp1 = weierstrass_p(z, L, PREC)
            p2, dp2 = weierstrass_p(-z, L, PREC)
            assert abs(p1 - p2) < mp.mpf(2) ** -(PREC - 15)
            assert abs(dp1 + dp2) < mp.mpf(2) ** -(PREC - 15)

    def test_identity_raises(self):
        L = periods(E37, PREC)
        with pytest.raises(IdentityPoint):
            weierstrass_p(mp.mpc(0), L, PREC)

    def test_differential_equation(self):
        # (p')^2 = 4p^3 - g2 p - g3
        L = periods(E37, PREC)
        with mp.workprec(PREC + 20):
            c4, c6 = E37.c_invariants
            g2, g3 = mp.mpf(c4) / 12, mp.mpf(c6) / 216
            z = mp.mpf("0.37") * L.omega1 + mp.mpf("0.11") * L.omega2
            p, dp = weierstrass_p(z, L, PREC)
            assert abs(dp * dp - (4 * p**3 - g2 * p - g3)) < mp.mpf(2) ** -(
                PREC - 20
            )


class TestMapAndLog:
    @pytest.mark.parametrize("E", [E37, E32, E49])
    def test_curve_equation_residual(self, E):
        L = periods(E, PREC)
        with mp.workprec(PREC + 40):
            for k in range(5):
                z = (0.11 + 0.17 * k) * L.omega1 + (0.07 + 0.13 * k) * L.omega2
                x, y = weierstrass_map(z, E, L)
                assert curve_equation_residual(E, x, y) < mp.mpf(2) ** -(PREC - 10)

    def test_rational_point_log_roundtrip(self):
        L = periods(E37, PREC)
        P = point(F(0), F(0))
        with mp.workprec(PREC + 20):
            z = elliptic_log(P, E37, L)
            x, y = weierstrass_map(z, E37, L)
            assert abs(x) < mp.mpf(2) ** -(PREC - 20)
            assert abs(y) < mp.mpf(2) ** -(PREC - 20)

    def test_two_torsion_log(self):
        L = periods(E32, PREC)
        with mp.workprec(PREC + 20):
            for xy in [(F(-1), F(0)), (F(0), F(0)), (F(1), F(0))]:
                z = elliptic_log(point(*xy), E32, L)
                assert L.distance(2 * z) < mp.mpf(2) ** -(PREC - 20)
                x, y = weierstrass_map(z, E32, L)
                assert abs(x - int(xy[0])) < mp.mpf(2) ** -(PREC - 30)

    def test_log_is_homomorphism(self):
        L = periods(E37, PREC)
        P = point(F(0), F(0))
        Q = point(F(1), F(0))
        R = point_add(P, Q, E37)
        with mp.workprec(PREC + 20):
            zP = elliptic_log(P, E37, L)
            zQ = elliptic_log(Q, E37, L)
            zR = elliptic_log(R, E37, L)
            assert L.distance(zP + zQ - zR) < mp.mpf(2) ** -(PREC - 20)

    def test_random_roundtrips(self):
        rng = random.Random(11)
        L = periods(E37, PREC)
        with mp.workprec(PREC + 40):
            for _ in range(10):
                s, t = rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)
                z = s * L.omega1 + t * L.omega2
                x, y = weierstrass_map(z, E37, L)
                z2 = complex_log_embedding(x, y, E37, L)
                assert L.distance(z - z2) < mp.mpf(2) ** -(PREC - 12)


class TestLatticeOps:
    def test_reduce_into_fundamental_domain(self):
        L = periods(E37, PREC)
        with mp.workprec(PREC):
            z = 17 * L.omega1 - 9 * L.omega2 + 0.3 * L.omega1
            r = L.reduce(z)
            assert L.distance(z - r) < mp.mpf(2) ** -(PREC - 20)

    def test_distance_zero_on_lattice_points(self):
        L = periods(E49, PREC)
        with mp.workprec(PREC):
            assert L.distance(3 * L.omega1 - 2 * L.omega2) < mp.mpf(2) ** -(
                PREC - 20
            )

    def test_nearest_distances_ordering(self):
        L = periods(E37, PREC)
        with mp.workprec(PREC):
            d0, d1 = L.nearest_distances(0.3 * L.omega1 + 0.4 * L.omega2)
            assert d0 <= d1
            assert d0 > 0
