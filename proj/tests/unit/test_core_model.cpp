#include <doctest.h>

#include <cmath>
#include <random>

#include "chiral/errors.hpp"
#include "chiral/geometry.hpp"
#include "chiral/interaction.hpp"
#include "chiral/rddi.hpp"

using namespace chiral;

namespace {

constexpr cplx I{0.0, 1.0};

InteractionMatrix chain_v(std::size_t n, double xi, double delta, double gamma_left) {
    return build_interaction_matrix(build_geometry(n, xi), DriveParams::uniform(n, delta),
                                    ChiralCoupling::from_gamma_left(gamma_left));
}

// Composite Simpson over u = cos(theta), trapezoid over phi (the phi
// integrand is a degree-2 trig polynomial, so 16 points are exact).
double decay_by_angular_quadrature(double xi, double mu_align) {
    const double sin_a = std::sqrt(1.0 - mu_align * mu_align);
    const int nu = 4000; // even
    const int nphi = 16;
    const double hu = 2.0 / nu;
    double total = 0.0;
    for (int i = 0; i <= nu; ++i) {
        const double u = -1.0 + hu * i;
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        double ring = 0.0;
        for (int j = 0; j < nphi; ++j) {
            const double phi = kTwoPi * j / nphi;
            const double pk = sin_a * s * std::cos(phi) + mu_align * u;
            ring += (1.0 - pk * pk);
        }
        ring *= kTwoPi / nphi;
        const double w = (i == 0 || i == nu) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        total += w * ring * std::cos(xi * u);
    }
    total *= hu / 3.0;
    return 3.0 / (8.0 * kPi) * total;
}

} // namespace

TEST_SUITE("core-model") {

TEST_CASE("chain geometry rejects empty and unordered positions") {
    CHECK_THROWS_AS(ChainGeometry({}), InvalidInput);
    CHECK_THROWS_AS(ChainGeometry({0.0, 0.0}), InvalidInput);
    CHECK_THROWS_AS(ChainGeometry({1.0, 0.5}), InvalidInput);
    CHECK(ChainGeometry({0.0, 0.1}).separation(1, 0) == doctest::Approx(0.1));
}

TEST_CASE("equidistant geometry") {
    const auto g = build_geometry(3, kPi);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == kPi);
    CHECK(g[2] == 2.0 * kPi);

    CHECK(build_geometry(2, kPi / 2).separation(0, 1) == kPi / 2);
    CHECK_THROWS_AS(build_geometry(0, 1.0), InvalidInput);
}

TEST_CASE("non-positive spacing is laid out with its 2pi-equivalent") {
    const auto g0 = build_geometry(3, 0.0);
    CHECK(g0[1] == doctest::Approx(kTwoPi));
    const auto gneg = build_geometry(2, -kPi / 2);
    CHECK(gneg.separation(0, 1) == doctest::Approx(1.5 * kPi));
    // -xi and 2pi - xi give the same couplings.
    const auto a = chain_v(4, -1.0, 0.3, 0.2).entries;
    const auto b = chain_v(4, kTwoPi - 1.0, 0.3, 0.2).entries;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("zero fluctuation reproduces the nominal chain exactly") {
    const auto nominal = build_geometry(10, kPi);
    const auto noisy = build_geometry(10, kPi, FluctuationSpec{0.0, 99});
    CHECK(noisy.positions() == nominal.positions());
}

TEST_CASE("fluctuated geometry is ordered and reproducible") {
    const FluctuationSpec spec{0.01, 42};
    const auto a = build_geometry(10, kPi, spec);
    const auto b = build_geometry(10, kPi, spec);
    CHECK(a.positions() == b.positions());
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
    const auto c = build_geometry(10, kPi, FluctuationSpec{0.01, 43});
    CHECK(a.positions() != c.positions());
    CHECK_THROWS_AS(build_geometry(3, 1.0, FluctuationSpec{-0.1, 1}), InvalidInput);
}

TEST_CASE("displacement statistics match the requested Gaussian") {
    // 10^4 seeds x 10 atoms; sample std of the displacements vs 0.01 pi.
    const double xi = kPi;
    const double expected = 0.01 * xi;
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const auto g = build_geometry(10, xi, FluctuationSpec{0.01, seed});
        for (std::size_t mu = 0; mu < 10; ++mu) {
            const double d = g[mu] - static_cast<double>(mu) * xi;
            sum += d;
            sum2 += d * d;
            ++count;
        }
    }
    const double mean = sum / count;
    const double stdev = std::sqrt((sum2 - count * mean * mean) / (count - 1));
    CHECK(std::abs(mean) < 4.0 * expected / std::sqrt(double(count)));
    CHECK(stdev == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("chiral kernel examples") {
    auto [l0, r0] = chiral_kernel_1d(0.0, 0.5, 0.5);
    CHECK(std::abs(l0 - cplx(-0.5, 0.0)) < 1e-15);
    CHECK(std::abs(r0 - cplx(-0.5, 0.0)) < 1e-15);

    auto [l1, r1] = chiral_kernel_1d(kPi / 2, 0.0, 1.0);
    CHECK(std::abs(l1) == 0.0);
    CHECK(std::abs(r1 - I) < 1e-15);

    auto [l2, r2] = chiral_kernel_1d(kPi, 0.25, 0.75);
    CHECK(std::abs(l2 - cplx(0.25, 0.0)) < 1e-15);
    CHECK(std::abs(r2 - cplx(0.75, 0.0)) < 1e-15);

    CHECK_THROWS_AS(chiral_kernel_1d(-0.1, 0.5, 0.5), InvalidInput);
}

TEST_CASE("reciprocal kernel: shift follows cos, decay follows sin") {
    for (double x : {0.3, 1.0, 2.5, 4.0}) {
        auto [l, r] = chiral_kernel_1d(x, 0.5, 0.5);
        CHECK(l.real() == doctest::Approx(-0.5 * std::cos(x)));
        CHECK(l.imag() == doctest::Approx(0.5 * std::sin(x)));
        CHECK(std::abs(l - r) == 0.0);
    }
}

TEST_CASE("interaction matrix examples") {
    const auto v = chain_v(2, kPi / 2, 0.0, 0.0).entries;
    CHECK(std::abs(v(0, 0) - cplx(-0.5, 0)) < 1e-15);
    CHECK(std::abs(v(0, 1)) < 1e-15);
    CHECK(std::abs(v(1, 0) - I) < 1e-15);
    CHECK(std::abs(v(1, 1) - cplx(-0.5, 0)) < 1e-15);

    const auto rec = chain_v(2, 1.234, 0.7, 0.5).entries;
    CHECK(rec(0, 1) == rec(1, 0));

    const auto geom = build_geometry(3, kPi);
    DriveParams drive{0.01, {1.0, 2.0, 3.0}};
    const auto d = build_interaction_matrix(geom, drive, ChiralCoupling::from_gamma_left(0.5)).entries;
    CHECK(std::abs(d(0, 0) - cplx(-0.5, 1.0)) < 1e-15);
    CHECK(std::abs(d(1, 1) - cplx(-0.5, 2.0)) < 1e-15);
    CHECK(std::abs(d(2, 2) - cplx(-0.5, 3.0)) < 1e-15);

    DriveParams short_drive{0.01, {1.0}};
    CHECK_THROWS_AS(build_interaction_matrix(geom, short_drive, ChiralCoupling::from_gamma_left(0.5)), InvalidInput);
}

TEST_CASE("coupling parameterizations") {
    const auto cascaded = ChiralCoupling::from_directionality(1.0);
    CHECK(cascaded.gamma_left() == 0.0);
    CHECK(cascaded.gamma_right() == 1.0);
    const auto rec = ChiralCoupling::from_directionality(0.0);
    CHECK(rec.gamma_left() == 0.5);
    CHECK(ChiralCoupling::from_gamma_left(0.25).directionality() == doctest::Approx(0.5));
    CHECK_THROWS_AS(ChiralCoupling::from_directionality(1.5), InvalidInput);
    CHECK_THROWS_AS(ChiralCoupling::from_gamma_left(-0.1), InvalidInput);
}

TEST_CASE("property: V is symmetric iff gamma_L == gamma_R") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 6;
        const double xi = 0.05 + (kTwoPi - 0.1) * u01(rng);
        double gl = u01(rng);
        if (trial % 4 == 0) gl = 0.5;
        DriveParams drive{0.01, {}};
        for (std::size_t i = 0; i < n; ++i) drive.detunings.push_back(4.0 * u01(rng) - 2.0);
        const auto v = build_interaction_matrix(build_geometry(n, xi), drive, ChiralCoupling::from_gamma_left(gl)).entries;
        const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
        // Off-diagonal magnitudes differ by |gamma_L - gamma_R| exactly.
        if (gl == 0.5) CHECK(asym == 0.0);
        else CHECK(asym == doctest::Approx(std::abs(1.0 - 2.0 * gl)).epsilon(1e-12));
    }
}

TEST_CASE("V is not normal for chiral coupling") {
    const auto v = chain_v(2, kPi / 2, 0.0, 0.0).entries;
    const double defect = (v * v.adjoint() - v.adjoint() * v).norm();
    CHECK(defect > 0.5);
}

TEST_CASE("V depends only on separations: translation invariance") {
    const auto base = build_geometry(5, 0.9, FluctuationSpec{0.05, 3});
    std::vector<double> shifted = base.positions();
    for (auto& x : shifted) x += 17.25;
    DriveParams drive{0.01, {0.1, -0.2, 0.3, 0.0, 1.0}};
    const auto coupling = ChiralCoupling::from_directionality(0.3);
    const auto a = build_interaction_matrix(base, drive, coupling).entries;
    const auto b = build_interaction_matrix(ChainGeometry(shifted), drive, coupling).entries;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("V is 2pi periodic in the spacing") {
    for (double xi : {0.3, 1.7, 3.0, 5.9}) {
        const auto a = chain_v(8, xi, 0.4, 0.3).entries;
        const auto b = chain_v(8, xi + kTwoPi, 0.4, 0.3).entries;
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("reciprocal limit matches the 1D reservoir kernel") {
    const auto geom = build_geometry(4, 1.1);
    const auto v = build_interaction_matrix(geom, DriveParams::uniform(4, 0.0), ChiralCoupling::from_directionality(0.0)).entries;
    for (Eigen::Index mu = 0; mu < 4; ++mu)
        for (Eigen::Index nu = 0; nu < 4; ++nu) {
            if (mu == nu) continue;
            const cplx kernel = rddi_1d(geom.separation(mu, nu));
            CHECK(std::abs(v(mu, nu) + std::conj(kernel)) < 1e-14);
        }
}

TEST_CASE("rddi_3d direct evaluations") {
    CHECK(rddi_3d_decay(kPi, 0.0) == doctest::Approx(-1.5 / (kPi * kPi)).epsilon(1e-13));
    CHECK(rddi_3d_decay(kTwoPi, 1.0) == doctest::Approx(-3.0 / (4.0 * kPi * kPi)).epsilon(1e-13));
    CHECK_THROWS_AS(rddi_3d(0.0, 0.5), InvalidInput);
    CHECK_THROWS_AS(rddi_3d(1.0, 1.5), InvalidInput);
}

TEST_CASE("rddi_3d agrees with the spherical Bessel form") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xi_dist(0.1, 40.0), a_dist(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double xi = xi_dist(rng), a = a_dist(rng);
        const double t = 1.0 - a * a, l = 1.0 - 3.0 * a * a;
        const double decay = 1.5 * (t * std::sph_bessel(0, xi) - l * std::sph_bessel(1, xi) / xi);
        const double shift = 0.75 * (t * std::sph_neumann(0, xi) - l * std::sph_neumann(1, xi) / xi);
        const cplx j = rddi_3d(xi, a);
        CHECK(2.0 * j.real() == doctest::Approx(decay).epsilon(1e-10));
        CHECK(j.imag() == doctest::Approx(shift).epsilon(1e-10));
    }
}

TEST_CASE("rddi_3d decay equals the angular integral over emission directions") {
    for (auto [xi, a] : {std::pair{0.5, 0.0}, {kPi, 0.3}, {4.2, 1.0}, {7.0, -0.6}}) {
        CHECK(rddi_3d_decay(xi, a) == doctest::Approx(decay_by_angular_quadrature(xi, a)).epsilon(1e-8));
    }
}

TEST_CASE("rddi_3d far field is dominated by the 1/xi term") {
    const double xi = 1e3;
    for (double a : {0.0, 0.5, 1.0}) {
        const double shift = rddi_3d(xi, a).imag();
        CHECK(std::abs(shift) <= 0.75 / xi * (1.0 + 3.0 / (xi * xi)) + 1.5 / (xi * xi));
        const double leading = -0.75 * (1.0 - a * a) * std::cos(xi) / xi;
        CHECK(std::abs(shift - leading) <= 1.5 * (1.0 / (xi * xi) + 1.0 / (xi * xi * xi)));
    }
}

}
