#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <complex>

#include "canard/linear.hpp"
#include "testutil.hpp"

using namespace canard;

namespace {

// Oracle: trace and determinant of the reaction-diffusion linearization
// assembled as an explicit 2x2 matrix at wavenumber k.
Eigen::Matrix2d dispersion_matrix(const params& pars, double k) {
    Eigen::Matrix2d L;
    const double d = pars.eps * pars.eps;
    L(0, 0) = pars.B - 1.0 - d * k * k;
    L(0, 1) = pars.A * pars.A;
    L(1, 0) = -pars.B;
    L(1, 1) = -pars.A * pars.A - k * k;
    return L;
}

// Oracle: spatial eigenvalues as the spectrum of the 4x4 Jacobian of the
// fast-scale spatial ODE at the homogeneous state.
std::array<std::complex<double>, 4> jacobian_quartet(const params& pars) {
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    const double A = pars.A, B = pars.B, e = pars.eps;
    J(0, 1) = 1.0;
    J(1, 0) = 1.0 - B;
    J(1, 2) = -A * A;
    J(2, 3) = e;
    J(3, 0) = e * B;
    J(3, 2) = e * A * A;
    Eigen::EigenSolver<Eigen::Matrix4d> es(J);
    std::array<std::complex<double>, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()[i];
    return out;
}

void sort_quartet(std::array<std::complex<double>, 4>& q) {
    std::sort(q.begin(), q.end(), [](auto a, auto b) {
        if (std::abs(a.real() - b.real()) > 1e-12) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

} // namespace

TEST_SUITE_BEGIN("linear");

TEST_CASE("dispersion trace and determinant match the assembled 2x2 matrix") {
    auto g = testutil::rng(21);
    for (int i = 0; i < 200; ++i) {
        params pars{testutil::uniform(g, 0.2, 3.0), testutil::uniform(g, 0.2, 3.0),
                    testutil::uniform(g, 1e-3, 0.3)};
        const double k = testutil::uniform(g, 0.0, 30.0);
        const auto dp = dispersion(pars, k);
        const Eigen::Matrix2d L = dispersion_matrix(pars, k);
        CHECK(testutil::close_rel(dp.trace, L.trace(), 1e-12));
        CHECK(testutil::close_rel(dp.det, L.determinant(), 1e-12));
    }
}

TEST_CASE("Turing point is a double root of the determinant in k") {
    for (params pars : {params{1.0, 1.0, 0.01}, params{2.0, 1.0, 0.05}, params{0.7, 1.0, 0.002}}) {
        const auto c = critical_points(pars);
        pars.B = c.B_turing;
        const double h = 1e-4 * c.k_turing;
        const double f0 = dispersion(pars, c.k_turing).det;
        const double fp = dispersion(pars, c.k_turing + h).det;
        const double fm = dispersion(pars, c.k_turing - h).det;
        CHECK(std::abs(f0) < 1e-9 * (1.0 + std::abs(fp)));
        // central difference for d(det)/dk vanishes at the minimum
        CHECK(std::abs((fp - fm) / (2 * h)) < 1e-6 * (1.0 + std::abs(fp - f0) / h));
        CHECK(fp - f0 > 0.0);
        CHECK(fm - f0 > 0.0);
    }
}

TEST_CASE("Hopf threshold zeroes the k = 0 trace") {
    for (double A : {0.5, 1.0, 2.0}) {
        params pars{A, 1.0, 0.01};
        pars.B = critical_points(pars).B_hopf;
        CHECK(std::abs(dispersion(pars, 0.0).trace) < 1e-14);
    }
}

TEST_CASE("period and wavenumber are mutually inverse, reference value at k = 2") {
    params pars{1.0, 1.0, 0.01};
    CHECK(testutil::close_rel(period_from_wavenumber(pars, 2.0), 100.0 * 3.14159265358979323846, 1e-13));
    for (double k : {0.5, 1.0, 8.0}) {
        CHECK(testutil::close_rel(wavenumber_from_period(pars, period_from_wavenumber(pars, k)), k, 1e-13));
    }
    CHECK_THROWS_AS(period_from_wavenumber(pars, 0.0), std::invalid_argument);
}

TEST_CASE("eigenvalue quartet matches the Jacobian spectrum") {
    auto g = testutil::rng(22);
    for (int i = 0; i < 100; ++i) {
        params pars{testutil::uniform(g, 0.3, 2.5), testutil::uniform(g, 0.2, 3.0),
                    testutil::uniform(g, 1e-3, 0.2)};
        auto computed = spatial_eigenvalues(pars).lambda;
        auto oracle = jacobian_quartet(pars);
        sort_quartet(computed);
        sort_quartet(oracle);
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(computed[j] - oracle[j]) < 1e-8 * (1.0 + std::abs(oracle[j])));
        }
    }
}

TEST_CASE("quartet satisfies the characteristic quartic and symmetry closure") {
    auto g = testutil::rng(23);
    for (int i = 0; i < 100; ++i) {
        params pars{testutil::uniform(g, 0.3, 2.5), testutil::uniform(g, 0.2, 3.0),
                    testutil::uniform(g, 1e-3, 0.2)};
        const double S = 1.0 - pars.B + pars.eps * pars.eps * pars.A * pars.A;
        const double P = pars.eps * pars.eps * pars.A * pars.A;
        auto q = spatial_eigenvalues(pars).lambda;
        for (auto lam : q) {
            const auto l2 = lam * lam;
            const auto res = l2 * l2 - S * l2 + P;
            CHECK(std::abs(res) < 1e-12 * (1.0 + std::abs(l2 * l2)));
            // negation closure
            CHECK(std::any_of(q.begin(), q.end(),
                              [&](auto m) { return std::abs(m + lam) < 1e-12 * (1 + std::abs(lam)); }));
            // conjugation closure
            CHECK(std::any_of(q.begin(), q.end(), [&](auto m) {
                return std::abs(m - std::conj(lam)) < 1e-12 * (1 + std::abs(lam));
            }));
        }
    }
}

TEST_CASE("regime classification across the B range") {
    params base{1.0, 1.0, 0.01};
    const auto c = critical_points(base);

    auto regime_at = [&](double B) {
        params pars = base;
        pars.B = B;
        return spatial_eigenvalues(pars).regime;
    };

    CHECK(regime_at(0.5 * c.B_bd) == spatial_regime::real_pairs);
    CHECK(regime_at(c.B_bd) == spatial_regime::belyakov_devaney);
    CHECK(regime_at(1.0) == spatial_regime::complex_quartet);
    CHECK(regime_at(c.B_turing) == spatial_regime::resonant_one_one);
    CHECK(regime_at(1.5) == spatial_regime::imaginary_pairs);

    // structure of the quartet in each open regime
    auto q_real = spatial_eigenvalues(params{1.0, 0.5 * c.B_bd, 0.01}).lambda;
    for (auto l : q_real) CHECK(std::abs(l.imag()) < 1e-14);

    auto q_imag = spatial_eigenvalues(params{1.0, 1.5, 0.01}).lambda;
    for (auto l : q_imag) CHECK(std::abs(l.real()) < 1e-14);

    auto q_cx = spatial_eigenvalues(params{1.0, 1.0, 0.01}).lambda;
    for (auto l : q_cx) {
        CHECK(std::abs(l.real()) > 1e-3);
        CHECK(std::abs(l.imag()) > 1e-3);
    }
}

TEST_CASE("Ginzburg-Landau coefficients: reference values and scaling limit") {
    params pars{1.0, 1.0, 0.01};
    const auto c = ginzburg_landau(pars);
    CHECK(testutil::close_rel(c.time_coeff, 1.01 / (1.0 - 1e-4), 1e-13));
    CHECK(testutil::close_rel(c.space_coeff, 4.0 / (1.01 * 1.01), 1e-13));
    CHECK(testutil::close_rel(c.linear_coeff, (1.0 - 1.0201) / 1.0201, 1e-12));
    CHECK(c.subcritical);

    // Landau coefficient approaches 8 / (9 A^3 eps) as eps -> 0
    for (double e : {1e-6, 1e-8}) {
        params small{1.0, 1.0, e};
        const auto cs = ginzburg_landau(small);
        CHECK(testutil::close_rel(cs.landau * 9.0 * e / 8.0, 1.0, 1e-5));
    }
}

TEST_CASE("Landau coefficient changes sign exactly at its closed-form zeros") {
    const double eps = 0.01;
    const auto zeros = landau_zero_locations(eps);
    CHECK(zeros[0] < zeros[1]);
    auto landau_at = [&](double A) { return ginzburg_landau(params{A, 1.0, eps}).landau; };

    for (double Az : zeros) {
        CHECK(landau_at(Az * (1.0 - 1e-6)) * landau_at(Az * (1.0 + 1e-6)) < 0.0);
        // bisection oracle against the closed form
        double lo = Az * 0.98, hi = Az * 1.02;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (landau_at(lo) * landau_at(mid) <= 0.0)
                hi = mid;
            else
                lo = mid;
        }
        CHECK(std::abs(0.5 * (lo + hi) - Az) < 1e-9);
    }
    // subcritical window below the first zero
    CHECK(landau_at(0.5 * zeros[0]) > 0.0);
    CHECK(landau_at(0.5 * (zeros[0] + zeros[1])) < 0.0);
    CHECK(landau_at(2.0 * zeros[1]) > 0.0);
}

TEST_CASE("normal form coefficients: fixed a, factored b, sign pattern") {
    CHECK(normal_form(0.37).a == -0.25);

    auto g = testutil::rng(24);
    for (int i = 0; i < 100; ++i) {
        const double w = std::exp(testutil::uniform(g, std::log(1e-2), std::log(1e2)));
        const auto nf = normal_form(w);
        CHECK(testutil::close_rel(nf.b, normal_form_b_factored(w), 1e-10));
        CHECK(nf.a < 0.0);
        CHECK(nf.c > 0.0);
        CHECK(nf.alpha > 0.0);
        CHECK(nf.beta < 0.0);
        CHECK(nf.gamma < 0.0);
    }
}

TEST_CASE("b vanishes exactly where the Landau coefficient does") {
    const double eps = 0.01;
    const auto zeros = landau_zero_locations(eps);
    // omega^2 = eps A, so the b roots x = omega^2 correspond to A = x / eps
    const double s = std::sqrt(313.0);
    CHECK(testutil::close_rel(zeros[0], (21.0 - s) / 16.0 / eps, 1e-13));
    CHECK(testutil::close_rel(zeros[1], (21.0 + s) / 16.0 / eps, 1e-13));

    for (double Az : zeros) {
        const double w = std::sqrt(eps * Az);
        CHECK(std::abs(normal_form(w).b) < 1e-12);
        // opposite signs: landau > 0 iff b < 0
        for (double shift : {0.99, 1.01}) {
            const double A = Az * shift;
            const double bb = normal_form(std::sqrt(eps * A)).b;
            const double ll = ginzburg_landau(params{A, 1.0, eps}).landau;
            CHECK(bb * ll < 0.0);
        }
    }
}

TEST_SUITE_END();
