#include "canard/linear.hpp"

#include <cmath>

namespace canard {

namespace {
constexpr double kClassTol = 1e-12;

bool near_rel(double x, double y) {
    return std::abs(x - y) <= kClassTol * std::max({1.0, std::abs(x), std::abs(y)});
}

constexpr double kPi = 3.14159265358979323846;
} // namespace

dispersion_point dispersion(const params& pars, double k) {
    const double d = pars.d(), k2 = k * k, A2 = pars.A * pars.A;
    dispersion_point out;
    out.k = k;
    out.trace = -(1.0 + d) * k2 + pars.B - A2 - 1.0;
    out.det = d * k2 * k2 + (1.0 + d * A2 - pars.B) * k2 + A2;
    return out;
}

critical_points_set critical_points(const params& pars) {
    const double eA = pars.eps * pars.A;
    critical_points_set c;
    c.B_turing = (1.0 + eA) * (1.0 + eA);
    c.k_turing = std::sqrt(pars.A / pars.eps);
    c.B_hopf = pars.A * pars.A + 1.0;
    c.B_bd = (1.0 - eA) * (1.0 - eA);
    return c;
}

double period_from_wavenumber(const params& pars, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("period_from_wavenumber: k must be positive");
    return 2.0 * kPi / (pars.eps * k);
}

double wavenumber_from_period(const params& pars, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("wavenumber_from_period: T must be positive");
    return 2.0 * kPi / (pars.eps * T);
}

eig_quartet spatial_eigenvalues(const params& pars) {
    const double eA = pars.eps * pars.A;
    const double S = 1.0 - pars.B + eA * eA; // sum of the two lambda^2 roots
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(S * S - 4.0 * eA * eA, 0.0));
    const std::complex<double> mu_plus = 0.5 * (S + disc);
    const std::complex<double> mu_minus = 0.5 * (S - disc);
    const std::complex<double> lp = std::sqrt(mu_plus);
    const std::complex<double> lm = std::sqrt(mu_minus);

    eig_quartet out;
    out.lambda = {lp, -lp, lm, -lm};

    const double B_bd = (1.0 - eA) * (1.0 - eA);
    const double B_t = (1.0 + eA) * (1.0 + eA);
    if (near_rel(pars.B, B_bd))
        out.regime = spatial_regime::belyakov_devaney;
    else if (near_rel(pars.B, B_t))
        out.regime = spatial_regime::resonant_one_one;
    else if (pars.B < B_bd)
        out.regime = spatial_regime::real_pairs;
    else if (pars.B > B_t)
        out.regime = spatial_regime::imaginary_pairs;
    else
        out.regime = spatial_regime::complex_quartet;
    return out;
}

gl_coefficients ginzburg_landau(const params& pars) {
    const double A = pars.A, e = pars.eps;
    const double eA = e * A;
    gl_coefficients c;
    c.time_coeff = (1.0 + eA) / (1.0 - e * e);
    c.space_coeff = 4.0 / ((1.0 + eA) * (1.0 + eA));
    const double B_t = (1.0 + eA) * (1.0 + eA);
    c.linear_coeff = (pars.B - B_t) / B_t;
    c.landau = (8.0 - 38.0 * eA - 5.0 * eA * eA + 8.0 * eA * eA * eA) /
               (9.0 * A * A * A * e * (1.0 + eA));
    c.subcritical = c.landau > 0.0;
    return c;
}

std::array<double, 2> landau_zero_locations(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("landau_zero_locations: eps must be positive");
    const double s = std::sqrt(313.0);
    return {(21.0 - s) / (16.0 * eps), (21.0 + s) / (16.0 * eps)};
}

nf_coefficients normal_form(double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("normal_form: omega must be positive");
    const double w2 = omega * omega;
    const double w4 = w2 * w2, w6 = w4 * w2, w8 = w4 * w4;
    nf_coefficients nf;
    nf.a = -0.25;
    nf.b = -(8.0 - 30.0 * w2 - 43.0 * w4 + 3.0 * w6 + 8.0 * w8) / (36.0 * w2);
    nf.c = (104.0 - 282.0 * w2 + 233.0 * w4 + 201.0 * w6 + 104.0 * w8) /
           (216.0 * w2 * omega);
    nf.alpha = 1.0 / (8.0 * omega);
    nf.beta = -(8.0 + 270.0 * w2 + 101.0 * w4 - 27.0 * w6 + 8.0 * w8) /
              (432.0 * w2 * omega);
    nf.gamma = -(192.0 + 2.0 * w2 + 153.0 * w4 + 79.0 * w6 + 192.0 * w8) /
               (432.0 * w4);
    return nf;
}

double normal_form_b_factored(double omega) {
    const double x = omega * omega;
    const double s = std::sqrt(313.0);
    const double x1 = (21.0 - s) / 16.0, x2 = (21.0 + s) / 16.0;
    return -(2.0 / (9.0 * x)) * (x + 2.0) * (x + 1.0) * (x - x1) * (x - x2);
}

} // namespace canard
