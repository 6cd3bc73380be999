#include "canard/blowup.hpp"

#include <cmath>

namespace canard {

extended_state extended_field(double A, const extended_state& s) {
    const double F = -s.calB * s.U + 2.0 * A * s.U * s.V + s.U * s.U * s.V;
    const double core = A * s.calB - A * A * s.V - s.U * s.U / A - F;
    return {s.P, core, s.eps * s.Q, s.eps * (s.U - core), 0.0, 0.0};
}

extended_state blowdown(const k2_point& z) {
    const double r2 = z.r2 * z.r2, r3 = r2 * z.r2, r4 = r2 * r2;
    return {r2 * z.U2, r3 * z.P2, r4 * z.V2, r3 * z.Q2, r2, r4 * z.B2};
}

extended_state blowdown(const k1_point& z) {
    const double r2 = z.r1 * z.r1, r3 = r2 * z.r1, r4 = r2 * r2;
    return {-r2, r3 * z.P1, r4 * z.V1, r3 * z.Q1, r2 * z.eps1, r4 * z.B1};
}

k1_point kappa21(const k2_point& z) {
    if (!(z.U2 < 0.0)) throw std::invalid_argument("kappa21: requires U2 < 0");
    const double m = -z.U2, m32 = m * std::sqrt(m);
    return {z.r2 * std::sqrt(m), z.P2 / m32, z.V2 / (m * m),
            z.Q2 / m32,          1.0 / m,    z.B2 / (m * m)};
}

k2_point kappa12(const k1_point& z) {
    if (!(z.eps1 > 0.0)) throw std::invalid_argument("kappa12: requires eps1 > 0");
    const double e32 = z.eps1 * std::sqrt(z.eps1);
    k2_point out;
    out.U2 = -1.0 / z.eps1;
    out.P2 = z.P1 / e32;
    out.V2 = z.V1 / (z.eps1 * z.eps1);
    out.Q2 = z.Q1 / e32;
    out.r2 = z.r1 * std::sqrt(z.eps1);
    out.B2 = z.B1 / (z.eps1 * z.eps1);
    return out;
}

k2_point field_k2(double A, const k2_point& z) {
    const double r2sq = z.r2 * z.r2;
    const double F2 = -z.B2 * z.U2 + 2.0 * A * z.U2 * z.V2 + r2sq * z.U2 * z.U2 * z.V2;
    const double core = A * z.B2 - A * A * z.V2 - z.U2 * z.U2 / A - r2sq * F2;
    k2_point d;
    d.U2 = z.P2;
    d.P2 = core;
    d.V2 = z.Q2;
    d.Q2 = z.U2 - r2sq * core;
    d.r2 = 0.0;
    d.B2 = 0.0;
    return d;
}

k1_point field_k1(double A, const k1_point& z) {
    const double r1sq = z.r1 * z.r1;
    const double F1 = z.B1 - 2.0 * A * z.V1 + r1sq * z.V1;
    const double core = A * z.B1 - A * A * z.V1 - 1.0 / A - r1sq * F1;
    k1_point d;
    d.r1 = -0.5 * z.r1 * z.P1;
    d.P1 = 1.5 * z.P1 * z.P1 + core;
    d.V1 = 2.0 * z.P1 * z.V1 + z.eps1 * z.Q1;
    d.Q1 = 1.5 * z.P1 * z.Q1 - z.eps1 - r1sq * z.eps1 * core;
    d.eps1 = z.eps1 * z.P1;
    d.B1 = 2.0 * z.B1 * z.P1;
    return d;
}

k2_point gamma0_k2(double A, double B2, double x2) {
    const double A3 = A * A * A;
    k2_point z;
    z.U2 = -A3 * x2 * x2 / 12.0;
    z.P2 = -A3 * x2 / 6.0;
    z.V2 = -A3 * x2 * x2 * x2 * x2 / 144.0 + A / 6.0 + B2 / A;
    z.Q2 = -A3 * x2 * x2 * x2 / 36.0;
    z.r2 = 0.0;
    z.B2 = B2;
    return z;
}

k1_point gamma0_k1(double A, double B2, double x2) {
    if (x2 == 0.0) throw std::invalid_argument("gamma0_k1: x2 must be nonzero");
    return kappa21(gamma0_k2(A, B2, x2));
}

double cusp_Q2(double A, double U2, int sign) {
    if (!(U2 <= 0.0)) throw std::invalid_argument("cusp_Q2: requires U2 <= 0");
    const double mag = 2.0 / (std::sqrt(3.0) * A * std::sqrt(A)) * std::pow(-U2, 1.5);
    return sign >= 0 ? mag : -mag;
}

canard_endpoints gamma0_limits(double A) {
    const double A3 = A * A * A;
    const double q = 2.0 / std::sqrt(3.0 * A3);
    canard_endpoints out;
    out.p_plus = {0.0, 0.0, -1.0 / A3, -q, 0.0, 0.0};
    out.p_minus = {0.0, 0.0, -1.0 / A3, q, 0.0, 0.0};
    const double pc = std::sqrt(1.0 - 3.0 / (A3 + 3.0));
    const double ec = std::sqrt(3.0 / (A3 + 3.0));
    out.t_plus = {0.0, pc, 0.0, 0.0, -ec, 0.0};
    out.t_minus = {0.0, -pc, 0.0, 0.0, -ec, 0.0};
    out.norm_coeff = 8.0 / A3 * std::sqrt(3.0 * (A3 + 3.0));
    return out;
}

k1_point l1_point(double A, double Q1) {
    return {0.0, 0.0, -1.0 / (A * A * A), Q1, 0.0, 0.0};
}

k1_point e_point(double A, int sign) {
    const double rho = std::sqrt(2.0 / (3.0 * A));
    return {0.0, sign >= 0 ? rho : -rho, 0.0, 0.0, 0.0, 0.0};
}

k1_point v1_point(double A, double r1, double Q1, double B1) {
    const double D = A - r1 * r1;
    if (!(D > 0.0)) throw std::invalid_argument("v1_point: requires r1^2 < A");
    k1_point z;
    z.r1 = r1;
    z.P1 = 0.0;
    z.V1 = -(1.0 - A * B1 * D) / (A * D * D);
    z.Q1 = Q1;
    z.eps1 = 0.0;
    z.B1 = B1;
    return z;
}

double l1_rate(double A) { return std::sqrt(2.0 / A); }

std::array<double, 6> e_eigenvalues(double A, int sign) {
    const double rho = std::sqrt(2.0 / (3.0 * A)) * (sign >= 0 ? 1.0 : -1.0);
    return {-0.5 * rho, rho, 1.5 * rho, 2.0 * rho, 2.0 * rho, 3.0 * rho};
}

std::complex<double> v1_rate(double A, double r1, double B1) {
    const double D = A - r1 * r1;
    if (!(D > 0.0)) throw std::invalid_argument("v1_rate: requires r1^2 < A");
    const double w = (2.0 - r1 * r1 * B1 * D) / D;
    return std::sqrt(std::complex<double>(w, 0.0));
}

hat_point hat_from_k2(double A, const k2_point& z) {
    const double A2 = A * A;
    return {z.U2 / A2, z.P2 / A2, z.V2, z.Q2 / A2};
}

k2_point k2_from_hat(double A, const hat_point& h, double B2) {
    const double A2 = A * A;
    k2_point z;
    z.U2 = A2 * h.U;
    z.P2 = A2 * h.P;
    z.V2 = h.V;
    z.Q2 = A2 * h.Q;
    z.r2 = 0.0;
    z.B2 = B2;
    return z;
}

hat_point hat_field(double A, double B2, const hat_point& h) {
    return {h.P, -h.V - A * h.U * h.U + B2 / A, A * A * h.Q, h.U};
}

double hamiltonian_h2(double A, double B2, const hat_point& h) {
    return 0.5 * h.P * h.P - 0.5 * A * A * h.Q * h.Q + h.U * h.V +
           A / 3.0 * h.U * h.U * h.U - B2 / A * h.U;
}

hat_point hat_scale(double s, const hat_point& h) {
    const double s2 = s * s, s3 = s2 * s, s4 = s2 * s2;
    return {s2 * h.U, s3 * h.P, s4 * h.V, s3 * h.Q};
}

} // namespace canard
