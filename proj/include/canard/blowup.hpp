#pragma once
// Blow-up of the degenerate fold point at B = 1: rescaling chart (K2) and
// entry/exit chart (K1), the transition map between them, the algebraic
// singular-canard solution with its endpoints on the critical sphere, the
// equilibrium structure of the entry chart, and the conserved quantity of
// the scaled system.
//
// Weights: U = r^2 U*, P = r^3 P*, V = r^4 V*, Q = r^3 Q*, eps = r^2 eps*,
// calB = r^4 calB*, with time contracted by one power of r.

#include <array>
#include <complex>

#include "canard/model.hpp"

namespace canard {

// Translated coordinates extended by the trivially-constant parameters.
struct extended_state {
    double U = 0, P = 0, V = 0, Q = 0, eps = 0, calB = 0;
};

// Fast-scale vector field on the extended space (eps' = calB' = 0).
extended_state extended_field(double A, const extended_state& s);

struct k2_point {
    double U2 = 0, P2 = 0, V2 = 0, Q2 = 0;
    double r2 = 0; // sqrt(eps)
    double B2 = 0; // calB / eps^2
};

struct k1_point {
    double r1 = 0, P1 = 0, V1 = 0, Q1 = 0, eps1 = 0, B1 = 0;
};

extended_state blowdown(const k2_point& z);
extended_state blowdown(const k1_point& z);

// Chart transition K2 -> K1, defined for U2 < 0, and its inverse for eps1 > 0.
k1_point kappa21(const k2_point& z);
k2_point kappa12(const k1_point& z);

// In-chart vector fields (derivatives returned in the same struct layout;
// r2 and B2 are constant in K2, everything varies in K1).
k2_point field_k2(double A, const k2_point& z);
k1_point field_k1(double A, const k1_point& z);

// Algebraic solution of the r2 = 0 rescaled system through the fold:
// (U2, P2, V2, Q2) = (-A^3 x2^2/12, -A^3 x2/6, -A^3 x2^4/144 + A/6 + B2/A,
//                     -A^3 x2^3/36).
k2_point gamma0_k2(double A, double B2, double x2);

// The same curve written in the entry chart; requires x2 != 0.
k1_point gamma0_k1(double A, double B2, double x2);

// Cusp law relating Q2 and U2 along the curve; sign = +1 picks the x2 < 0
// half (Q2 > 0), sign = -1 the x2 > 0 half.
double cusp_Q2(double A, double U2, int sign);

// Endpoints of the singular canard on the blow-up sphere and their unit
// tangents, ordered (r1, P1, V1, Q1, eps1, B1). p_plus is the x2 -> +infinity
// limit (Q1 < 0), p_minus the x2 -> -infinity limit.
struct canard_endpoints {
    k1_point p_plus, p_minus;
    std::array<double, 6> t_plus{}, t_minus{};
    double norm_coeff = 0; // |gamma0'| ~ norm_coeff / |x2|^3
};
canard_endpoints gamma0_limits(double A);

// Equilibria of the entry chart.
k1_point l1_point(double A, double Q1);                 // line r1 = P1 = eps1 = B1 = 0
k1_point e_point(double A, int sign);                   // P1 = +-sqrt(2/(3A))
k1_point v1_point(double A, double r1, double Q1, double B1); // requires r1^2 < A

// Nonzero eigenvalue pairs (the rest of the spectrum is zero).
double l1_rate(double A);                                // sqrt(2/A)
std::array<double, 6> e_eigenvalues(double A, int sign); // full list
std::complex<double> v1_rate(double A, double r1, double B1);

// Scaled coordinates of the rescaling chart: U2 = A^2 U, P2 = A^2 P,
// V2 = V, Q2 = A^2 Q.
struct hat_point {
    double U = 0, P = 0, V = 0, Q = 0;
};
hat_point hat_from_k2(double A, const k2_point& z);
k2_point k2_from_hat(double A, const hat_point& h, double B2);

// U' = P, P' = -V - A U^2 + B2/A, V' = A^2 Q, Q' = U.
hat_point hat_field(double A, double B2, const hat_point& h);

// Conserved quantity of the scaled system:
// H2 = P^2/2 - (A^2/2) Q^2 + U V + (A/3) U^3 - (B2/A) U.
double hamiltonian_h2(double A, double B2, const hat_point& h);

// Self-similarity action (U, P, V, Q) -> (s^2 U, s^3 P, s^4 V, s^3 Q),
// B2 -> s^4 B2, under which H2 scales by s^6.
hat_point hat_scale(double s, const hat_point& h);

} // namespace canard
