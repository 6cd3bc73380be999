#pragma once
// Brusselator reaction kinetics and the spatial dynamics formulation.
//
// The reaction-diffusion system
//     u_t = eps^2 u_xx + A - (B+1) u + u^2 v
//     v_t =       v_xx + B u - u^2 v
// has steady profiles governed by a four-dimensional spatial ODE. On the
// fast scale y = x/eps the first-order form in (u, p, v, q) is
//     u' = p,  p' = -A + (B+1) u - u^2 v,  v' = eps q,  q' = eps (-B u + u^2 v)
// and the slow scale x carries the same vector field divided by eps.
// The system is reversible under R = diag(1, -1, 1, -1).

#include <stdexcept>

namespace canard {

struct params {
    double A = 1.0;   // feed rate, A > 0
    double B = 1.0;   // control parameter, B > 0
    double eps = 0.01; // diffusion ratio d = eps^2, eps > 0

    double d() const { return eps * eps; }
    double calB() const { return B - 1.0; } // offset from the canard value B = 1

    // Throws std::invalid_argument unless A, B, eps are all positive and finite.
    void validate() const;
};

struct phase_point {
    double u = 0.0, p = 0.0, v = 0.0, q = 0.0;
};

// Coordinates centred on the B = 1 organizing point: u = A + U, v = 1/A + V.
struct translated_point {
    double U = 0.0, P = 0.0, V = 0.0, Q = 0.0;
};

struct kinetics_rates {
    double f = 0.0; // A - (B+1) u + u^2 v
    double g = 0.0; // B u - u^2 v
};

kinetics_rates kinetics(const params& pars, double u, double v);

// Spatially homogeneous steady state (A, 0, B/A, 0).
phase_point equilibrium(const params& pars);

enum class time_scale { fast, slow };

// Right-hand side of the spatial ODE on the requested scale.
phase_point vector_field(const params& pars, const phase_point& y,
                         time_scale scale = time_scale::fast);

// Image under the reverser R = diag(1, -1, 1, -1).
phase_point reverse(const phase_point& y);

translated_point translate(const params& pars, const phase_point& y);
phase_point untranslate(const params& pars, const translated_point& t);

// Nonlinear coupling F(U, V) = -(B-1) U + 2 A U V + U^2 V appearing in the
// translated equations.
double coupling_term(const params& pars, double U, double V);

// Fast-scale vector field in translated coordinates:
//   U' = P
//   P' = A(B-1) - A^2 V - U^2/A - F(U, V)
//   V' = eps Q
//   Q' = eps (-(A(B-1)) + U + A^2 V + U^2/A + F(U, V))
translated_point translated_field(const params& pars, const translated_point& t);

} // namespace canard
