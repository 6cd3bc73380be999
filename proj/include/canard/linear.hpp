#pragma once
// Linearization around the homogeneous state: dispersion relation, Turing and
// Hopf thresholds, spatial eigenvalue quartet, and the weakly nonlinear
// amplitude-equation coefficients near the Turing point.

#include <array>
#include <complex>

#include "canard/model.hpp"

namespace canard {

struct dispersion_point {
    double k = 0.0;
    double trace = 0.0; // -(1+d) k^2 + B - A^2 - 1
    double det = 0.0;   // d k^4 + (1 + d A^2 - B) k^2 + A^2
};

dispersion_point dispersion(const params& pars, double k);

struct critical_points_set {
    double B_turing = 0.0; // (1 + eps A)^2
    double k_turing = 0.0; // sqrt(A / eps)
    double B_hopf = 0.0;   // A^2 + 1
    double B_bd = 0.0;     // (1 - eps A)^2, Belyakov-Devaney transition
};

critical_points_set critical_points(const params& pars);

// Wavenumber of a steady periodic profile with fast-scale period T, and back.
double period_from_wavenumber(const params& pars, double k);
double wavenumber_from_period(const params& pars, double T);

enum class spatial_regime {
    real_pairs,       // B < (1 - eps A)^2
    belyakov_devaney, // B = (1 - eps A)^2
    complex_quartet,  // (1 - eps A)^2 < B < (1 + eps A)^2
    resonant_one_one, // B = (1 + eps A)^2
    imaginary_pairs   // B > (1 + eps A)^2
};

struct eig_quartet {
    std::array<std::complex<double>, 4> lambda{};
    spatial_regime regime = spatial_regime::complex_quartet;
};

// Eigenvalues of the spatial linearization at the homogeneous state; roots of
// lambda^4 - (1 - B + eps^2 A^2) lambda^2 + eps^2 A^2. Closed under negation
// and conjugation. Classification uses relative tolerance 1e-12 on B.
eig_quartet spatial_eigenvalues(const params& pars);

struct gl_coefficients {
    double time_coeff = 0.0;      // (1 + eps A) / (1 - eps^2)
    double space_coeff = 0.0;     // 4 / (1 + eps A)^2
    double linear_coeff = 0.0;    // (B - B_T) / B_T
    double landau = 0.0;          // cubic coefficient
    bool subcritical = false;     // landau > 0
};

// Real Ginzburg-Landau coefficients of the Turing bifurcation.
gl_coefficients ginzburg_landau(const params& pars);

// Values of A at which the Landau coefficient vanishes for the given eps,
// in increasing order: (21 -+ sqrt(313)) / (16 eps).
std::array<double, 2> landau_zero_locations(double eps);

// Coefficients of the reversible 1:1 resonance normal form at the Turing
// point, parameterized by omega = sqrt(eps A).
struct nf_coefficients {
    double a = 0.0, b = 0.0, c = 0.0;       // cubic normal form
    double alpha = 0.0, beta = 0.0, gamma = 0.0; // reversible corrections
};

nf_coefficients normal_form(double omega);

// Factored evaluation of the b coefficient: with x = omega^2,
// b = -(2/(9x)) (x + 2)(x + 1)(x - x1)(x - x2), xic = (21 -+ sqrt(313))/16.
double normal_form_b_factored(double omega);

} // namespace canard
