#pragma once
// Slow-fast decomposition of the spatial dynamics: critical manifold and its
// fold, layer problem with its homoclinic pulse, slow manifold and the
// desingularized reduced flow, folded singularities with their singular
// canards, and the takeoff/touchdown data of the fast jump.

#include <array>

#include "canard/model.hpp"

namespace canard {

// Saddle (u_s) and center (u_c) sheets of the critical manifold at height v,
// roots of u^2 v - (B+1) u + A = 0 with u_s <= u_c. Requires 0 < v <= v_fold.
struct critical_branches_t {
    double u_s = 0.0, u_c = 0.0;
};
critical_branches_t critical_branches(const params& pars, double v);

struct fold_point_t {
    double v = 0.0; // (1+B)^2 / (4A)
    double u = 0.0; // 2A / (1+B)
};
fold_point_t fold_point(const params& pars);

// lambda(v) = sqrt(v (u_c - u_s)), the layer saddle rate at the u_s sheet.
double layer_rate(const params& pars, double v);

// d u_s / d v = u_s^2 / (v (u_c - u_s)).
double saddle_slope(const params& pars, double v);

// H(u, p; v) = p^2/2 + A u - (B+1) u^2/2 + u^3 v / 3, conserved by the layer flow.
double layer_hamiltonian(const params& pars, double u, double p, double v);

// Same invariant in coordinates rectified to the saddle sheet, uhat = u - u_s,
// normalized so the sheet itself sits at level zero.
double rectified_hamiltonian(const params& pars, double uhat, double p, double v);

struct layer_point {
    double u = 0.0, p = 0.0;
};

// Layer vector field (u' = p, p' = -A + (B+1) u - u^2 v) at frozen v.
layer_point layer_field(const params& pars, double v, const layer_point& y);

// Homoclinic pulse of the layer problem as offsets from the saddle sheet:
// uhat = (3/2)(u_c - u_s) sech^2(lambda xi / 2), p = d uhat / d xi.
// Requires v strictly below the fold.
layer_point layer_pulse(const params& pars, double v, double xi);

// First-order slow manifold point over base (v, q).
phase_point slow_manifold_point(const params& pars, double v, double q);

// Desingularized reduced flow on the saddle sheet, in (u, q):
// u' = q, q' = -W'(u) with the potential W below. Requires u > 0.
struct reduced_point {
    double u = 0.0, q = 0.0;
};
reduced_point reduced_field(const params& pars, const reduced_point& y);

// W(u) = (B+1) ln u + A (B+3)/u - A^2/u^2.
double reduced_potential(const params& pars, double u);

// H_d = q^2/2 + W(u), conserved by the reduced flow.
double reduced_hamiltonian(const params& pars, double u, double q);

enum class folded_kind {
    center,      // B < 1
    saddle_node, // B = 1 (within 1e-12 relative)
    saddle       // B > 1
};

struct folded_singularity_t {
    double u_M = 0.0;          // 2A / (B+1)
    folded_kind kind = folded_kind::center;
    double g_at_equilibrium = 0.0; // d(-W')/du at u = A: (1-B)/A^2
    double g_at_fold = 0.0;        // d(-W')/du at u_M: (B+1)^3 (B-1) / (8 A^2)
    double slope_true = 0.0;       // canard slopes at u_M for B >= 1
    double slope_faux = 0.0;
};
folded_singularity_t folded_singularity(const params& pars);

// 2 (W(u_M) - W(u)); the singular canards live where this is nonnegative.
double canard_radicand(const params& pars, double u);

struct canard_levels_t {
    double q_true = 0.0; // +sqrt of the radicand
    double q_faux = 0.0; // mirror branch
};
canard_levels_t singular_canard(const params& pars, double u);

// Takeoff/touchdown asymmetry of the fast jump over base height v0:
//   height = sqrt(eps)(u_s - A)/lambda
//          + eps (3 lambda / v0) tanh(1/(2 sqrt(eps))) (1 + (lambda^2/2) sech^2(1/(2 sqrt(eps))))
// with takeoff at q = -height, touchdown at q = +height.
struct jump_data_t {
    double height = 0.0;
    double q_takeoff = 0.0;
    double q_touchdown = 0.0;
    double delta_q = 0.0; // 2 * height
};
jump_data_t takeoff_touchdown(const params& pars, double v0);

// Increment of v across the fast window for base vertical speed q0.
double jump_delta_v(const params& pars, double v0, double q0);

// Leading Melnikov coefficient of the layer-Hamiltonian splitting:
// D1 = (6 q0 / (5 v0)) (2 u_c^2 + u_c u_s + 2 u_s^2) lambda(v0).
double splitting_distance(const params& pars, double v0, double q0);

// Half-width 1/(sqrt(eps) lambda(v0)) of the fast window in xi.
double fast_window_halfwidth(const params& pars, double v0);

// Composite fast-pulse approximation at touchdown height v0: layer pulse in
// (u, p), frozen v, and the odd q profile accumulated across the window.
phase_point fast_pulse(const params& pars, double v0, double xi);

// Singular canards of the folded saddle (B > 1) in the rescaling chart of the
// fold blow-up; sign selects the branch. Valid on the fast-square system
// rfs_field below, which freezes the blow-up radius at zero.
struct rfs_state {
    double U2 = 0.0, P2 = 0.0, V2 = 0.0, Q2 = 0.0;
};
rfs_state rfs_canard(const params& pars, double y2, int sign);
rfs_state rfs_field(const params& pars, const rfs_state& s);

} // namespace canard
