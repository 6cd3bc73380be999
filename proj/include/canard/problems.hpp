#pragma once
// Boundary-value formulations for the orbit families of the spatial dynamics:
// homoclinic connections to the saddle slow manifold, spatially-periodic
// orbits, and maximal canard orbits through the fold region.
//
// All problems are posed on s in [0,1] for the solver in canard/bvp.hpp.
// Reversible orbits (periodic and maximal-canard) are represented by one
// half of the orbit running between symmetry data; the full orbit is the
// reflection-extension provided by eval_symmetric. This avoids the phase
// degeneracy of full-period formulations: symmetric periodic orbits of a
// reversible system come in one-parameter families at fixed parameters, so
// a full-period system with a phase condition is rank-deficient, while the
// symmetric-section endpoints pin the phase structurally.

#include <functional>

#include <Eigen/Dense>

#include "canard/bvp.hpp"
#include "canard/model.hpp"

namespace canard {

// Spatial vector field with the saddle sheet of the critical manifold
// rectified to the (v, q) plane: the u component stores uhat = u - u_s(v).
//   uhat' = p - eps q u_s'(v)
//   p'    = v uhat (u_c - u_s - uhat)
//   v'    = eps q
//   q'    = eps (-v uhat (u_c - u_s - uhat) + uhat + u_s - v u_s u_c)
// Throws std::invalid_argument when v reaches the fold.
phase_point rectified_field(const params& pars, const phase_point& yhat);

// First-order saddle slow manifold point in rectified coordinates over base
// (v, q): (0, eps q u_s'(v), v, q).
Eigen::Vector4d rectified_base(const params& pars, double v, double q);

// Unit vector spanning the first-order unstable (sign=+1) or stable
// (sign=-1) subspace of the saddle slow manifold,
//   [1, lambda, 0, 0] + eps [1, lambda, 0, (1 - lambda^2)/lambda],
// normalized, with lambda = sign * layer_rate(v).
Eigen::Vector4d fiber_vector(const params& pars, double v, int sign);

// Ninth boundary condition closing the homoclinic problem (the endpoint
// rows provide eight conditions for nine unknowns).
enum class homoclinic_closure {
    // T = 1/(sqrt(eps) lambda_u(v0)) - 1/(sqrt(eps) lambda_s(v1)): interval
    // length matched to the exponential closeness of the truncation; which
    // member of the homoclinic family is selected then depends on delta.
    matched_time,
    // q0 = 0: selects the member taking off with zero vertical speed, whose
    // leading-order energy splitting vanishes; used to measure the
    // second-order splitting of the invariant manifolds.
    takeoff_pin,
    // v0 = anchor: selects the member based at a chosen height. Pair with
    // delta = matched_delta(pars, anchor) so the truncation interval stays
    // consistent with the endpoint offset; the matched-time relation then
    // holds approximately instead of being imposed, which conditions the
    // solve far better at small eps (where matched offsets are ~1e-7 and the
    // imposed relation couples T to the base heights too stiffly for Newton).
    anchor_base,
};

// Two-point problem for orbits in the intersection of the unstable and
// stable manifolds of the saddle slow manifold, in rectified coordinates.
// Unknown scalars: [T, v0, q0, v1, q1]. Boundary conditions (9 = 4 + 5):
//   y(0) = base(v0, q0) + delta * fiber(v0, +1)
//   y(1) = base(v1, q1) + delta * fiber(v1, -1)
// plus the closure row above. anchor is used only by anchor_base. For
// eps = 0 the matched-time row is singular (the frozen problem has no
// exponential-closeness relation) and the closure falls back to pinning
// q0 = 0.
bvp::problem homoclinic_problem(const params& pars, double delta = 1e-3,
                                homoclinic_closure closure = homoclinic_closure::matched_time,
                                double anchor = 0.0);

// Endpoint offset for which the natural truncation length of the pulse based
// at v0 equals the matched-time relation: delta = peak / (w1 cosh^2(1/(2
// sqrt(eps)))), with peak the pulse height over v0 and w1 the first component
// of the unstable fiber vector. Solving with this delta (under either the
// matched_time or the anchor_base closure) lands on the member based near
// v0. Requires eps > 0: the offset is exponentially small in 1/sqrt(eps).
double matched_delta(const params& pars, double v0);

// Composite starting segment for homoclinic_problem: the layer pulse over
// frozen height v0 plus the odd vertical-speed drift across the fast window,
// truncated where the pulse meets the delta-offset endpoints.
bvp::orbit_segment homoclinic_seed(const params& pars, double delta, double v0,
                                   int intervals = 160, int stages = 4);

// Which scalar the fifth boundary condition of periodic_problem pins.
enum class periodic_pin {
    period,       // T = 2 pi / (eps k); concentration B varies along a branch
    concentration // B = pars.B; period T varies along a branch
};

// Half-period formulation for spatially-periodic orbits of wavenumber
// k = 2 pi / (eps T): s in [0,1] spans half a period, y' = (T/2) F(y), and
// both endpoints lie on the symmetry section {p = 0, q = 0}. Unknown
// scalars: [T, B]. With the pin condition this is one short of square
// (branch form); use pin_scalar to fix the other scalar for a single solve.
bvp::problem periodic_problem(const params& pars, double k,
                              periodic_pin pin = periodic_pin::period);

// Small-amplitude half-period seed from the linear pattern-forming mode:
//   u = A + a cos(pi s),        p = -a eps k sin(pi s),
//   v = B/A + vhat cos(pi s),   q = -vhat eps k sin(pi s),
// with vhat = (eps^2 k^2 - B + 1) a / A^2.
bvp::orbit_segment turing_seed(const params& pars, double k, double amplitude,
                               int intervals = 80, int stages = 4);

// Symmetric connection from the saddle slow manifold, far from the fold,
// into the symmetry section: the computed half of a maximal canard orbit
// (the full orbit, ending at the reversibility image of the start with the
// section crossing at its midpoint, is recovered by eval_symmetric).
// Unknown scalar: [T]. Boundary conditions (5 = 4 + 1):
//   v(0) = v(u_start), q(0) = singular-canard level at u_start,
//   stable-fiber deviation from the slow manifold at s = 0 is zero,
//   p(1) = 0, q(1) = 0.
// The unstable-fiber deviation at s = 0 is deliberately left free: the arc
// spends a fast time of order 1/eps on a saddle-type sheet, so pinning that
// coefficient against an approximate manifold model is exponentially
// ill-posed, while the free coefficient converges to an exponentially small
// value controlled by the section rows (the usual dichotomy splitting).
// u_start < 0 selects the default anchor 0.625 * u_M on the saddle sheet.
// Requires a folded saddle (B > 1).
bvp::problem maximal_canard_problem(const params& pars, double u_start = -1.0);

// Starting segment for maximal_canard_problem: the reduced flow integrated
// along the singular true canard from u_start toward the folded singularity,
// lifted onto the first-order slow manifold.
bvp::orbit_segment maximal_canard_seed(const params& pars, double u_start = -1.0,
                                       int intervals = 200, int stages = 4);

// Appends the trivial condition scal(index) = value, squaring a branch-form
// problem for a standalone solve.
bvp::problem pin_scalar(bvp::problem base, int index, double value);

// Full-orbit sample of a symmetric half-orbit segment: s in [0, 0.5] maps to
// the stored half, s in [0.5, 1] to its image under R = diag(1,-1,1,-1).
phase_point eval_symmetric(const bvp::orbit_segment& half, double s);

} // namespace canard
