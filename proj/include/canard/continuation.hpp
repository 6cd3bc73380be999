#pragma once
// Pseudo-arclength continuation over collocation boundary-value solutions:
// single branches, fold (saddle-node) detection, and the two-parameter
// (B, k) sweep that assembles the existence surface and its fold curve.
//
// Continuation works on branch-form problems (n_bc = n + n_scalars - 1):
// one scalar is designated the free parameter and the missing row is the
// arclength condition tying each corrector solve to the previous point.
// Tangents and step lengths live in the reduced space of the boundary
// trace plus scalars (ya, yb, scalars); the orbit interior is slaved to it
// through the corrector. Every orbit family here moves its boundary data
// along the branch (section endpoints sit at pattern extrema, connection
// endpoints ride the base points), so folds remain regular points of the
// reduced arclength parameterization while natural parameterization in the
// bare parameter becomes singular.

#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "canard/bvp.hpp"
#include "canard/model.hpp"

namespace canard::cont {

struct continuation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// the supplied start point does not solve its problem to tolerance
struct start_not_converged : continuation_error {
    using continuation_error::continuation_error;
};
// repeated corrector failures drove the step below ds_min
struct step_collapse : continuation_error {
    using continuation_error::continuation_error;
};

// Scalar diagnostics attached to each accepted point; must be recomputable
// from the stored solution alone (idempotent).
using monitor_fn =
    std::function<std::map<std::string, double>(const bvp::orbit_segment&, double parameter)>;

struct options {
    double ds0 = 0.01;   // initial arclength step
    double ds_min = 1e-6;
    double ds_max = 0.5;
    int direction = +1;  // initial sign of d(parameter)/ds
    int max_steps = 400;
    // the run stops once the free parameter leaves [par_min, par_max]
    double par_min = -std::numeric_limits<double>::infinity();
    double par_max = std::numeric_limits<double>::infinity();
    int grow_after = 3;        // consecutive successes before the step grows
    double grow_factor = 1.3;  // growth rate, clamped to [ds_min, ds_max]
    bvp::solve_options solver; // corrector settings
};

struct point {
    bvp::orbit_segment solution;
    double parameter = 0.0;
    std::map<std::string, double> monitors;
    bool fold = false;
    bool user_point = false;
};

struct branch {
    std::vector<point> points;
    std::vector<double> steps; // arclength used from point i to point i+1
    bvp::problem problem;      // the branch-form problem the points solve
    int free_index = 0;        // scalar index of the free parameter
    std::string parameter_name;
};

// Keller predictor-corrector from a converged start. The free parameter is
// scalar free_index of the problem. Halves the step on corrector failure
// and grows it by grow_factor after grow_after successes; stops at the step
// cap, at the parameter bounds, or (exceptionally) when the step collapses.
branch continue_branch(const bvp::problem& p, const bvp::orbit_segment& start,
                       int free_index, const std::string& parameter_name,
                       const options& opts, const monitor_fn& monitors = {});

// Folds of the free parameter along a computed branch: a sign change of the
// parameter component of the (secant) tangent, refined by secant iteration
// on that component until |d parameter / d s| <= 1e-8. Returns the refined
// fold points (flagged fold = true); an empty result means no fold.
std::vector<point> detect_fold(const branch& br, const options& opts = {},
                               const monitor_fn& monitors = {});

// Monitors for the spatially periodic families: max u, min u, and the L2
// and H1 distances of the full symmetric orbit to the homogeneous state
// (A, B/A), with B taken from the branch parameter when parameter_name is
// "B" and from the template otherwise. Derivatives use the flow itself
// (u' = p, v' = eps q), so no numerical differentiation enters.
monitor_fn pattern_monitors(const params& tmpl, const std::string& parameter_name);

// One slice of the existence surface: the branch continued in the slice's
// moving parameter, its refined folds, and a per-slice error message
// (nonempty means the slice failed and was skipped; the sweep continues).
// Fixed-k slices (sweep_bk) set k and leave B as NaN; fixed-B slices
// (sweep_kb) set B and leave k as NaN.
struct slice_result {
    double k = std::numeric_limits<double>::quiet_NaN();
    double B = std::numeric_limits<double>::quiet_NaN();
    branch br;
    std::vector<point> folds;
    std::string error;
};

struct surface_row {
    double B = 0.0, k = 0.0, max_u = 0.0, min_u = 0.0, l2 = 0.0;
    bool fold = false;
};

struct sweep_result {
    std::vector<slice_result> slices;
    std::vector<surface_row> rows; // every accepted point plus refined folds
};

// slice defaults for the sweeps: the concentration-step cap sits low (folds
// are tight in B), and the step budget is sized for onset-to-fold descents
// that cross most of the concentration window; the period runs of sweep_kb
// re-tune their own step caps to the wavenumber window
inline options sweep_slice_defaults() {
    options o;
    o.ds_max = 0.05;
    o.max_steps = 3000;
    return o;
}

struct sweep_options {
    options slice = sweep_slice_defaults();
    double onset_margin = 0.01; // slice start: onset concentration minus this
    int seed_intervals = 80;    // mesh for the onset-pattern seed ladder
    bvp::solve_options start;   // settings for the onset start solves
    double bridge_B = 0.0;      // rescue hop concentration; 0: window midpoint
    // Folds whose pattern amplitude max|u - A| falls below this are
    // discarded: a branch that collapses onto the homogeneous solution can
    // flip its parameter tangent at the jump, and that artifact must not be
    // reported as a saddle-node. Points below amp 1e-7 are likewise kept out
    // of the emitted surface rows.
    double fold_min_amplitude = 0.02;
};

// Two-parameter sweep over fixed-k slices. Each slice starts on the
// nontrivial pattern branch just below that wavenumber's own onset
// concentration (the root in B of the dispersion determinant), found by
// retreating the onset margin and walking a seed-amplitude ladder until a
// nontrivial solve sticks, and is then continued downward in B toward B_lo,
// turning through folds onto the second sheet until B climbs back past the
// onset (or B_hi if that is larger) or the step cap ends it. A slice whose
// onset refuses to start is bridged from the nearest settled slice by
// continuing the period at fixed concentration until the wavenumber matches;
// a slice that settles without folds is additionally bridged onto the
// nearest fold-carrying slice's large-amplitude sheet, because at small
// wavenumbers the onset family and the pulse family are disconnected, and
// the second route is merged into the slice (such a branch carries one seam
// where the routes join; the sweep detects folds per route, never across
// the seam). Remaining failures are recorded and the sweep continues. Rows
// hold (B, k, max u, min u, L2, fold flag) for every accepted point; the
// plotting transforms of the published surface are applied only at export,
// never stored.
sweep_result sweep_bk(const params& tmpl, double B_lo, double B_hi,
                      const std::vector<double>& k_grid, const sweep_options& opts = {});

// The transposed sweep: fixed-B slices continued in the period. An auxiliary
// fixed-k spine (a ladder of candidates below the critical wavenumber,
// clamped into [k_lo, k_hi]) is continued downward in B until it turns
// through its saddle-node onto the large-amplitude sheet; each slice hops
// onto the spine's large-amplitude point nearest its requested concentration
// (snapping the slice's B to that point, within the 0.02 hop tolerance), and
// is then continued in T both ways from the hop until the wavenumber leaves
// [k_lo, k_hi] or the step cap ends it, turning through any period-folds on
// the way. This is the slicing that crosses the saddle-node curve
// transversally at high wavenumber, where fixed-k slices run nearly
// parallel to it. Rows carry k = 2 pi / (eps T) per point; fold rows are
// the refined period-folds. Slice failures are recorded and the sweep
// continues.
sweep_result sweep_kb(const params& tmpl, double k_lo, double k_hi,
                      const std::vector<double>& B_grid, const sweep_options& opts = {});

// One point per line: parameters, monitors, flags, and the orbit-file path
// provided by the callback (empty callback writes an empty path).
void write_branch_jsonl(const branch& br, const std::string& path,
                        const std::function<std::string(int)>& orbit_path = {});

// Aggregate surface table: header `B,k,max_u,min_u,l2,fold_flag`, one row
// per surface point, full double precision.
void write_surface_csv(const sweep_result& s, const std::string& path);

} // namespace canard::cont
