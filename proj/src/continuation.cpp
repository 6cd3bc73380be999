#include "canard/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <utility>

#include "json.hpp"

#include "canard/linear.hpp"
#include "canard/problems.hpp"

namespace canard::cont {

namespace {

// reduced continuation space: boundary trace plus scalars
Eigen::VectorXd reduced_state(const bvp::orbit_segment& seg) {
    const int n = seg.dimension();
    const int S = static_cast<int>(seg.scalars.size());
    Eigen::VectorXd x(2 * n + S);
    x.head(n) = seg.nodes.col(0);
    x.segment(n, n) = seg.nodes.col(seg.intervals());
    x.tail(S) = seg.scalars;
    return x;
}

// square problem: branch-form rows plus the arclength row
// tau . (x - x_base) = ds in the reduced space
bvp::problem with_arclength(const bvp::problem& base, Eigen::VectorXd tau,
                            Eigen::VectorXd x_base, double ds) {
    bvp::problem q = base;
    q.n_bc = base.n_bc + 1;
    q.bc = [bc = base.bc, tau = std::move(tau), x_base = std::move(x_base), ds,
            n = base.n](const Eigen::VectorXd& ya, const Eigen::VectorXd& yb,
                        const Eigen::VectorXd& scal, Eigen::VectorXd& g) {
        Eigen::VectorXd gb;
        bc(ya, yb, scal, gb);
        g.resize(gb.size() + 1);
        g.head(gb.size()) = gb;
        g(gb.size()) = tau.head(n).dot(ya - x_base.head(n)) +
                       tau.segment(n, n).dot(yb - x_base.segment(n, n)) +
                       tau.tail(scal.size()).dot(scal - x_base.tail(scal.size())) -
                       ds;
    };
    return q;
}

// one Keller step of (signed) length ds from a converged point; prev (when
// given) supplies the secant extrapolation of the orbit interior
bvp::orbit_segment take_step(const bvp::problem& p, const bvp::orbit_segment& from,
                             const bvp::orbit_segment* prev, double ds_prev,
                             const Eigen::VectorXd& tau, double ds,
                             const bvp::solve_options& sopts) {
    const int n = p.n;
    const int S = p.n_scalars;
    Eigen::VectorXd scal_pred = from.scalars + ds * tau.tail(S);
    const double ratio = (prev != nullptr && ds_prev != 0.0) ? ds / ds_prev : 0.0;
    const auto guess = [&](double s) {
        Eigen::VectorXd y = from.eval(s);
        if (ratio != 0.0) y += ratio * (y - prev->eval(s));
        return y.head(n).eval();
    };
    const bvp::problem q = with_arclength(p, tau, reduced_state(from), ds);
    const auto init =
        bvp::initial_segment(q, from.mesh, from.stage_count, guess, scal_pred);
    return bvp::solve_collocation(q, init, sopts);
}

void check_branch_form(const bvp::problem& p, int free_index) {
    if (p.n_bc != p.n + p.n_scalars - 1)
        throw std::invalid_argument(
            "continuation: problem must be one row short of square (branch form)");
    if (free_index < 0 || free_index >= p.n_scalars)
        throw std::invalid_argument("continuation: free_index out of range");
}

point make_point(bvp::orbit_segment seg, int free_index, const monitor_fn& monitors) {
    point pt;
    pt.parameter = seg.scalars(free_index);
    if (monitors) pt.monitors = monitors(seg, pt.parameter);
    pt.solution = std::move(seg);
    return pt;
}

} // namespace

branch continue_branch(const bvp::problem& p, const bvp::orbit_segment& start,
                       int free_index, const std::string& parameter_name,
                       const options& opts, const monitor_fn& monitors) {
    check_branch_form(p, free_index);
    branch br;
    br.problem = p;
    br.free_index = free_index;
    br.parameter_name = parameter_name;

    const int n = p.n, S = p.n_scalars;
    const int dim = 2 * n + S;
    Eigen::VectorXd e_par = Eigen::VectorXd::Zero(dim);
    e_par(2 * n + free_index) = opts.direction >= 0 ? 1.0 : -1.0;

    // snap the start onto the branch: the parameter-pinned square problem
    // must accept it essentially as-is
    bvp::orbit_segment cur;
    try {
        cur = take_step(p, start, nullptr, 0.0, e_par, 0.0, opts.solver);
    } catch (const bvp::bvp_error& ex) {
        throw start_not_converged(std::string("continuation start: ") + ex.what());
    }
    br.points.push_back(make_point(cur, free_index, monitors));

    Eigen::VectorXd tau = e_par;
    bvp::orbit_segment prev;
    bool have_prev = false;
    double ds = std::clamp(opts.ds0, opts.ds_min, opts.ds_max);
    double ds_prev = 0.0;
    int successes = 0;

    for (int step = 0; step < opts.max_steps; ++step) {
        bvp::orbit_segment next;
        bool collapsed = false;
        while (true) {
            try {
                next = take_step(p, cur, have_prev ? &prev : nullptr, ds_prev, tau, ds,
                                 opts.solver);
                break;
            } catch (const bvp::bvp_error&) {
                successes = 0;
                ds *= 0.5;
                if (ds < opts.ds_min) {
                    collapsed = true;
                    break;
                }
            }
        }
        if (collapsed) {
            // a branch that has moved at all ends here; one that never moved
            // is an error the caller must know about
            if (br.points.size() >= 2) break;
            throw step_collapse("continuation step collapsed below ds_min");
        }

        const Eigen::VectorXd sec = reduced_state(next) - reduced_state(cur);
        const double dist = sec.norm();
        br.steps.push_back(dist);
        br.points.push_back(make_point(next, free_index, monitors));
        tau = sec / dist;
        prev = std::move(cur);
        have_prev = true;
        ds_prev = dist;
        cur = std::move(next);

        if (++successes >= opts.grow_after) {
            successes = 0;
            ds = std::min(ds * opts.grow_factor, opts.ds_max);
        }
        const double par = cur.scalars(free_index);
        if (par < opts.par_min || par > opts.par_max) break;
    }
    return br;
}

std::vector<point> detect_fold(const branch& br, const options& opts,
                               const monitor_fn& monitors) {
    std::vector<point> out;
    const auto& P = br.points;
    if (P.size() < 3) return out;
    const int f = br.free_index;

    // secant tangents of the parameter per interval
    std::vector<double> t(P.size() - 1);
    for (std::size_t i = 0; i + 1 < P.size(); ++i)
        t[i] = (P[i + 1].parameter - P[i].parameter) / br.steps[i];

    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i - 1] * t[i] < 0.0)) continue;

        // refine around P[i]: secant iteration on the parameter component of
        // the tangent, sampled over the most recent sub-step
        bvp::orbit_segment c = P[i].solution;      // current center
        bvp::orbit_segment side = P[i + 1].solution; // secant partner for prediction
        Eigen::VectorXd tau =
            (reduced_state(P[i + 1].solution) - reduced_state(P[i - 1].solution));
        tau /= tau.norm();
        // samples (arc position of interval midpoint relative to c, slope)
        double s1 = -0.5 * br.steps[i - 1], g1 = t[i - 1];
        double s2 = +0.5 * br.steps[i], g2 = t[i];
        double gc = g2;
        for (int it = 0; it < 60 && std::abs(gc) > 1e-8; ++it) {
            double target = s2 - g2 * (s2 - s1) / (g2 - g1);
            if (!std::isfinite(target)) break;
            // step from the center to the estimated fold position
            double h = target;
            if (h == 0.0) break;
            bvp::orbit_segment moved;
            bool ok = false;
            for (int halve = 0; halve < 8; ++halve) {
                try {
                    double dsp = (reduced_state(c) - reduced_state(side)).norm();
                    moved = take_step(br.problem, c, &side, -dsp, tau, h, opts.solver);
                    ok = true;
                    break;
                } catch (const bvp::bvp_error&) {
                    h *= 0.5;
                }
            }
            if (!ok) break;
            gc = (moved.scalars(f) - c.scalars(f)) / h;
            // keep sample positions relative to the new center (at h)
            s1 = s2 - h;
            g1 = g2;
            s2 = -0.5 * h; // midpoint of the sub-step just taken
            g2 = gc;
            side = c;
            c = std::move(moved);
        }
        point fp = make_point(std::move(c), f, monitors);
        fp.fold = true;
        out.push_back(std::move(fp));
    }
    return out;
}

monitor_fn pattern_monitors(const params& tmpl, const std::string& parameter_name) {
    return [tmpl, parameter_name](const bvp::orbit_segment& seg,
                                  double par) -> std::map<std::string, double> {
        params loc = tmpl;
        if (parameter_name == "B") loc.B = par;
        const double uh = loc.A, vh = loc.B / loc.A;
        const int M = 800;
        double mx = -std::numeric_limits<double>::infinity();
        double mn = std::numeric_limits<double>::infinity();
        double i2 = 0.0, ih = 0.0;
        for (int j = 0; j <= M; ++j) {
            const double w = (j == 0 || j == M) ? 0.5 : 1.0;
            const phase_point y = eval_symmetric(seg, static_cast<double>(j) / M);
            const double du = y.u - uh, dv = y.v - vh;
            i2 += w * (du * du + dv * dv);
            ih += w * (y.p * y.p + loc.eps * loc.eps * y.q * y.q);
            mx = std::max(mx, y.u);
            mn = std::min(mn, y.u);
        }
        return {{"max_u", mx},
                {"min_u", mn},
                {"l2", std::sqrt(i2 / M)},
                {"h1", std::sqrt((i2 + ih) / M)}};
    };
}

namespace {

// land on the nontrivial pattern branch just below the onset concentration
// of wavenumber k (the root in B of the dispersion determinant, which is
// linear in B with slope -k^2): retreat the margin and walk the
// seed-amplitude ladder until a nontrivial solve sticks; returns the
// segment and the concentration it solved at
std::optional<std::pair<bvp::orbit_segment, double>> onset_start(
    const params& tmpl, double k, const sweep_options& opts, std::string& err) {
    const double B_on = tmpl.B + dispersion(tmpl, k).det / (k * k);
    params loc = tmpl;
    err = "onset seed ladder exhausted";
    for (double m = opts.onset_margin; m > opts.onset_margin / 300.0; m /= 4.0) {
        loc.B = B_on - m;
        const auto prob = pin_scalar(periodic_problem(loc, k), 1, loc.B);
        for (const double a : {0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) {
            try {
                auto seg = bvp::solve_collocation(
                    prob, turing_seed(loc, k, a, opts.seed_intervals), opts.start);
                double mx = 0.0;
                for (int j = 0; j <= 200; ++j)
                    mx = std::max(mx, std::abs(seg.eval(j / 200.0)(0) - loc.A));
                if (mx > 1e-7) return std::make_pair(std::move(seg), loc.B);
                err = "seed converged to the homogeneous state";
            } catch (const bvp::bvp_error& ex) {
                err = ex.what();
            }
        }
    }
    return std::nullopt;
}

// a point whose pattern amplitude max|u - A| has collapsed to the
// homogeneous state: branches that jump onto the trivial solution (it
// solves the periodic problem at every period) produce such points, and
// the tangent flip at the jump must not read as a saddle-node
bool trivial_amplitude(const point& pt, double A, double tol) {
    return std::max(pt.monitors.at("max_u") - A, A - pt.monitors.at("min_u")) < tol;
}

} // namespace

sweep_result sweep_bk(const params& tmpl, double B_lo, double B_hi,
                      const std::vector<double>& k_grid, const sweep_options& opts) {
    sweep_result out;

    std::vector<double> ks(k_grid);
    std::sort(ks.begin(), ks.end());
    out.slices.resize(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) out.slices[i].k = ks[i];

    const auto mon = pattern_monitors(tmpl, "B");

    // continue one slice downward in B from a converged pattern
    const auto run_slice = [&](slice_result& sl, const bvp::orbit_segment& start,
                               double start_B) {
        options o = opts.slice;
        o.direction = -1;
        o.par_min = B_lo;
        o.par_max = std::max(B_hi, start_B + opts.onset_margin);
        sl.br = continue_branch(periodic_problem(tmpl, sl.k), start, 1, "B", o, mon);
        sl.folds = detect_fold(sl.br, o, mon);
        std::erase_if(sl.folds, [&](const point& f) {
            return trivial_amplitude(f, tmpl.A, opts.fold_min_amplitude);
        });
        sl.error.clear();
    };

    // pass 1: start each slice on its own onset
    for (auto& sl : out.slices) {
        auto st = onset_start(tmpl, sl.k, opts, sl.error);
        if (!st) continue;
        try {
            run_slice(sl, st->first, st->second);
        } catch (const continuation_error& ex) {
            sl.error = ex.what();
        }
    }

    // pass 2: slices whose onset refused to start are bridged from the
    // nearest settled slice: hop onto that branch at the bridge
    // concentration, continue the period at fixed B until the wavenumber
    // matches, and slice downward from there
    const double B_br =
        opts.bridge_B > 0.0 ? opts.bridge_B : 0.5 * (B_lo + B_hi);
    const auto bridge = [&](const branch& src, double k_dst) {
        // a branch passes a concentration once per sheet; prefer the
        // large-amplitude sheet among the points near the bridge
        // concentration, falling back to the nearest parameter
        const point* hop = nullptr;
        for (const auto& pt : src.points)
            if (std::abs(pt.parameter - B_br) <= 0.05 &&
                (hop == nullptr ||
                 pt.monitors.at("max_u") > hop->monitors.at("max_u")))
                hop = &pt;
        if (hop == nullptr)
            for (const auto& pt : src.points)
                if (hop == nullptr ||
                    std::abs(pt.parameter - B_br) < std::abs(hop->parameter - B_br))
                    hop = &pt;
        params pb = tmpl;
        pb.B = hop->parameter;
        const auto probT = periodic_problem(pb, k_dst, periodic_pin::concentration);
        const double T_dst = period_from_wavenumber(pb, k_dst);
        const double T0 = hop->solution.scalars(0);

        options o = opts.slice;
        o.direction = T_dst > T0 ? +1 : -1;
        o.ds0 = std::max(o.ds0, 0.01 * std::abs(T_dst - T0));
        o.ds_max = std::max(o.ds_max, 0.08 * std::abs(T_dst - T0));
        if (o.direction > 0) {
            o.par_min = 0.0;
            o.par_max = T_dst;
        } else {
            o.par_min = T_dst;
            o.par_max = std::numeric_limits<double>::infinity();
        }
        const branch bb = continue_branch(probT, hop->solution, 0, "T", o);
        const auto& L = bb.points.back().solution;
        if (bb.points.size() < 2 ||
            (o.direction > 0 ? L.scalars(0) < T_dst : L.scalars(0) > T_dst))
            throw step_collapse("bridge ended before reaching the target period");

        // controlled final hop onto the target period
        const auto& P = bb.points[bb.points.size() - 2].solution;
        Eigen::VectorXd tau = reduced_state(L) - reduced_state(P);
        const double dist = tau.norm();
        tau /= dist;
        const double tT = tau(2 * probT.n);
        if (std::abs(tT) < 1e-6)
            throw step_collapse("bridge stalled at a period fold");
        const auto seg = take_step(probT, L, &P, dist, tau,
                                   (T_dst - L.scalars(0)) / tT, opts.slice.solver);
        return std::make_pair(seg, pb.B);
    };

    std::vector<int> last_source(ks.size(), -1);
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            auto& sl = out.slices[i];
            if (sl.error.empty()) continue;
            int src = -1;
            for (std::size_t j = 0; j < ks.size(); ++j)
                if (out.slices[j].error.empty() && !out.slices[j].br.points.empty() &&
                    (src < 0 || std::abs(ks[j] - ks[i]) < std::abs(ks[src] - ks[i])))
                    src = static_cast<int>(j);
            if (src < 0 || src == last_source[i]) continue;
            last_source[i] = src;
            try {
                const auto [start, start_B] = bridge(out.slices[src].br, ks[i]);
                run_slice(sl, start, start_B);
                progress = true;
            } catch (const std::exception& ex) {
                sl.error += std::string("; bridge: ") + ex.what();
            }
        }
    }

    // pass 3: a settled slice without folds may have landed on a family
    // disconnected from the saddle-node sheet (at small wavenumbers the
    // onset family descends past the fold concentration without turning);
    // bridge onto the nearest fold-carrying slice's large-amplitude sheet
    // and continue a second route at this wavenumber, merging it in. The
    // merged branch carries one seam where the routes join, so folds are
    // detected per route, never across the seam.
    std::vector<int> last_source3(ks.size(), -1);
    progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            auto& sl = out.slices[i];
            if (!sl.error.empty() || !sl.folds.empty() || sl.br.points.empty())
                continue;
            int src = -1;
            for (std::size_t j = 0; j < ks.size(); ++j)
                if (j != i && out.slices[j].error.empty() && !out.slices[j].folds.empty() &&
                    (src < 0 || std::abs(ks[j] - ks[i]) < std::abs(ks[src] - ks[i])))
                    src = static_cast<int>(j);
            if (src < 0 || src == last_source3[i]) continue;
            last_source3[i] = src;
            slice_result second;
            second.k = sl.k;
            second.error = "pending";
            try {
                const auto [start, start_B] = bridge(out.slices[src].br, ks[i]);
                run_slice(second, start, start_B);
            } catch (const std::exception&) {
                continue; // this wavenumber may genuinely carry no second sheet
            }
            const double seam = (reduced_state(sl.br.points.back().solution) -
                                 reduced_state(second.br.points.front().solution))
                                    .norm();
            sl.br.steps.push_back(seam);
            sl.br.points.insert(sl.br.points.end(),
                                std::make_move_iterator(second.br.points.begin()),
                                std::make_move_iterator(second.br.points.end()));
            sl.br.steps.insert(sl.br.steps.end(), second.br.steps.begin(),
                               second.br.steps.end());
            sl.folds.insert(sl.folds.end(),
                            std::make_move_iterator(second.folds.begin()),
                            std::make_move_iterator(second.folds.end()));
            if (!sl.folds.empty()) progress = true;
        }
    }

    for (const auto& sl : out.slices) {
        for (const auto& pt : sl.br.points) {
            if (trivial_amplitude(pt, tmpl.A, 1e-7)) continue;
            out.rows.push_back({pt.parameter, sl.k, pt.monitors.at("max_u"),
                                pt.monitors.at("min_u"), pt.monitors.at("l2"), false});
        }
        for (const auto& pt : sl.folds)
            out.rows.push_back({pt.parameter, sl.k, pt.monitors.at("max_u"),
                                pt.monitors.at("min_u"), pt.monitors.at("l2"), true});
    }
    return out;
}

sweep_result sweep_kb(const params& tmpl, double k_lo, double k_hi,
                      const std::vector<double>& B_grid, const sweep_options& opts) {
    sweep_result out;

    std::vector<double> Bs(B_grid);
    std::sort(Bs.begin(), Bs.end());
    out.slices.resize(Bs.size());
    for (std::size_t i = 0; i < Bs.size(); ++i) out.slices[i].B = Bs[i];
    if (Bs.empty()) return out;

    // Auxiliary spine: a fixed-k slice that rounds its own fold onto the
    // large-amplitude sheet, so that the fixed-B slices can hop on at their
    // own heights on the large side. Near the critical wavenumber the small
    // and large sheets are separate families at fixed k, so the spine must
    // sit at a wavenumber whose slice genuinely folds; walk a ladder of
    // candidates until one does.
    const double k_T = critical_points(tmpl).k_turing;
    std::string aux_err = "no auxiliary wavenumber candidate folded";
    branch aux;
    double k_aux = 0.0;
    for (const double frac : {0.72, 0.6, 0.5, 0.8}) {
        const double kc = std::clamp(frac * k_T, k_lo, k_hi);
        std::string err;
        auto st = onset_start(tmpl, kc, opts, err);
        if (!st) {
            aux_err = err;
            continue;
        }
        options oa = opts.slice;
        oa.direction = -1;
        oa.par_min = 0.05; // descend around the fold, not into a wall
        oa.par_max = std::max(st->second, Bs.back()) + opts.onset_margin;
        oa.ds_max = std::min(oa.ds_max, 0.02); // keep spine points denser than hop tol
        const auto mon = pattern_monitors(tmpl, "B");
        try {
            branch cand =
                continue_branch(periodic_problem(tmpl, kc), st->first, 1, "B", oa, mon);
            if (detect_fold(cand, oa).empty()) {
                aux_err = "auxiliary slice did not fold onto the large sheet";
                continue;
            }
            aux = std::move(cand);
            k_aux = kc;
            break;
        } catch (const continuation_error& ex) {
            aux_err = ex.what();
        }
    }
    if (aux.points.empty()) {
        for (auto& sl : out.slices) sl.error = "auxiliary spine: " + aux_err;
        return out;
    }

    for (auto& sl : out.slices) {
        // hop: the spine passes the slice concentration once per sheet, so
        // first find the tallest in-tolerance point (that fixes the sheet),
        // then take the nearest-parameter point on that sheet
        double mx_hi = 0.0;
        for (const auto& pt : aux.points)
            if (std::abs(pt.parameter - sl.B) <= 0.02)
                mx_hi = std::max(mx_hi, pt.monitors.at("max_u"));
        const point* hop = nullptr;
        for (const auto& pt : aux.points)
            if (std::abs(pt.parameter - sl.B) <= 0.02 &&
                pt.monitors.at("max_u") >= 0.5 * mx_hi &&
                (hop == nullptr ||
                 std::abs(pt.parameter - sl.B) < std::abs(hop->parameter - sl.B)))
                hop = &pt;
        if (hop == nullptr) {
            sl.error = "auxiliary spine did not reach the slice concentration";
            continue;
        }

        // run at the hop's own concentration: forcing the orbit to the
        // requested grid value in one solve can push it off the steep sheet,
        // so the slice snaps to the nearest spine point instead
        params pb = tmpl;
        pb.B = hop->parameter;
        sl.B = pb.B;
        const auto probT = periodic_problem(pb, k_aux, periodic_pin::concentration);
        const auto monT = pattern_monitors(pb, "T");
        options oT = opts.slice;
        oT.par_min = period_from_wavenumber(pb, k_hi);
        oT.par_max = period_from_wavenumber(pb, k_lo);
        // the period dominates the reduced state along these slices; steps
        // sized for the window but capped hard, because an oversized
        // predictor can jump a branch onto the homogeneous solution, which
        // solves the pinned-concentration problem at every period
        const double scale = std::max(1.0, (oT.par_max - oT.par_min) / 200.0);
        oT.ds0 = std::max(oT.ds0, 0.05 * scale);
        oT.ds_max = std::max(oT.ds_max, 0.4 * scale);
        oT.max_steps = std::max(oT.max_steps, 4000);
        try {
            oT.direction = -1;
            branch down = continue_branch(probT, hop->solution, 0, "T", oT, monT);
            oT.direction = +1;
            branch up =
                continue_branch(probT, down.points.front().solution, 0, "T", oT, monT);

            // merge into one chain walked end to end through the hop
            branch& m = sl.br;
            m.problem = down.problem;
            m.free_index = down.free_index;
            m.parameter_name = down.parameter_name;
            m.points.assign(down.points.rbegin(), down.points.rend());
            m.steps.assign(down.steps.rbegin(), down.steps.rend());
            if (up.points.size() > 1) {
                m.points.insert(m.points.end(), up.points.begin() + 1, up.points.end());
                m.steps.insert(m.steps.end(), up.steps.begin(), up.steps.end());
            }

            // a slice that loops back on itself can cross a fold twice
            std::vector<point> uniq;
            for (auto& f : detect_fold(m, oT, monT)) {
                if (trivial_amplitude(f, tmpl.A, opts.fold_min_amplitude)) continue;
                bool dup = false;
                for (const auto& g : uniq)
                    if (std::abs(f.parameter - g.parameter) <
                        1e-6 * (1.0 + std::abs(g.parameter)))
                        dup = true;
                if (!dup) uniq.push_back(std::move(f));
            }
            sl.folds = std::move(uniq);
            sl.error.clear();
        } catch (const continuation_error& ex) {
            sl.error = ex.what();
        }
    }

    for (const auto& sl : out.slices) {
        for (const auto& pt : sl.br.points) {
            if (trivial_amplitude(pt, tmpl.A, 1e-7)) continue;
            out.rows.push_back({sl.B, wavenumber_from_period(tmpl, pt.parameter),
                                pt.monitors.at("max_u"), pt.monitors.at("min_u"),
                                pt.monitors.at("l2"), false});
        }
        for (const auto& pt : sl.folds)
            out.rows.push_back({sl.B, wavenumber_from_period(tmpl, pt.parameter),
                                pt.monitors.at("max_u"), pt.monitors.at("min_u"),
                                pt.monitors.at("l2"), true});
    }
    return out;
}

void write_branch_jsonl(const branch& br, const std::string& path,
                        const std::function<std::string(int)>& orbit_path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_branch_jsonl: cannot open " + path);
    for (std::size_t i = 0; i < br.points.size(); ++i) {
        const auto& pt = br.points[i];
        nlohmann::json j;
        j["parameter_name"] = br.parameter_name;
        j["parameter"] = pt.parameter;
        j["scalars"] = std::vector<double>(pt.solution.scalars.begin(),
                                           pt.solution.scalars.end());
        j["monitors"] = pt.monitors;
        j["flags"] = {{"fold", pt.fold}, {"user_point", pt.user_point}};
        j["orbit_file"] = orbit_path ? orbit_path(static_cast<int>(i)) : std::string();
        f << j.dump() << '\n';
    }
}

void write_surface_csv(const sweep_result& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_surface_csv: cannot open " + path);
    f << "B,k,max_u,min_u,l2,fold_flag\n";
    char buf[160];
    for (const auto& r : s.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.B, r.k,
                      r.max_u, r.min_u, r.l2, r.fold ? 1 : 0);
        f << buf;
    }
}

} // namespace canard::cont
