#include "canard/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "canard/slowfast.hpp"

namespace canard {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

phase_point from_vec(const Eigen::VectorXd& y) { return {y(0), y(1), y(2), y(3)}; }

} // namespace

phase_point rectified_field(const params& pars, const phase_point& yhat) {
    const auto br = critical_branches(pars, yhat.v);
    const double gap = br.u_c - br.u_s;
    const double layer = yhat.v * yhat.u * (gap - yhat.u);
    phase_point f;
    f.u = yhat.p - pars.eps * yhat.q * saddle_slope(pars, yhat.v);
    f.p = layer;
    f.v = pars.eps * yhat.q;
    f.q = pars.eps * (-layer + yhat.u + br.u_s - yhat.v * br.u_s * br.u_c);
    return f;
}

Eigen::Vector4d rectified_base(const params& pars, double v, double q) {
    Eigen::Vector4d b;
    b << 0.0, pars.eps * q * saddle_slope(pars, v), v, q;
    return b;
}

Eigen::Vector4d fiber_vector(const params& pars, double v, int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("fiber_vector: sign must be +1 or -1");
    const double lam = sign * layer_rate(pars, v);
    Eigen::Vector4d w;
    w << 1.0 + pars.eps, lam * (1.0 + pars.eps), 0.0,
        pars.eps * (1.0 - lam * lam) / lam;
    return w.normalized();
}

bvp::problem homoclinic_problem(const params& pars, double delta,
                                homoclinic_closure closure, double anchor) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("homoclinic_problem: delta must lie in (0,1)");
    if (closure == homoclinic_closure::anchor_base && !(anchor > 0.0))
        throw std::invalid_argument("homoclinic_problem: anchor height must be positive");
    bvp::problem p;
    p.n = 4;
    p.n_scalars = 5;
    p.n_bc = 9;
    p.rhs = [pars](double, const Eigen::VectorXd& y, const Eigen::VectorXd& scal,
                   Eigen::VectorXd& f) {
        const phase_point g = rectified_field(pars, from_vec(y));
        f.resize(4);
        f << g.u, g.p, g.v, g.q;
        f *= scal(0);
    };
    p.bc = [pars, delta, closure, anchor](const Eigen::VectorXd& ya, const Eigen::VectorXd& yb,
                                          const Eigen::VectorXd& scal, Eigen::VectorXd& g) {
        const double T = scal(0), v0 = scal(1), q0 = scal(2), v1 = scal(3), q1 = scal(4);
        g.resize(9);
        g.segment<4>(0) =
            ya.head<4>() - (rectified_base(pars, v0, q0) + delta * fiber_vector(pars, v0, +1));
        g.segment<4>(4) =
            yb.head<4>() - (rectified_base(pars, v1, q1) + delta * fiber_vector(pars, v1, -1));
        if (closure == homoclinic_closure::anchor_base) {
            g(8) = v0 - anchor;
        } else if (closure == homoclinic_closure::matched_time && pars.eps > 0.0) {
            const double se = std::sqrt(pars.eps);
            g(8) = T - (1.0 / (se * layer_rate(pars, v0)) +
                        1.0 / (se * layer_rate(pars, v1)));
        } else {
            g(8) = q0;
        }
    };
    return p;
}

double matched_delta(const params& pars, double v0) {
    if (!(pars.eps > 0.0))
        throw std::invalid_argument("matched_delta: requires eps > 0");
    const auto br = critical_branches(pars, v0);
    const double peak = 1.5 * (br.u_c - br.u_s);
    const double w1 = fiber_vector(pars, v0, +1)(0);
    const double c = std::cosh(1.0 / (2.0 * std::sqrt(pars.eps)));
    return peak / (w1 * c * c);
}

bvp::orbit_segment homoclinic_seed(const params& pars, double delta, double v0,
                                   int intervals, int stages) {
    const auto br = critical_branches(pars, v0);
    const double gap = br.u_c - br.u_s;
    const double lam = layer_rate(pars, v0);
    const double peak = 1.5 * gap;
    const double a0 = delta * fiber_vector(pars, v0, +1)(0);
    if (!(a0 > 0.0) || !(a0 < peak))
        throw std::invalid_argument("homoclinic_seed: endpoint height exceeds the pulse");
    const double xi0 = -(2.0 / lam) * std::acosh(std::sqrt(peak / a0));
    const double T = -2.0 * xi0;

    // Composite pulse profile: layer pulse in (uhat, p) plus the odd
    // vertical-speed drift accumulated across the fast window.
    const auto profile = [&](double xi) {
        const phase_point y = fast_pulse(pars, v0, xi);
        Eigen::VectorXd out(4);
        out << y.u - br.u_s, y.p, y.v, y.q;
        return out;
    };
    Eigen::VectorXd scal(5);
    scal << T, v0, profile(xi0)(3), v0, profile(-xi0)(3);
    const auto prob = homoclinic_problem(pars, delta);
    const auto guess = [=](double s) { return profile(xi0 + s * T); };
    return bvp::initial_segment(prob, bvp::uniform_mesh(intervals), stages, guess, scal);
}

bvp::problem periodic_problem(const params& pars, double k, periodic_pin pin) {
    if (!(k > 0.0))
        throw std::invalid_argument("periodic_problem: wavenumber must be positive");
    bvp::problem p;
    p.n = 4;
    p.n_scalars = 2;
    p.n_bc = 5;
    p.rhs = [pars](double, const Eigen::VectorXd& y, const Eigen::VectorXd& scal,
                   Eigen::VectorXd& f) {
        params loc = pars;
        loc.B = scal(1);
        const phase_point g = vector_field(loc, from_vec(y), time_scale::fast);
        f.resize(4);
        f << g.u, g.p, g.v, g.q;
        f *= 0.5 * scal(0);
    };
    const double period = 2.0 * kPi / (pars.eps * k);
    const double b_ref = pars.B;
    p.bc = [pin, period, b_ref](const Eigen::VectorXd& ya, const Eigen::VectorXd& yb,
                                const Eigen::VectorXd& scal, Eigen::VectorXd& g) {
        g.resize(5);
        g << ya(1), ya(3), yb(1), yb(3),
            (pin == periodic_pin::period ? scal(0) - period : scal(1) - b_ref);
    };
    return p;
}

bvp::orbit_segment turing_seed(const params& pars, double k, double amplitude,
                               int intervals, int stages) {
    const double period = 2.0 * kPi / (pars.eps * k);
    const double vhat =
        (pars.d() * k * k - pars.B + 1.0) * amplitude / (pars.A * pars.A);
    Eigen::VectorXd scal(2);
    scal << period, pars.B;
    const auto prob = periodic_problem(pars, k);
    const auto guess = [=](double s) {
        const double c = std::cos(kPi * s), sn = std::sin(kPi * s);
        Eigen::VectorXd y(4);
        y << pars.A + amplitude * c, -amplitude * pars.eps * k * sn,
            pars.B / pars.A + vhat * c, -vhat * pars.eps * k * sn;
        return y;
    };
    return bvp::initial_segment(prob, bvp::uniform_mesh(intervals), stages, guess, scal);
}

namespace {

double anchor_or_default(const params& pars, double u_start) {
    const auto fs = folded_singularity(pars);
    if (u_start < 0.0) u_start = 0.625 * fs.u_M;
    const double u_lo = pars.A / (1.0 + pars.B);
    if (!(u_start > u_lo) || !(u_start < fs.u_M))
        throw std::invalid_argument(
            "maximal_canard: anchor must lie strictly inside the saddle sheet");
    return u_start;
}

// Height of the saddle sheet through u: v u^2 - (B+1) u + A = 0.
double sheet_height(const params& pars, double u) {
    return ((1.0 + pars.B) * u - pars.A) / (u * u);
}

} // namespace

bvp::problem maximal_canard_problem(const params& pars, double u_start) {
    if (!(pars.B > 1.0))
        throw std::invalid_argument("maximal_canard: requires a folded saddle (B > 1)");
    const double u0 = anchor_or_default(pars, u_start);
    const double v0 = sheet_height(pars, u0);
    const double q0 = singular_canard(pars, u0).q_true;

    // Covector annihilating the tangent of the slow-manifold family and the
    // unstable fiber while paying out the stable-fiber coefficient.  Killing
    // only that coefficient at the left end is essential: the orbit rides a
    // slow manifold of saddle type for a fast time of order 1/eps, so any
    // boundary row that pins the unstable-fiber coefficient to an O(eps^2)
    // manifold model is amplified by exp(integral of the fast rate) and the
    // problem loses every solution near the canard.  The unstable coefficient
    // is left free (it converges to an exponentially small value), matching
    // the standard well-conditioned dichotomy splitting for saddle sheets.
    const Eigen::Vector4d wu = fiber_vector(pars, v0, +1);
    const Eigen::Vector4d ws = fiber_vector(pars, v0, -1);
    Eigen::Matrix3d frame;
    frame << 0.0, pars.eps * saddle_slope(pars, v0), 1.0, // slow-family tangent
        wu(0), wu(1), wu(3),                              // unstable fiber
        ws(0), ws(1), ws(3);                              // stable fiber
    const Eigen::Vector3d ell = frame.fullPivLu().solve(Eigen::Vector3d{0.0, 0.0, 1.0});

    bvp::problem p;
    p.n = 4;
    p.n_scalars = 1;
    p.n_bc = 5;
    p.rhs = [pars](double, const Eigen::VectorXd& y, const Eigen::VectorXd& scal,
                   Eigen::VectorXd& f) {
        const phase_point g = vector_field(pars, from_vec(y), time_scale::fast);
        f.resize(4);
        f << g.u, g.p, g.v, g.q;
        f *= scal(0);
    };
    p.bc = [pars, v0, q0, ell](const Eigen::VectorXd& ya, const Eigen::VectorXd& yb,
                               const Eigen::VectorXd&, Eigen::VectorXd& g) {
        const phase_point m = slow_manifold_point(pars, v0, ya(3));
        g.resize(5);
        g << ya(2) - v0,                                   // anchor height
            ya(3) - q0,                                    // singular-canard level
            ell(0) * (ya(0) - m.u) + ell(1) * (ya(1) - m.p) + ell(2) * (ya(3) - m.q),
            yb(1),                                         // symmetry section: p = 0
            yb(3);                                         // symmetry section: q = 0
    };
    return p;
}

bvp::orbit_segment maximal_canard_seed(const params& pars, double u_start,
                                       int intervals, int stages) {
    const double u0 = anchor_or_default(pars, u_start);
    const auto fs = folded_singularity(pars);
    const double margin =
        std::max(1.5 * std::pow(pars.eps, 2.0 / 3.0), 1e-3);
    const double u_stop = fs.u_M - margin;
    if (u_stop <= u0)
        throw std::invalid_argument("maximal_canard_seed: anchor inside the fold margin");

    // March the desingularized reduced flow along the singular true canard.
    reduced_point z{u0, singular_canard(pars, u0).q_true};
    const double dt = 5e-4;
    const int cap = 200000;
    std::vector<double> ts{0.0};
    std::vector<reduced_point> path{z};
    for (int i = 0; i < cap && z.u < u_stop && z.q > 1e-5; ++i) {
        const auto step = [&pars](const reduced_point& y) { return reduced_field(pars, y); };
        const reduced_point k1 = step(z);
        const reduced_point k2 = step({z.u + 0.5 * dt * k1.u, z.q + 0.5 * dt * k1.q});
        const reduced_point k3 = step({z.u + 0.5 * dt * k2.u, z.q + 0.5 * dt * k2.q});
        const reduced_point k4 = step({z.u + dt * k3.u, z.q + dt * k3.q});
        z.u += dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
        z.q += dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
        ts.push_back(ts.back() + dt);
        path.push_back(z);
    }
    const double t_end = ts.back();
    if (!(t_end > 0.0))
        throw std::invalid_argument("maximal_canard_seed: empty reduced-flow path");

    Eigen::VectorXd scal(1);
    scal << t_end / pars.eps;
    const auto prob = maximal_canard_problem(pars, u0);
    const auto guess = [pars, ts, path, t_end](double s) {
        const double t = s * t_end;
        auto it = std::lower_bound(ts.begin(), ts.end(), t);
        std::size_t hi = std::min<std::size_t>(ts.size() - 1,
                                               static_cast<std::size_t>(it - ts.begin()));
        if (hi == 0) hi = 1;
        const std::size_t lo = hi - 1;
        const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
        const double u = (1.0 - w) * path[lo].u + w * path[hi].u;
        const double q = (1.0 - w) * path[lo].q + w * path[hi].q;
        const double v = sheet_height(pars, u);
        Eigen::VectorXd y(4);
        y << u, pars.eps * q * saddle_slope(pars, v), v, q;
        return y;
    };
    return bvp::initial_segment(prob, bvp::uniform_mesh(intervals), stages, guess, scal);
}

bvp::problem pin_scalar(bvp::problem base, int index, double value) {
    if (index < 0 || index >= base.n_scalars)
        throw std::invalid_argument("pin_scalar: scalar index out of range");
    const auto inner = base.bc;
    const int rows = base.n_bc;
    base.bc = [inner, rows, index, value](const Eigen::VectorXd& ya, const Eigen::VectorXd& yb,
                                          const Eigen::VectorXd& scal, Eigen::VectorXd& g) {
        Eigen::VectorXd h;
        inner(ya, yb, scal, h);
        g.resize(rows + 1);
        g.head(rows) = h;
        g(rows) = scal(index) - value;
    };
    base.n_bc = rows + 1;
    return base;
}

phase_point eval_symmetric(const bvp::orbit_segment& half, double s) {
    if (s < 0.0) s = 0.0;
    if (s > 1.0) s = 1.0;
    if (s <= 0.5) return from_vec(half.eval(2.0 * s));
    return reverse(from_vec(half.eval(2.0 - 2.0 * s)));
}

} // namespace canard
