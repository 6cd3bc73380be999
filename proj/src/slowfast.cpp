#include "canard/slowfast.hpp"

#include <cmath>

namespace canard {

namespace {
double branch_discriminant(const params& pars, double v) {
    const double s = 1.0 + pars.B;
    return s * s - 4.0 * pars.A * v;
}
} // namespace

critical_branches_t critical_branches(const params& pars, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("critical_branches: v must be positive");
    const double disc = branch_discriminant(pars, v);
    if (disc < 0.0)
        throw std::invalid_argument("critical_branches: v lies above the fold");
    const double root = std::sqrt(disc);
    const double s = 1.0 + pars.B;
    return {(s - root) / (2.0 * v), (s + root) / (2.0 * v)};
}

fold_point_t fold_point(const params& pars) {
    const double s = 1.0 + pars.B;
    return {s * s / (4.0 * pars.A), 2.0 * pars.A / s};
}

double layer_rate(const params& pars, double v) {
    const auto br = critical_branches(pars, v);
    return std::sqrt(v * (br.u_c - br.u_s));
}

double saddle_slope(const params& pars, double v) {
    const auto br = critical_branches(pars, v);
    if (!(br.u_c > br.u_s))
        throw std::invalid_argument("saddle_slope: undefined at the fold");
    return br.u_s * br.u_s / (v * (br.u_c - br.u_s));
}

double layer_hamiltonian(const params& pars, double u, double p, double v) {
    return 0.5 * p * p + pars.A * u - 0.5 * (pars.B + 1.0) * u * u + u * u * u * v / 3.0;
}

double rectified_hamiltonian(const params& pars, double uhat, double p, double v) {
    const auto br = critical_branches(pars, v);
    const double gap = br.u_c - br.u_s;
    return 0.5 * p * p + uhat * uhat * v * (uhat / 3.0 - 0.5 * gap);
}

layer_point layer_field(const params& pars, double v, const layer_point& y) {
    return {y.p, -pars.A + (pars.B + 1.0) * y.u - y.u * y.u * v};
}

layer_point layer_pulse(const params& pars, double v, double xi) {
    const auto br = critical_branches(pars, v);
    const double gap = br.u_c - br.u_s;
    if (!(gap > 0.0))
        throw std::invalid_argument("layer_pulse: v must be strictly below the fold");
    const double lam = std::sqrt(v * gap);
    const double se = 1.0 / std::cosh(0.5 * lam * xi);
    const double uhat = 1.5 * gap * se * se;
    const double p = -1.5 * gap * lam * se * se * std::tanh(0.5 * lam * xi);
    return {uhat, p};
}

phase_point slow_manifold_point(const params& pars, double v, double q) {
    const auto br = critical_branches(pars, v);
    const double gap = br.u_c - br.u_s;
    if (!(gap > 0.0))
        throw std::invalid_argument("slow_manifold_point: v must be strictly below the fold");
    return {br.u_s, pars.eps * q * br.u_s * br.u_s / (v * gap), v, q};
}

reduced_point reduced_field(const params& pars, const reduced_point& y) {
    if (!(y.u > 0.0)) throw std::invalid_argument("reduced_field: u must be positive");
    const double u = y.u, A = pars.A, B = pars.B;
    const double dW = (B + 1.0) / u - A * (B + 3.0) / (u * u) + 2.0 * A * A / (u * u * u);
    return {y.q, -dW};
}

double reduced_potential(const params& pars, double u) {
    if (!(u > 0.0)) throw std::invalid_argument("reduced_potential: u must be positive");
    return (pars.B + 1.0) * std::log(u) + pars.A * (pars.B + 3.0) / u -
           pars.A * pars.A / (u * u);
}

double reduced_hamiltonian(const params& pars, double u, double q) {
    return 0.5 * q * q + reduced_potential(pars, u);
}

folded_singularity_t folded_singularity(const params& pars) {
    const double A = pars.A, B = pars.B;
    folded_singularity_t out;
    out.u_M = 2.0 * A / (B + 1.0);
    out.g_at_equilibrium = (1.0 - B) / (A * A);
    out.g_at_fold = std::pow(B + 1.0, 3) * (B - 1.0) / (8.0 * A * A);
    const double tol = 1e-12 * std::max(1.0, std::abs(B));
    if (std::abs(B - 1.0) <= tol)
        out.kind = folded_kind::saddle_node;
    else if (B > 1.0)
        out.kind = folded_kind::saddle;
    else
        out.kind = folded_kind::center;
    if (B >= 1.0) {
        const double s = std::sqrt(std::max(B - 1.0, 0.0)) * std::pow(B + 1.0, 1.5) /
                         (2.0 * std::sqrt(2.0) * A);
        out.slope_true = -s;
        out.slope_faux = s;
    }
    return out;
}

double canard_radicand(const params& pars, double u) {
    const double u_M = 2.0 * pars.A / (pars.B + 1.0);
    return 2.0 * (reduced_potential(pars, u_M) - reduced_potential(pars, u));
}

canard_levels_t singular_canard(const params& pars, double u) {
    const double r = canard_radicand(pars, u);
    if (r < 0.0)
        throw std::invalid_argument("singular_canard: level curve does not reach this u");
    const double q = std::sqrt(r);
    return {q, -q};
}

jump_data_t takeoff_touchdown(const params& pars, double v0) {
    const auto br = critical_branches(pars, v0);
    const double lam = layer_rate(pars, v0);
    if (!(lam > 0.0))
        throw std::invalid_argument("takeoff_touchdown: v0 must be strictly below the fold");
    const double se = std::sqrt(pars.eps);
    const double edge = 0.5 / se; // lambda*xi/2 at the window edge
    const double th = std::tanh(edge);
    const double sech2 = 1.0 / (std::cosh(edge) * std::cosh(edge));
    jump_data_t out;
    out.height = se * (br.u_s - pars.A) / lam +
                 pars.eps * (3.0 * lam / v0) * th * (1.0 + 0.5 * lam * lam * sech2);
    out.q_takeoff = -out.height;
    out.q_touchdown = out.height;
    out.delta_q = 2.0 * out.height;
    return out;
}

double jump_delta_v(const params& pars, double v0, double q0) {
    return 2.0 * std::sqrt(pars.eps) * q0 / layer_rate(pars, v0);
}

double splitting_distance(const params& pars, double v0, double q0) {
    const auto br = critical_branches(pars, v0);
    const double lam = layer_rate(pars, v0);
    return (6.0 * q0 / (5.0 * v0)) *
           (2.0 * br.u_c * br.u_c + br.u_c * br.u_s + 2.0 * br.u_s * br.u_s) * lam;
}

double fast_window_halfwidth(const params& pars, double v0) {
    return 1.0 / (std::sqrt(pars.eps) * layer_rate(pars, v0));
}

phase_point fast_pulse(const params& pars, double v0, double xi) {
    const auto br = critical_branches(pars, v0);
    const double lam = layer_rate(pars, v0);
    const auto lp = layer_pulse(pars, v0, xi);
    const double q = pars.eps * ((br.u_s - pars.A) * xi +
                                 (3.0 * lam / v0) * std::tanh(0.5 * lam * xi) - lp.p);
    return {br.u_s + lp.u, lp.p, v0, q};
}

rfs_state rfs_canard(const params& pars, double y2, int sign) {
    const double A = pars.A, B = pars.B;
    if (!(B > 1.0)) throw std::invalid_argument("rfs_canard: requires B > 1");
    const double sg = sign >= 0 ? 1.0 : -1.0;
    const double c = sg * 2.0 * std::sqrt(2.0) * A * A * std::sqrt(B - 1.0) /
                     std::pow(B + 1.0, 2.5);
    rfs_state s;
    s.U2 = c * y2;
    s.P2 = c;
    s.V2 = -0.5 * A * (B - 1.0) / (B + 1.0) * y2 * y2;
    s.Q2 = -A * (B - 1.0) / (B + 1.0) * y2;
    return s;
}

rfs_state rfs_field(const params& pars, const rfs_state& s) {
    const double A = pars.A, B = pars.B;
    const double c1 = (B + 1.0) * (B + 1.0) / (4.0 * A);
    const double c2 = 4.0 * A * A / ((B + 1.0) * (B + 1.0));
    return {s.P2, -c1 * s.U2 * s.U2 - c2 * s.V2, s.Q2, A * (1.0 - B) / (B + 1.0)};
}

} // namespace canard
