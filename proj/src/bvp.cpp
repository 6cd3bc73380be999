#include "canard/bvp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace canard::bvp {

namespace {

constexpr double kFdEps = 1.4901161193847656e-08; // sqrt(machine epsilon)

double poly_eval(const Eigen::RowVectorXd& coef, double t) {
    double acc = 0.0;
    for (int k = static_cast<int>(coef.size()) - 1; k >= 0; --k) acc = acc * t + coef(k);
    return acc;
}

gauss_scheme make_scheme(int m) {
    gauss_scheme g;
    g.m = m;
    g.c.resize(m);
    g.b.resize(m);

    // Legendre roots on [-1,1] by Newton iteration on the recurrence.
    std::vector<double> roots(m);
    for (int k = 1; k <= m; ++k) {
        double x = std::cos(M_PI * (k - 0.25) / (m + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = m == 1 ? 1.0 : m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        roots[k - 1] = x;
    }
    std::sort(roots.begin(), roots.end());
    for (int k = 0; k < m; ++k) g.c(k) = 0.5 * (1.0 + roots[k]);

    // Monomial coefficients of the Lagrange basis and its antiderivative.
    g.lag.setZero(m, m);
    g.ilag.setZero(m, m + 1);
    for (int j = 0; j < m; ++j) {
        std::vector<double> num{1.0};
        double den = 1.0;
        for (int k = 0; k < m; ++k) {
            if (k == j) continue;
            std::vector<double> nn(num.size() + 1, 0.0);
            for (std::size_t idx = 0; idx < num.size(); ++idx) {
                nn[idx + 1] += num[idx];
                nn[idx] -= g.c(k) * num[idx];
            }
            num = std::move(nn);
            den *= g.c(j) - g.c(k);
        }
        for (int k = 0; k < m; ++k) g.lag(j, k) = num[k] / den;
        for (int k = 0; k < m; ++k) g.ilag(j, k + 1) = g.lag(j, k) / (k + 1);
    }
    g.a.resize(m, m);
    for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l) g.a(j, l) = poly_eval(g.ilag.row(l), g.c(j));
    for (int j = 0; j < m; ++j) g.b(j) = poly_eval(g.ilag.row(j), 1.0);
    return g;
}

int find_interval(const std::vector<double>& mesh, double s) {
    const auto it = std::upper_bound(mesh.begin(), mesh.end(), s);
    const int i = static_cast<int>(it - mesh.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(mesh.size()) - 2);
}

struct residual_set {
    Eigen::MatrixXd stage;    // n x N*m: K - f(stage state)
    Eigen::MatrixXd stage_y;  // n x N*m: stage states (cache for Jacobians)
    Eigen::MatrixXd cont;     // n x N
    Eigen::VectorXd bc;
    Eigen::VectorXd integral;

    double inf_norm() const {
        double r = stage.size() ? stage.cwiseAbs().maxCoeff() : 0.0;
        if (cont.size()) r = std::max(r, cont.cwiseAbs().maxCoeff());
        if (bc.size()) r = std::max(r, bc.cwiseAbs().maxCoeff());
        if (integral.size()) r = std::max(r, integral.cwiseAbs().maxCoeff());
        return r;
    }
    double sumsq() const {
        return stage.squaredNorm() + cont.squaredNorm() + bc.squaredNorm() +
               integral.squaredNorm();
    }
};

void compute_residuals(const problem& p, const gauss_scheme& g, const std::vector<double>& mesh,
                       const Eigen::MatrixXd& nodes, const Eigen::MatrixXd& K,
                       const Eigen::VectorXd& scal, residual_set& R) {
    const int N = static_cast<int>(mesh.size()) - 1;
    const int n = p.n, m = g.m;
    R.stage.resize(n, N * m);
    R.stage_y.resize(n, N * m);
    R.cont.resize(n, N);
    R.bc.resize(p.n_bc);
    R.integral.resize(p.n_integral);
    if (p.n_integral > 0) {
        if (p.integral_offset)
            p.integral_offset(scal, R.integral);
        else
            R.integral.setZero();
    }

    Eigen::VectorXd Y(n), f(n), gint(p.n_integral);
    for (int i = 0; i < N; ++i) {
        const double h = mesh[i + 1] - mesh[i];
        Eigen::VectorXd csum = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < m; ++j) {
            Y = nodes.col(i);
            for (int l = 0; l < m; ++l) Y += h * g.a(j, l) * K.col(i * m + l);
            const double x = mesh[i] + g.c(j) * h;
            p.rhs(x, Y, scal, f);
            R.stage_y.col(i * m + j) = Y;
            R.stage.col(i * m + j) = K.col(i * m + j) - f;
            csum += g.b(j) * K.col(i * m + j);
            if (p.n_integral > 0) {
                p.integrand(x, Y, scal, gint);
                R.integral += h * g.b(j) * gint;
            }
        }
        R.cont.col(i) = nodes.col(i) - nodes.col(i + 1) + h * csum;
    }
    p.bc(nodes.col(0), nodes.col(N), scal, R.bc);
}

// Conform an initial guess to the requested stage count, rebuilding stage
// derivatives when they are absent or of a different degree.
orbit_segment conform(const problem& p, const orbit_segment& initial, int stages) {
    const int N = initial.intervals();
    if (N < 1) throw std::invalid_argument("solve_collocation: mesh needs at least 2 nodes");
    if (initial.nodes.cols() != N + 1 || initial.nodes.rows() != p.n)
        throw std::invalid_argument("solve_collocation: node array shape mismatch");
    if (initial.scalars.size() != p.n_scalars)
        throw std::invalid_argument("solve_collocation: scalar count mismatch");
    if (std::abs(initial.mesh.front()) > 1e-12 || std::abs(initial.mesh.back() - 1.0) > 1e-12)
        throw std::invalid_argument("solve_collocation: mesh must span [0,1]");
    for (int i = 0; i < N; ++i)
        if (!(initial.mesh[i + 1] > initial.mesh[i]))
            throw std::invalid_argument("solve_collocation: mesh must increase strictly");

    const gauss_scheme& g = gauss(stages);
    const bool well_formed = initial.stage_count >= 1 &&
                             initial.stages.cols() == static_cast<long>(N) * initial.stage_count &&
                             initial.stages.rows() == p.n;
    if (well_formed && initial.stage_count == stages) return initial;

    orbit_segment seg;
    seg.mesh = initial.mesh;
    seg.nodes = initial.nodes;
    seg.scalars = initial.scalars;
    seg.stage_count = stages;
    seg.stages.resize(p.n, N * stages);
    Eigen::VectorXd f(p.n);
    for (int i = 0; i < N; ++i) {
        const double h = seg.mesh[i + 1] - seg.mesh[i];
        for (int j = 0; j < stages; ++j) {
            const double x = seg.mesh[i] + g.c(j) * h;
            if (well_formed) {
                seg.stages.col(i * stages + j) = initial.eval_derivative(x);
            } else {
                // linear interpolation of the node values
                const Eigen::VectorXd y =
                    (1.0 - g.c(j)) * initial.nodes.col(i) + g.c(j) * initial.nodes.col(i + 1);
                p.rhs(x, y, seg.scalars, f);
                seg.stages.col(i * stages + j) = f;
            }
        }
    }
    return seg;
}

// One damped-Newton solve on a fixed mesh. Throws on failure.
void newton_on_mesh(const problem& p, const gauss_scheme& g, orbit_segment& seg,
                    const solve_options& opts) {
    const int N = seg.intervals();
    const int n = p.n, m = g.m, S = p.n_scalars;
    const int n_unknown = (N + 1) * n + S;

    residual_set R;
    compute_residuals(p, g, seg.mesh, seg.nodes, seg.stages, seg.scalars, R);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool pattern_ready = false;
    Eigen::SparseMatrix<double> Amat(n_unknown, n_unknown);

    std::vector<Eigen::MatrixXd> Pblk(N), Qblk(N);
    std::vector<Eigen::VectorXd> rhoblk(N);

    Eigen::VectorXd f0(n), fp(n), Yp(n), scalp(seg.scalars.size());
    Eigen::VectorXd gi0(p.n_integral), gip(p.n_integral);

    for (int iter = 0; iter <= opts.max_newton; ++iter) {
        const double rn = R.inf_norm();
        if (!std::isfinite(rn))
            throw non_convergence_error("collocation Newton produced non-finite residuals");
        if (rn <= opts.tol_newton) {
            seg.residual_norm = rn;
            return;
        }
        if (iter == opts.max_newton)
            throw non_convergence_error("collocation Newton did not converge: residual " +
                                        std::to_string(rn) + " after " +
                                        std::to_string(opts.max_newton) + " iterations");

        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(N) * n * (n + 1 + S) +
                      static_cast<std::size_t>(p.n_bc) * (2 * n + S) +
                      static_cast<std::size_t>(p.n_integral) * n_unknown);
        Eigen::VectorXd rhs_global = Eigen::VectorXd::Zero(n_unknown);

        // integral-row accumulators (dense rows)
        Eigen::MatrixXd int_rows;
        Eigen::VectorXd int_rhs;
        if (p.n_integral > 0) {
            int_rows = Eigen::MatrixXd::Zero(p.n_integral, n_unknown);
            int_rhs = -R.integral;
        }

        for (int i = 0; i < N; ++i) {
            const double h = seg.mesh[i + 1] - seg.mesh[i];
            Eigen::MatrixXd T = Eigen::MatrixXd::Identity(m * n, m * n);
            Eigen::MatrixXd Bstack(m * n, n), Lstack(m * n, S);
            Eigen::VectorXd Rstk(m * n);
            Eigen::MatrixXd gradG;  // n_int x (m*n) stage-state gradients
            Eigen::MatrixXd gradGl; // n_int x S
            if (p.n_integral > 0) {
                gradG.setZero(p.n_integral, m * n);
                gradGl.setZero(p.n_integral, S);
            }

            for (int j = 0; j < m; ++j) {
                const double x = seg.mesh[i] + g.c(j) * h;
                const Eigen::VectorXd& Y = R.stage_y.col(i * m + j);
                f0 = seg.stages.col(i * m + j) - R.stage.col(i * m + j);
                if (p.n_integral > 0) p.integrand(x, Y, seg.scalars, gi0);

                for (int k = 0; k < n; ++k) {
                    const double d = kFdEps * (1.0 + std::abs(Y(k)));
                    Yp = Y;
                    Yp(k) += d;
                    p.rhs(x, Yp, seg.scalars, fp);
                    Bstack.block(j * n, k, n, 1) = (fp - f0) / d;
                    if (p.n_integral > 0) {
                        p.integrand(x, Yp, seg.scalars, gip);
                        gradG.col(j * n + k) = (gip - gi0) / d;
                    }
                }
                for (int k = 0; k < S; ++k) {
                    const double d = kFdEps * (1.0 + std::abs(seg.scalars(k)));
                    scalp = seg.scalars;
                    scalp(k) += d;
                    p.rhs(x, Y, scalp, fp);
                    Lstack.block(j * n, k, n, 1) = (fp - f0) / d;
                    if (p.n_integral > 0) {
                        p.integrand(x, Y, scalp, gip);
                        gradGl.col(k) += h * g.b(j) * (gip - gi0) / d;
                    }
                }
                Rstk.segment(j * n, n) = R.stage.col(i * m + j);
            }

            // stage system: block (j,l) of T is d(stage eq j)/d(K_l)
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < m; ++l) {
                    T.block(j * n, l * n, n, n) = -h * g.a(j, l) * Bstack.block(j * n, 0, n, n);
                    if (j == l) T.block(j * n, l * n, n, n) += Eigen::MatrixXd::Identity(n, n);
                }

            Eigen::PartialPivLU<Eigen::MatrixXd> tlu(T);
            Pblk[i] = tlu.solve(Bstack);
            Qblk[i] = S > 0 ? tlu.solve(Lstack) : Eigen::MatrixXd(m * n, 0);
            rhoblk[i] = tlu.solve(Rstk);

            // continuity rows: G_i Δy_i − Δy_{i+1} + H_i Δλ = −C_i + h W ρ_i
            Eigen::MatrixXd WP = Eigen::MatrixXd::Zero(n, n);
            Eigen::MatrixXd WQ = Eigen::MatrixXd::Zero(n, S);
            Eigen::VectorXd Wrho = Eigen::VectorXd::Zero(n);
            for (int j = 0; j < m; ++j) {
                WP += g.b(j) * Pblk[i].block(j * n, 0, n, n);
                if (S > 0) WQ += g.b(j) * Qblk[i].block(j * n, 0, n, S);
                Wrho += g.b(j) * rhoblk[i].segment(j * n, n);
            }
            const Eigen::MatrixXd Gi = Eigen::MatrixXd::Identity(n, n) + h * WP;
            for (int r = 0; r < n; ++r) {
                for (int cidx = 0; cidx < n; ++cidx) {
                    trips.emplace_back(i * n + r, i * n + cidx, Gi(r, cidx));
                    trips.emplace_back(i * n + r, (i + 1) * n + cidx, r == cidx ? -1.0 : 0.0);
                }
                for (int k = 0; k < S; ++k)
                    trips.emplace_back(i * n + r, (N + 1) * n + k, h * WQ(r, k));
            }
            rhs_global.segment(i * n, n) = -R.cont.col(i) + h * Wrho;

            // integral rows
            if (p.n_integral > 0) {
                for (int r = 0; r < p.n_integral; ++r) {
                    Eigen::RowVectorXd alpha = Eigen::RowVectorXd::Zero(n);
                    Eigen::RowVectorXd kappa = Eigen::RowVectorXd::Zero(m * n);
                    for (int j = 0; j < m; ++j) {
                        alpha += h * g.b(j) * gradG.row(r).segment(j * n, n);
                        for (int l = 0; l < m; ++l)
                            kappa.segment(l * n, n) +=
                                h * h * g.b(j) * g.a(j, l) * gradG.row(r).segment(j * n, n);
                    }
                    int_rows.row(r).segment(i * n, n) += alpha + kappa * Pblk[i];
                    if (S > 0)
                        int_rows.row(r).segment((N + 1) * n, S) +=
                            kappa * Qblk[i] + gradGl.row(r);
                    int_rhs(r) += kappa.dot(rhoblk[i]);
                }
            }
        }

        // boundary-condition rows
        {
            const int row0 = N * n;
            Eigen::VectorXd bc0 = R.bc, bcp(p.n_bc);
            for (int k = 0; k < n; ++k) {
                const double d = kFdEps * (1.0 + std::abs(seg.nodes(k, 0)));
                Eigen::VectorXd ya = seg.nodes.col(0);
                ya(k) += d;
                p.bc(ya, seg.nodes.col(N), seg.scalars, bcp);
                const Eigen::VectorXd col = (bcp - bc0) / d;
                for (int r = 0; r < p.n_bc; ++r) trips.emplace_back(row0 + r, k, col(r));
            }
            for (int k = 0; k < n; ++k) {
                const double d = kFdEps * (1.0 + std::abs(seg.nodes(k, N)));
                Eigen::VectorXd yb = seg.nodes.col(N);
                yb(k) += d;
                p.bc(seg.nodes.col(0), yb, seg.scalars, bcp);
                const Eigen::VectorXd col = (bcp - bc0) / d;
                for (int r = 0; r < p.n_bc; ++r) trips.emplace_back(row0 + r, N * n + k, col(r));
            }
            for (int k = 0; k < S; ++k) {
                const double d = kFdEps * (1.0 + std::abs(seg.scalars(k)));
                scalp = seg.scalars;
                scalp(k) += d;
                p.bc(seg.nodes.col(0), seg.nodes.col(N), scalp, bcp);
                const Eigen::VectorXd col = (bcp - bc0) / d;
                for (int r = 0; r < p.n_bc; ++r)
                    trips.emplace_back(row0 + r, (N + 1) * n + k, col(r));
            }
            rhs_global.segment(row0, p.n_bc) = -bc0;
        }

        // integral rows: offset derivative with respect to scalars, then emit
        if (p.n_integral > 0) {
            if (p.integral_offset) {
                Eigen::VectorXd c0(p.n_integral), cp(p.n_integral);
                p.integral_offset(seg.scalars, c0);
                for (int k = 0; k < S; ++k) {
                    const double d = kFdEps * (1.0 + std::abs(seg.scalars(k)));
                    scalp = seg.scalars;
                    scalp(k) += d;
                    p.integral_offset(scalp, cp);
                    int_rows.col((N + 1) * n + k) += (cp - c0) / d;
                }
            }
            const int row0 = N * n + p.n_bc;
            for (int r = 0; r < p.n_integral; ++r) {
                for (int cidx = 0; cidx < n_unknown; ++cidx)
                    trips.emplace_back(row0 + r, cidx, int_rows(r, cidx));
                rhs_global(row0 + r) = int_rhs(r);
            }
        }

        Amat.setFromTriplets(trips.begin(), trips.end());
        if (!pattern_ready) {
            lu.analyzePattern(Amat);
            pattern_ready = true;
        }
        lu.factorize(Amat);
        if (lu.info() != Eigen::Success)
            throw singular_jacobian_error("collocation Newton matrix is singular");
        const Eigen::VectorXd delta = lu.solve(rhs_global);
        if (!delta.allFinite())
            throw singular_jacobian_error("collocation Newton solve returned non-finite step");

        // reconstruct stage corrections interval by interval
        Eigen::MatrixXd dK(n, N * m);
        for (int i = 0; i < N; ++i) {
            Eigen::VectorXd dk = -rhoblk[i];
            dk += Pblk[i] * delta.segment(i * n, n);
            if (S > 0) dk += Qblk[i] * delta.segment((N + 1) * n, S);
            for (int j = 0; j < m; ++j) dK.col(i * m + j) = dk.segment(j * n, n);
        }

        // Armijo backtracking on the squared residual norm
        const double phi0 = R.sumsq();
        double best_phi = std::numeric_limits<double>::infinity();
        double best_t = 0.0;
        residual_set Rt;
        bool accepted = false;
        double t = 1.0;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt, t *= 0.5) {
            Eigen::MatrixXd nodes_t = seg.nodes;
            for (int i = 0; i <= N; ++i) nodes_t.col(i) += t * delta.segment(i * n, n);
            Eigen::VectorXd scal_t = seg.scalars;
            if (S > 0) scal_t += t * delta.segment((N + 1) * n, S);
            const Eigen::MatrixXd K_t = seg.stages + t * dK;
            double phi = std::numeric_limits<double>::infinity();
            try {
                compute_residuals(p, g, seg.mesh, nodes_t, K_t, scal_t, Rt);
                phi = Rt.sumsq();
            } catch (const std::exception&) {
                // Trial point left the domain of the vector field (e.g. a
                // coordinate guard threw); treat as a rejected step.
            }
            if (std::isfinite(phi) && phi < best_phi) {
                best_phi = phi;
                best_t = t;
            }
            if (std::isfinite(phi) && phi <= (1.0 - 2.0 * opts.armijo * t) * phi0) {
                seg.nodes = std::move(nodes_t);
                seg.scalars = std::move(scal_t);
                seg.stages = K_t;
                R = std::move(Rt);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (best_phi < phi0) {
                const double tb = best_t;
                for (int i = 0; i <= N; ++i) seg.nodes.col(i) += tb * delta.segment(i * n, n);
                if (S > 0) seg.scalars += tb * delta.segment((N + 1) * n, S);
                seg.stages += tb * dK;
                compute_residuals(p, g, seg.mesh, seg.nodes, seg.stages, seg.scalars, R);
            } else {
                throw non_convergence_error(
                    "collocation Newton stalled: no residual decrease along the step");
            }
        }
    }
}

} // namespace

double gauss_scheme::basis(int j, double t) const { return poly_eval(lag.row(j), t); }
double gauss_scheme::ibasis(int j, double t) const { return poly_eval(ilag.row(j), t); }

const gauss_scheme& gauss(int stages) {
    if (stages < 1 || stages > 8)
        throw std::invalid_argument("gauss: stage count must be between 1 and 8");
    static std::array<gauss_scheme, 9> cache;
    if (cache[stages].m != stages) cache[stages] = make_scheme(stages);
    return cache[stages];
}

void problem::validate() const {
    if (n <= 0) throw std::invalid_argument("problem: dimension must be positive");
    if (!rhs || !bc) throw std::invalid_argument("problem: rhs and bc are required");
    if (n_bc < 0 || n_integral < 0 || n_scalars < 0)
        throw std::invalid_argument("problem: negative block size");
    if (n_integral > 0 && !integrand)
        throw std::invalid_argument("problem: integral constraints need an integrand");
    if (!square())
        throw std::invalid_argument(
            "problem: need n_bc + n_integral == n + n_scalars for a square system");
}

Eigen::VectorXd orbit_segment::eval(double s) const {
    const gauss_scheme& g = gauss(stage_count);
    const int i = find_interval(mesh, s);
    const double h = mesh[i + 1] - mesh[i];
    const double sig = (s - mesh[i]) / h;
    Eigen::VectorXd y = nodes.col(i);
    for (int j = 0; j < g.m; ++j) y += h * g.ibasis(j, sig) * stages.col(i * g.m + j);
    return y;
}

Eigen::VectorXd orbit_segment::eval_derivative(double s) const {
    const gauss_scheme& g = gauss(stage_count);
    const int i = find_interval(mesh, s);
    const double h = mesh[i + 1] - mesh[i];
    const double sig = (s - mesh[i]) / h;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(nodes.rows());
    for (int j = 0; j < g.m; ++j) d += g.basis(j, sig) * stages.col(i * g.m + j);
    return d;
}

std::vector<double> uniform_mesh(int intervals) {
    if (intervals < 1) throw std::invalid_argument("uniform_mesh: need at least one interval");
    std::vector<double> mesh(intervals + 1);
    for (int i = 0; i <= intervals; ++i) mesh[i] = static_cast<double>(i) / intervals;
    mesh.back() = 1.0;
    return mesh;
}

orbit_segment initial_segment(const problem& p, const std::vector<double>& mesh, int stages,
                              const std::function<Eigen::VectorXd(double)>& guess,
                              const Eigen::VectorXd& scalars) {
    const gauss_scheme& g = gauss(stages);
    const int N = static_cast<int>(mesh.size()) - 1;
    orbit_segment seg;
    seg.mesh = mesh;
    seg.stage_count = stages;
    seg.scalars = scalars;
    seg.nodes.resize(p.n, N + 1);
    seg.stages.resize(p.n, N * stages);
    for (int i = 0; i <= N; ++i) seg.nodes.col(i) = guess(mesh[i]);
    Eigen::VectorXd f(p.n);
    for (int i = 0; i < N; ++i) {
        const double h = mesh[i + 1] - mesh[i];
        for (int j = 0; j < stages; ++j) {
            const double x = mesh[i] + g.c(j) * h;
            p.rhs(x, guess(x), scalars, f);
            seg.stages.col(i * stages + j) = f;
        }
    }
    return seg;
}

orbit_segment resample(const orbit_segment& seg, const std::vector<double>& new_mesh) {
    const gauss_scheme& g = gauss(seg.stage_count);
    const int N = static_cast<int>(new_mesh.size()) - 1;
    orbit_segment out;
    out.mesh = new_mesh;
    out.stage_count = seg.stage_count;
    out.scalars = seg.scalars;
    out.nodes.resize(seg.nodes.rows(), N + 1);
    out.stages.resize(seg.nodes.rows(), N * g.m);
    for (int i = 0; i <= N; ++i) out.nodes.col(i) = seg.eval(new_mesh[i]);
    for (int i = 0; i < N; ++i) {
        const double h = new_mesh[i + 1] - new_mesh[i];
        for (int j = 0; j < g.m; ++j)
            out.stages.col(i * g.m + j) = seg.eval_derivative(new_mesh[i] + g.c(j) * h);
    }
    return out;
}

std::vector<double> error_estimate(const orbit_segment& seg) {
    const gauss_scheme& g = gauss(seg.stage_count);
    const int N = seg.intervals(), n = seg.dimension(), m = g.m;
    Eigen::VectorXd scale(n);
    for (int c = 0; c < n; ++c) scale(c) = 1.0 + seg.nodes.row(c).cwiseAbs().maxCoeff();

    std::vector<double> est(N, 0.0);
    for (int i = 0; i < N; ++i) {
        const double h = seg.mesh[i + 1] - seg.mesh[i];
        // gather m+1 derivative samples: this interval's stages plus the
        // nearest stage of a neighbouring interval
        std::vector<double> xs;
        std::vector<int> cols;
        if (i > 0 && i == N - 1) {
            xs.push_back(seg.mesh[i - 1] + g.c(m - 1) * (seg.mesh[i] - seg.mesh[i - 1]));
            cols.push_back((i - 1) * m + (m - 1));
        }
        for (int j = 0; j < m; ++j) {
            xs.push_back(seg.mesh[i] + g.c(j) * h);
            cols.push_back(i * m + j);
        }
        if (i < N - 1) {
            xs.push_back(seg.mesh[i + 1] + g.c(0) * (seg.mesh[i + 2] - seg.mesh[i + 1]));
            cols.push_back((i + 1) * m + 0);
        }
        const int npts = static_cast<int>(xs.size());
        const int order = npts - 1; // divided-difference order achievable
        double worst = 0.0;
        std::vector<double> vals(npts);
        for (int c = 0; c < n; ++c) {
            for (int q = 0; q < npts; ++q) vals[q] = seg.stages(c, cols[q]);
            for (int lev = 1; lev <= order; ++lev)
                for (int q = 0; q + lev < npts; ++q)
                    vals[q] = (vals[q + 1] - vals[q]) / (xs[q + lev] - xs[q]);
            worst = std::max(worst, std::abs(vals[0]) / scale(c));
        }
        // |y^(order+1)| ~ order! * dd; local interpolation error ~ h^(order+1) / (order+1)!
        est[i] = std::pow(h, order + 1) * worst / (order + 1);
    }
    return est;
}

namespace {

std::vector<double> equidistribute(const std::vector<double>& mesh, const std::vector<double>& est,
                                   int stages, double tol, int cap) {
    const int N = static_cast<int>(mesh.size()) - 1;
    std::vector<double> rho(N);
    double Z = 0.0;
    for (int i = 0; i < N; ++i) {
        rho[i] = std::pow(std::max(est[i], 1e-300), 1.0 / (stages + 1)) / (mesh[i + 1] - mesh[i]);
        Z += rho[i] * (mesh[i + 1] - mesh[i]);
    }
    if (!(Z > 0.0)) return mesh;
    // pad the density so no region fully starves
    double Zpad = 0.0;
    for (int i = 0; i < N; ++i) {
        rho[i] += 0.01 * Z;
        Zpad += rho[i] * (mesh[i + 1] - mesh[i]);
    }
    int n_new = static_cast<int>(std::ceil(Z / std::pow(0.5 * tol, 1.0 / (stages + 1))));
    n_new = std::clamp(n_new, N, std::min(cap, 2 * N));

    std::vector<double> out(n_new + 1);
    out[0] = 0.0;
    out[n_new] = 1.0;
    int i = 0;
    double acc = 0.0; // integral of rho up to mesh[i]
    for (int k = 1; k < n_new; ++k) {
        const double target = Zpad * k / n_new;
        while (i < N - 1 && acc + rho[i] * (mesh[i + 1] - mesh[i]) < target) {
            acc += rho[i] * (mesh[i + 1] - mesh[i]);
            ++i;
        }
        out[k] = mesh[i] + (target - acc) / rho[i];
        out[k] = std::clamp(out[k], mesh[i], mesh[i + 1]);
    }
    for (int k = 1; k <= n_new; ++k)
        if (!(out[k] > out[k - 1])) return mesh; // degenerate; keep old mesh
    return out;
}

} // namespace

orbit_segment solve_collocation(const problem& p, const orbit_segment& initial,
                                const solve_options& opts) {
    p.validate();
    const gauss_scheme& g = gauss(opts.stages);
    orbit_segment seg = conform(p, initial, opts.stages);

    double worst = std::numeric_limits<double>::quiet_NaN();
    for (int round = 0; round <= opts.max_adaptations; ++round) {
        newton_on_mesh(p, g, seg, opts);
        if (!opts.adapt) return seg;
        const std::vector<double> est = error_estimate(seg);
        worst = *std::max_element(est.begin(), est.end());
        if (worst <= opts.tol_mesh) return seg;
        if (round == opts.max_adaptations) break;
        const std::vector<double> refined =
            equidistribute(seg.mesh, est, opts.stages, opts.tol_mesh, opts.max_mesh_intervals);
        seg = resample(seg, refined);
    }
    throw mesh_too_coarse_error("collocation error estimate " + std::to_string(worst) +
                                " exceeds the mesh tolerance at the interval cap");
}

} // namespace canard::bvp
