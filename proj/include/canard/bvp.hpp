#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace canard::bvp {

// Collocation data for an m-stage Gauss scheme on [0,1].
struct gauss_scheme {
    int m = 0;
    Eigen::VectorXd c;    // abscissae, ascending
    Eigen::VectorXd b;    // quadrature weights
    Eigen::MatrixXd a;    // Runge-Kutta matrix: a(j,l) = integral of basis l over [0, c_j]
    Eigen::MatrixXd lag;  // lag(j,k): monomial coefficients of the j-th Lagrange basis
    Eigen::MatrixXd ilag; // ilag(j,k): coefficients of its antiderivative (zero constant)

    double basis(int j, double t) const;  // l_j(t)
    double ibasis(int j, double t) const; // integral of l_j over [0, t]
};

// Cached lookup for 1..8 stages.
const gauss_scheme& gauss(int stages);

// Two-point boundary-value problem on s in [0,1] with free scalars:
//   y' = rhs(s, y, scal)
//   bc(y(0), y(1), scal) = 0                            (n_bc rows)
//   integral of integrand(s, y, scal) over [0,1]
//       + integral_offset(scal) = 0                     (n_integral rows)
// The Newton system is square when n_bc + n_integral == n + n_scalars.
struct problem {
    int n = 0;
    int n_scalars = 0;
    int n_bc = 0;
    int n_integral = 0;

    std::function<void(double, const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::VectorXd&)> rhs;
    std::function<void(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&,
                       Eigen::VectorXd&)>
        bc;
    std::function<void(double, const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::VectorXd&)>
        integrand;                                                          // optional
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> integral_offset; // optional

    bool square() const { return n_bc + n_integral == n + n_scalars; }
    void validate() const;
};

// Piecewise-polynomial solution: node values plus per-interval stage
// derivatives of the collocating polynomial.
struct orbit_segment {
    std::vector<double> mesh;  // N+1 nodes, mesh.front()=0, mesh.back()=1
    Eigen::MatrixXd nodes;     // n x (N+1)
    Eigen::MatrixXd stages;    // n x (N*m); column i*m+j holds y'(stage j of interval i)
    Eigen::VectorXd scalars;
    int stage_count = 4;
    double residual_norm = std::numeric_limits<double>::quiet_NaN();

    int dimension() const { return static_cast<int>(nodes.rows()); }
    int intervals() const { return static_cast<int>(mesh.size()) - 1; }

    Eigen::VectorXd eval(double s) const;
    Eigen::VectorXd eval_derivative(double s) const;
};

struct solve_options {
    int stages = 4;
    double tol_newton = 1e-10;
    int max_newton = 25;
    double armijo = 1e-4;
    int max_backtracks = 8;
    bool adapt = true;
    double tol_mesh = 1e-8;
    int max_mesh_intervals = 2000;
    int max_adaptations = 8;
};

struct bvp_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct non_convergence_error : bvp_error {
    using bvp_error::bvp_error;
};
struct singular_jacobian_error : bvp_error {
    using bvp_error::bvp_error;
};
struct mesh_too_coarse_error : bvp_error {
    using bvp_error::bvp_error;
};

std::vector<double> uniform_mesh(int intervals);

// Builds a segment from a state-space guess curve; stage derivatives are
// filled from the right-hand side at the collocation abscissae.
orbit_segment initial_segment(const problem& p, const std::vector<double>& mesh, int stages,
                              const std::function<Eigen::VectorXd(double)>& guess,
                              const Eigen::VectorXd& scalars);

// Re-expresses a solution on a new mesh (same polynomial degree), evaluating
// the stored piecewise polynomial.
orbit_segment resample(const orbit_segment& seg, const std::vector<double>& new_mesh);

// Per-interval scaled collocation error estimates (size N).
std::vector<double> error_estimate(const orbit_segment& seg);

orbit_segment solve_collocation(const problem& p, const orbit_segment& initial,
                                const solve_options& opts = {});

} // namespace canard::bvp
