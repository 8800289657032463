#pragma once

#include <Eigen/Dense>
#include <utility>

namespace smcva {

/// Lorenz96 model description: D cyclically coupled states, a single
/// forcing parameter, and a fixed integration step.
struct ModelSpec {
    int dim;            // D >= 4
    double dt;          // > 0
    int n_params = 1;   // Lorenz96: the forcing G

    void validate() const;
};

// Raw-array kernels for the hot loops. Callers own the storage; `out`
// must not alias `x`.
void l96_field(int dim, const double* x, double forcing, double* out);

// J^T v for the Lorenz96 Jacobian at x, accumulated into out (out += J^T v).
void l96_jac_tv(int dim, const double* x, const double* v, double* out);

// One classical RK4 step of size dt. work must hold 5*dim doubles.
void rk4_step(int dim, double dt, const double* x, double forcing,
              double* out, double* work);

Eigen::VectorXd vector_field(const ModelSpec& spec, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& p);

// Analytic partials of the vector field: (dF/dx, dF/dp).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
jacobians(const ModelSpec& spec, const Eigen::VectorXd& x,
          const Eigen::VectorXd& p);

// x(t) -> x(t+dt) via one RK4 step.
Eigen::VectorXd discrete_map(const ModelSpec& spec, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& p);

// Exact derivatives (df/dx, df/dp) of discrete_map, chained through the
// RK4 stages.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
jacobians_map(const ModelSpec& spec, const Eigen::VectorXd& x,
              const Eigen::VectorXd& p);

// Vector-Jacobian product through one RK4 step: given the adjoint v of the
// step output, accumulates df/dx^T v into adj_x and df/dp^T v into adj_p.
// work must hold 9*dim doubles.
void rk4_step_vjp(int dim, double dt, const double* x, double forcing,
                  const double* v, double* adj_x, double* adj_p,
                  double* work);

// Rows 0..n_steps; row k is discrete_map applied k times to x0.
Eigen::MatrixXd integrate_trajectory(const ModelSpec& spec,
                                     const Eigen::VectorXd& x0,
                                     const Eigen::VectorXd& p, int n_steps);

}  // namespace smcva
