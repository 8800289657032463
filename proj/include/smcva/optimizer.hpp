#pragma once

#include <functional>

#include <Eigen/Dense>

#include "smcva/action.hpp"

namespace smcva {

struct OptimizerSettings {
    double grad_tolerance = 1e-8;   // sup-norm at convergence
    int max_iterations = 5000;
    int memory = 10;                // L-BFGS history length
    // secondary stop: relative objective decrease below this for
    // `stall_patience` consecutive iterations counts as converged
    double f_tolerance = 1e-12;
    int stall_patience = 5;
};

struct OptimResult {
    Path path;
    ActionValue action;
    bool converged = false;
    int iterations = 0;
};

// f(x, grad) returns the objective and fills grad.
using Objective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsStatus {
    bool converged = false;
    int iterations = 0;
    double value = 0.0;
    double grad_norm = 0.0;   // sup-norm at the final iterate
};

// Limited-memory BFGS with Armijo backtracking. x is updated in place;
// the final x is the best iterate seen. Curvature pairs with s.y <= 0
// are skipped so flat directions (r_f = 0) do not poison the inverse
// Hessian estimate.
LbfgsStatus minimize_lbfgs(const Objective& objective, Eigen::VectorXd& x,
                           const OptimizerSettings& settings);

OptimResult minimize(const Path& initial, const ModelSpec& spec,
                     const ActionConfig& config,
                     const OptimizerSettings& settings);

}  // namespace smcva
