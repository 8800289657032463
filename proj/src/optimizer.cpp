#include "smcva/optimizer.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace smcva {

LbfgsStatus minimize_lbfgs(const Objective& objective, Eigen::VectorXd& x,
                           const OptimizerSettings& settings) {
    if (!(settings.grad_tolerance > 0.0) || settings.max_iterations < 1 ||
        settings.memory < 1)
        throw std::invalid_argument("minimize_lbfgs: invalid settings");
    if (!x.allFinite())
        throw std::invalid_argument("minimize_lbfgs: non-finite initial point");

    const int n = static_cast<int>(x.size());
    Eigen::VectorXd grad(n), grad_new(n), dir(n), x_new(n);
    double f = objective(x, grad);

    struct Pair {
        Eigen::VectorXd s, y;
        double rho;
    };
    std::deque<Pair> history;

    LbfgsStatus status;
    status.value = f;
    status.grad_norm = grad.lpNorm<Eigen::Infinity>();

    constexpr double kArmijoC1 = 1e-4;
    constexpr double kShrink = 0.5;
    constexpr double kMinStep = 1e-20;

    int stalled = 0;
    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        if (status.grad_norm < settings.grad_tolerance) {
            status.converged = true;
            break;
        }

        // two-loop recursion
        dir = -grad;
        std::vector<double> alpha(history.size());
        for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
            alpha[i] = history[i].rho * history[i].s.dot(dir);
            dir -= alpha[i] * history[i].y;
        }
        if (!history.empty()) {
            const Pair& last = history.back();
            dir *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        for (std::size_t i = 0; i < history.size(); ++i) {
            const double beta = history[i].rho * history[i].y.dot(dir);
            dir += (alpha[i] - beta) * history[i].s;
        }

        double slope = grad.dot(dir);
        if (!(slope < 0.0)) {   // not a descent direction; reset to steepest
            history.clear();
            dir = -grad;
            slope = -grad.squaredNorm();
        }

        // backtracking Armijo line search
        double step = (history.empty() && iter == 0)
                          ? 1.0 / std::max(1.0, status.grad_norm)
                          : 1.0;
        double f_new = f;
        bool accepted = false;
        while (step > kMinStep) {
            x_new = x + step * dir;
            f_new = objective(x_new, grad_new);
            if (std::isfinite(f_new) && f_new <= f + kArmijoC1 * step * slope) {
                accepted = true;
                break;
            }
            step *= kShrink;
        }
        if (!accepted) break;   // best-so-far x stays, converged = false

        bool stop_stalled = false;
        if (f - f_new <= settings.f_tolerance * std::max(1.0, std::abs(f))) {
            stop_stalled = ++stalled >= settings.stall_patience;
        } else {
            stalled = 0;
        }

        Pair pair;
        pair.s = x_new - x;
        pair.y = grad_new - grad;
        const double sy = pair.s.dot(pair.y);
        // skip the update in flat or non-convex stretches
        if (sy > 1e-12 * pair.s.norm() * pair.y.norm() && sy > 0.0) {
            pair.rho = 1.0 / sy;
            history.push_back(std::move(pair));
            if (static_cast<int>(history.size()) > settings.memory)
                history.pop_front();
        }

        x.swap(x_new);
        grad.swap(grad_new);
        f = f_new;
        status.iterations = iter + 1;
        status.value = f;
        status.grad_norm = grad.lpNorm<Eigen::Infinity>();
        if (stop_stalled) break;   // objective no longer moving
    }
    if (status.grad_norm < settings.grad_tolerance) status.converged = true;
    return status;
}

OptimResult minimize(const Path& initial, const ModelSpec& spec,
                     const ActionConfig& config,
                     const OptimizerSettings& settings) {
    ActionEvaluator eval(spec, config);
    const int n_window = initial.n_window();

    Eigen::VectorXd x = initial.flatten();
    Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
        Path p = Path::unflatten(v, n_window, spec.dim, spec.n_params);
        return eval.value_and_gradient(p, g);
    };

    LbfgsStatus status = minimize_lbfgs(objective, x, settings);

    OptimResult result;
    result.path = Path::unflatten(x, n_window, spec.dim, spec.n_params);
    result.action = eval.value(result.path);
    result.converged = status.converged;
    result.iterations = status.iterations;
    return result;
}

}  // namespace smcva
