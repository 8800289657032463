#include "smcva/action.hpp"

#include <cmath>
#include <stdexcept>

namespace smcva {

Eigen::VectorXd Path::flatten() const {
    // row-major states make the flat layout (t*D + a, params last) a copy
    Eigen::VectorXd v(flat_size());
    v.head(states.size()) =
        Eigen::Map<const Eigen::VectorXd>(states.data(), states.size());
    v.tail(params.size()) = params;
    return v;
}

Path Path::unflatten(const Eigen::VectorXd& v, int n_window, int dim,
                     int n_params) {
    if (v.size() != static_cast<long>(n_window + 1) * dim + n_params)
        throw std::invalid_argument("Path::unflatten: size mismatch");
    Path p;
    p.states.resize(n_window + 1, dim);
    Eigen::Map<Eigen::VectorXd>(p.states.data(), p.states.size()) =
        v.head(static_cast<long>(n_window + 1) * dim);
    p.params = v.tail(n_params);
    return p;
}

void ActionConfig::validate() const {
    if (!(r_m > 0.0)) throw std::invalid_argument("ActionConfig: r_m must be > 0");
    if (!(r_f >= 0.0)) throw std::invalid_argument("ActionConfig: r_f must be >= 0");
    if (obs == nullptr) throw std::invalid_argument("ActionConfig: observations missing");
}

ActionEvaluator::ActionEvaluator(const ModelSpec& spec, const ActionConfig& config)
    : spec_(spec), config_(config) {
    spec_.validate();
    config_.validate();
    work_.resize(9 * spec_.dim);
    fwd_.resize(spec_.dim);
    res_.resize(spec_.dim);
}

namespace {

void check_shapes(const ModelSpec& spec, const ActionConfig& cfg,
                  const Path& path) {
    if (path.dim() != spec.dim || path.params.size() != spec.n_params)
        throw std::invalid_argument("action: path does not match spec");
    if (path.n_window() < 1)
        throw std::invalid_argument("action: path needs at least two times");
    if (cfg.obs->values.rows() < path.states.rows())
        throw std::invalid_argument("action: observations do not cover the window");
    for (int idx : cfg.obs->measured)
        if (idx < 0 || idx >= spec.dim)
            throw std::invalid_argument("action: measured index out of range");
}

}  // namespace

ActionValue ActionEvaluator::value(const Path& path) const {
    check_shapes(spec_, config_, path);
    const int n = path.n_window();
    const int d = spec_.dim;
    const Observations& obs = *config_.obs;
    const double g = path.params[0];

    ActionValue out;
    for (int t = 0; t <= n; ++t) {
        for (int l = 0; l < obs.n_measured(); ++l) {
            const double r = path.states(t, obs.measured[l]) - obs.values(t, l);
            out.measurement_term += 0.5 * config_.r_m * r * r;
        }
    }
    if (config_.r_f > 0.0) {
        for (int t = 0; t < n; ++t) {
            rk4_step(d, spec_.dt, path.states.row(t).data(), g, fwd_.data(),
                     work_.data());
            double ss = 0.0;
            const double* next = path.states.row(t + 1).data();
            for (int a = 0; a < d; ++a) {
                const double e = next[a] - fwd_[a];
                ss += e * e;
            }
            out.model_term += 0.5 * config_.r_f * ss;
        }
    }
    out.total = out.measurement_term + out.model_term;
    return out;
}

double ActionEvaluator::value_and_gradient(const Path& path,
                                           Eigen::VectorXd& grad) const {
    check_shapes(spec_, config_, path);
    const int n = path.n_window();
    const int d = spec_.dim;
    const int np = spec_.n_params;
    const Observations& obs = *config_.obs;
    const double g = path.params[0];

    grad.setZero((n + 1) * d + np);
    double total = 0.0;

    for (int t = 0; t <= n; ++t) {
        for (int l = 0; l < obs.n_measured(); ++l) {
            const int a = obs.measured[l];
            const double r = path.states(t, a) - obs.values(t, l);
            total += 0.5 * config_.r_m * r * r;
            grad[t * d + a] += config_.r_m * r;
        }
    }

    if (config_.r_f > 0.0) {
        for (int t = 0; t < n; ++t) {
            const double* cur = path.states.row(t).data();
            const double* next = path.states.row(t + 1).data();
            rk4_step(d, spec_.dt, cur, g, fwd_.data(), work_.data());
            double ss = 0.0;
            for (int a = 0; a < d; ++a) {
                res_[a] = config_.r_f * (next[a] - fwd_[a]);
                const double e = next[a] - fwd_[a];
                ss += e * e;
            }
            total += 0.5 * config_.r_f * ss;
            // d/dx(t+1): +r_f e; d/dx(t): -df/dx^T (r_f e); d/dp likewise
            for (int a = 0; a < d; ++a) grad[(t + 1) * d + a] += res_[a];
            res_ = -res_;
            rk4_step_vjp(d, spec_.dt, cur, g, res_.data(), grad.data() + t * d,
                         grad.data() + (n + 1) * d, work_.data());
        }
    }
    return total;
}

ActionValue action(const Path& path, const ModelSpec& spec,
                   const ActionConfig& config) {
    return ActionEvaluator(spec, config).value(path);
}

Eigen::VectorXd action_gradient(const Path& path, const ModelSpec& spec,
                                const ActionConfig& config) {
    Eigen::VectorXd grad;
    ActionEvaluator(spec, config).value_and_gradient(path, grad);
    return grad;
}

double log_prob(const Path& path, const ModelSpec& spec,
                const ActionConfig& config) {
    return -action(path, spec, config).total;
}

}  // namespace smcva
