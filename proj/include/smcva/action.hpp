#pragma once

#include <vector>

#include <Eigen/Dense>

#include "smcva/dynamics.hpp"
#include "smcva/twin.hpp"

namespace smcva {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// The full trajectory over the window plus the model parameters; the
/// object the optimizer moves and the sampler walks.
struct Path {
    RowMat states;   // (N+1) x D, row-major so each time slice is contiguous
    Eigen::VectorXd params;

    int n_window() const { return static_cast<int>(states.rows()) - 1; }
    int dim() const { return static_cast<int>(states.cols()); }

    int flat_size() const {
        return static_cast<int>(states.size() + params.size());
    }
    Eigen::VectorXd flatten() const;
    static Path unflatten(const Eigen::VectorXd& v, int n_window, int dim,
                          int n_params);
};

struct ActionConfig {
    double r_m;   // measurement precision, > 0
    double r_f;   // model precision, >= 0
    const Observations* obs;   // shared read-only

    void validate() const;
};

struct ActionValue {
    double total = 0.0;
    double measurement_term = 0.0;
    double model_term = 0.0;
};

/// Evaluates the weak-constraint action and its exact gradient. Owns its
/// workspace so repeated evaluations in optimizer and sampler loops stay
/// allocation-free; one instance per worker.
class ActionEvaluator {
  public:
    ActionEvaluator(const ModelSpec& spec, const ActionConfig& config);

    ActionValue value(const Path& path) const;
    // Gradient ordering: state (t, a) at index t*D + a, parameters last.
    double value_and_gradient(const Path& path, Eigen::VectorXd& grad) const;
    double log_prob(const Path& path) const { return -value(path).total; }

    const ModelSpec& spec() const { return spec_; }
    const ActionConfig& config() const { return config_; }

  private:
    ModelSpec spec_;
    ActionConfig config_;
    mutable Eigen::VectorXd work_;
    mutable Eigen::VectorXd fwd_;
    mutable Eigen::VectorXd res_;
};

ActionValue action(const Path& path, const ModelSpec& spec,
                   const ActionConfig& config);
Eigen::VectorXd action_gradient(const Path& path, const ModelSpec& spec,
                                const ActionConfig& config);
double log_prob(const Path& path, const ModelSpec& spec,
                const ActionConfig& config);

// Measurement-noise variance matching: uniform noise of half-width a has
// variance a^2/3, so the Gaussian measurement precision is 3/a^2.
inline double precision_from_uniform_halfwidth(double a) {
    return 3.0 / (a * a);
}

}  // namespace smcva
