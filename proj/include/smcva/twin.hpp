#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "smcva/dynamics.hpp"

namespace smcva {

/// Noisy measurements presented to the estimation: which components are
/// observed, their values over the window, and a post-window continuation
/// used only for prediction scoring.
struct Observations {
    std::vector<int> measured;      // distinct, ascending, each in [0, D)
    Eigen::MatrixXd values;         // (N+1) x L, window times 0..N
    Eigen::MatrixXd continuation;   // T_pred x L, times N+1..N+T_pred

    int n_measured() const { return static_cast<int>(measured.size()); }
    int n_window() const { return static_cast<int>(values.rows()) - 1; }
};

struct NoiseSpec {
    double fraction = 0.034;       // amplitude as fraction of dynamic range
    double dynamic_range = 20.0;   // variables live in roughly [-10, 10]
    std::uint64_t seed = 0;

    double amplitude() const { return fraction * dynamic_range; }
};

// Measured components spread as evenly as the ring allows: floor(i*D/L).
std::vector<int> measured_indices(int dim, int n_measured);

// Uniform random start in [-10,10]^D, 500-step transient discard, then
// n_window + n_pred + 1 recorded states.
Eigen::MatrixXd generate_truth(const ModelSpec& spec, const Eigen::VectorXd& p,
                               int n_window, int n_pred, std::uint64_t seed);

// Adds u ~ U[-a, a] to each measured component; the first n_window+1 rows
// become the window values, the rest the continuation.
Observations apply_noise(const Eigen::MatrixXd& truth,
                         const std::vector<int>& indices, int n_window,
                         const NoiseSpec& noise);

}  // namespace smcva
