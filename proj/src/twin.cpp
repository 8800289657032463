#include "smcva/twin.hpp"

#include <stdexcept>

#include "smcva/rng.hpp"

namespace smcva {

namespace {
constexpr int kTransientSteps = 500;
}

std::vector<int> measured_indices(int dim, int n_measured) {
    if (n_measured < 1 || n_measured > dim)
        throw std::invalid_argument("measured_indices: need 1 <= L <= D");
    std::vector<int> out(n_measured);
    for (int i = 0; i < n_measured; ++i)
        out[i] = static_cast<int>((static_cast<long long>(i) * dim) / n_measured);
    return out;
}

Eigen::MatrixXd generate_truth(const ModelSpec& spec, const Eigen::VectorXd& p,
                               int n_window, int n_pred, std::uint64_t seed) {
    spec.validate();
    if (n_window < 1) throw std::invalid_argument("generate_truth: n_window must be >= 1");
    if (n_pred < 0) throw std::invalid_argument("generate_truth: n_pred must be >= 0");

    auto rng = seed_stream(seed, kStreamTruth);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    Eigen::VectorXd x0(spec.dim);
    for (int i = 0; i < spec.dim; ++i) x0[i] = u(rng);

    Eigen::MatrixXd warm = integrate_trajectory(spec, x0, p, kTransientSteps);
    Eigen::VectorXd on_attractor = warm.row(kTransientSteps);
    return integrate_trajectory(spec, on_attractor, p, n_window + n_pred);
}

Observations apply_noise(const Eigen::MatrixXd& truth,
                         const std::vector<int>& indices, int n_window,
                         const NoiseSpec& noise) {
    const int dim = static_cast<int>(truth.cols());
    const int n_rows = static_cast<int>(truth.rows());
    if (n_window + 1 > n_rows)
        throw std::invalid_argument("apply_noise: truth shorter than window");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= dim)
            throw std::invalid_argument("apply_noise: measured index out of range");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw std::invalid_argument("apply_noise: indices must be ascending and distinct");
    }
    if (!(noise.fraction >= 0.0) || !(noise.dynamic_range > 0.0))
        throw std::invalid_argument("apply_noise: invalid NoiseSpec");

    const int n_meas = static_cast<int>(indices.size());
    const double a = noise.amplitude();
    auto rng = seed_stream(noise.seed, kStreamNoise);
    std::uniform_real_distribution<double> u(-a, a);

    Observations obs;
    obs.measured = indices;
    obs.values.resize(n_window + 1, n_meas);
    obs.continuation.resize(n_rows - n_window - 1, n_meas);
    for (int t = 0; t < n_rows; ++t) {
        for (int l = 0; l < n_meas; ++l) {
            const double y = truth(t, indices[l]) + (a > 0.0 ? u(rng) : 0.0);
            if (t <= n_window)
                obs.values(t, l) = y;
            else
                obs.continuation(t - n_window - 1, l) = y;
        }
    }
    return obs;
}

}  // namespace smcva
