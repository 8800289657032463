#include "smcva/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "smcva/rng.hpp"

namespace smcva {

void BiasSpec::validate() const {
    if (sigma_state.size() != center.dim() ||
        sigma_param.size() != center.params.size())
        throw std::invalid_argument("BiasSpec: sigma sizes do not match center");
    if ((sigma_state.array() <= 0.0).any() || (sigma_param.array() <= 0.0).any())
        throw std::invalid_argument("BiasSpec: sigmas must be > 0");
}

void RunSettings::validate() const {
    if (n_walkers < 1 || burn_in < 0 || n_steps < 1 || thin < 1 ||
        !(step_scale > 0.0))
        throw std::invalid_argument("RunSettings: invalid values");
}

BiasSpec build_bias(const Path& best, const Path& worst, double floor,
                    double cap_state, double cap_param) {
    if (best.states.rows() != worst.states.rows() ||
        best.states.cols() != worst.states.cols() ||
        best.params.size() != worst.params.size())
        throw std::invalid_argument("build_bias: endpoint paths differ in shape");
    if (!(cap_state > 0.0) || !(cap_param > 0.0))
        throw std::invalid_argument("build_bias: caps must be > 0");

    BiasSpec bias;
    bias.center = best;
    const int d = best.dim();
    bias.sigma_state.resize(d);
    for (int a = 0; a < d; ++a) {
        const double dist =
            (best.states.col(a) - worst.states.col(a)).cwiseAbs().maxCoeff();
        bias.sigma_state[a] = std::min(4.0 * dist, cap_state);
    }
    bias.sigma_param =
        (4.0 * (best.params - worst.params).cwiseAbs()).cwiseMin(cap_param);

    bool all_zero = (bias.sigma_state.array() == 0.0).all() &&
                    (bias.sigma_param.array() == 0.0).all();
    if (all_zero)
        std::cerr << "build_bias: endpoint paths are identical; "
                     "falling back to floor widths\n";
    for (int a = 0; a < d; ++a)
        if (bias.sigma_state[a] == 0.0) bias.sigma_state[a] = floor;
    for (int i = 0; i < bias.sigma_param.size(); ++i)
        if (bias.sigma_param[i] == 0.0) bias.sigma_param[i] = floor;
    return bias;
}

double log_bias(const Path& path, const BiasSpec& bias) {
    if (path.states.rows() != bias.center.states.rows() ||
        path.dim() != bias.center.dim() ||
        path.params.size() != bias.center.params.size())
        throw std::invalid_argument("log_bias: path does not match bias shape");

    constexpr double kLogTwoPi = 1.8378770664093454836;
    const int n_times = static_cast<int>(path.states.rows());
    const int d = path.dim();
    double out = 0.0;
    for (int a = 0; a < d; ++a) {
        const double sigma = bias.sigma_state[a];
        const double inv2 = 0.5 / (sigma * sigma);
        double q = 0.0;
        for (int t = 0; t < n_times; ++t) {
            const double r = path.states(t, a) - bias.center.states(t, a);
            q += r * r;
        }
        out -= inv2 * q + n_times * (std::log(sigma) + 0.5 * kLogTwoPi);
    }
    for (int i = 0; i < path.params.size(); ++i) {
        const double sigma = bias.sigma_param[i];
        const double r = path.params[i] - bias.center.params[i];
        out -= 0.5 * r * r / (sigma * sigma) + std::log(sigma) + 0.5 * kLogTwoPi;
    }
    return out;
}

bool mh_step(WalkerState& walker, const BiasSpec& bias, double step_scale,
             const LogDensity& log_p_fn, bool bias_in_acceptance) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Path proposal = walker.path;
    const int n_times = static_cast<int>(proposal.states.rows());
    const int d = proposal.dim();
    for (int t = 0; t < n_times; ++t)
        for (int a = 0; a < d; ++a)
            proposal.states(t, a) +=
                step_scale * bias.sigma_state[a] * normal(walker.rng);
    for (int i = 0; i < proposal.params.size(); ++i)
        proposal.params[i] +=
            step_scale * bias.sigma_param[i] * normal(walker.rng);

    const double log_p_new = log_p_fn(proposal);
    const double u = unit(walker.rng);   // drawn unconditionally, keeps streams aligned
    if (!std::isfinite(log_p_new)) return false;

    const double log_b_new = log_bias(proposal, bias);
    double log_ratio = log_p_new - walker.log_p;
    if (bias_in_acceptance) log_ratio += log_b_new - walker.log_b;

    if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
        walker.path = std::move(proposal);
        walker.log_p = log_p_new;
        walker.log_b = log_b_new;
        return true;
    }
    return false;
}

namespace {

struct WalkerOutput {
    std::vector<ChainSample> samples;
    long accepted = 0;
    double step_scale = 0.0;
};

void run_walker(int walker_id, const BiasSpec& bias, const LogDensity& log_p_fn,
                const RunSettings& run, std::uint64_t seed, WalkerOutput& out) {
    WalkerState walker;
    walker.rng = seed_stream(seed, kStreamWalker, static_cast<std::uint64_t>(walker_id));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n_times = static_cast<int>(bias.center.states.rows());
    const int d = bias.center.dim();
    walker.path.states.resize(n_times, d);
    for (int t = 0; t < n_times; ++t)
        for (int a = 0; a < d; ++a)
            walker.path.states(t, a) =
                bias.center.states(t, a) +
                0.25 * bias.sigma_state[a] * (2.0 * unit(walker.rng) - 1.0);
    walker.path.params.resize(bias.center.params.size());
    for (int i = 0; i < walker.path.params.size(); ++i)
        walker.path.params[i] =
            bias.center.params[i] +
            0.25 * bias.sigma_param[i] * (2.0 * unit(walker.rng) - 1.0);
    walker.log_p = log_p_fn(walker.path);
    walker.log_b = log_bias(walker.path, bias);

    double scale = run.step_scale;
    constexpr int kAdaptWindow = 50;
    int window_accepts = 0;
    for (int s = 0; s < run.burn_in; ++s) {
        if (mh_step(walker, bias, scale, log_p_fn, run.bias_in_acceptance))
            ++window_accepts;
        if (run.adapt_during_burn_in && (s + 1) % kAdaptWindow == 0) {
            const double rate = static_cast<double>(window_accepts) / kAdaptWindow;
            if (rate > 0.5)
                scale *= 1.4;
            else if (rate < 0.2)
                scale *= 0.7;
            window_accepts = 0;
        }
    }

    out.step_scale = scale;
    out.samples.reserve(run.n_steps / run.thin);
    for (int s = 1; s <= run.n_steps; ++s) {
        if (mh_step(walker, bias, scale, log_p_fn, run.bias_in_acceptance))
            ++out.accepted;
        if (s % run.thin == 0) {
            ChainSample sample;
            sample.walker_id = walker_id;
            sample.step_index = s;
            sample.log_weight = -walker.log_b;
            sample.params = walker.path.params;
            if (run.keep_states) sample.states = walker.path.states;
            out.samples.push_back(std::move(sample));
        }
    }
}

}  // namespace

std::vector<ChainSample> run_ensemble(const BiasSpec& bias,
                                      const LogDensity& log_p_fn,
                                      const RunSettings& run,
                                      std::uint64_t seed,
                                      EnsembleStats* stats) {
    bias.validate();
    run.validate();

    std::vector<WalkerOutput> outputs(run.n_walkers);
    unsigned n_threads =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(run.n_walkers));
    if (n_threads == 1) {
        for (int w = 0; w < run.n_walkers; ++w)
            run_walker(w, bias, log_p_fn, run, seed, outputs[w]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned th = 0; th < n_threads; ++th) {
            pool.emplace_back([&, th]() {
                for (int w = static_cast<int>(th); w < run.n_walkers;
                     w += static_cast<int>(n_threads))
                    run_walker(w, bias, log_p_fn, run, seed, outputs[w]);
            });
        }
        for (auto& t : pool) t.join();
    }

    long total_accepted = 0;
    std::vector<ChainSample> samples;
    samples.reserve(static_cast<std::size_t>(run.n_walkers) *
                    (run.n_steps / run.thin));
    EnsembleStats local;
    for (auto& out : outputs) {
        total_accepted += out.accepted;
        local.final_step_scale.push_back(out.step_scale);
        for (auto& s : out.samples) samples.push_back(std::move(s));
    }
    local.acceptance_rate =
        static_cast<double>(total_accepted) /
        (static_cast<double>(run.n_walkers) * run.n_steps);
    if (stats) *stats = local;

    if (local.acceptance_rate < 0.01)
        throw std::runtime_error(
            "run_ensemble: ensemble stuck, post burn-in acceptance rate " +
            std::to_string(local.acceptance_rate) +
            " < 0.01; reduce step_scale or revisit the bias widths");
    return samples;
}

namespace {

Eigen::VectorXd normalized_weights(const std::vector<ChainSample>& samples) {
    double max_lw = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) max_lw = std::max(max_lw, s.log_weight);
    Eigen::VectorXd w(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        w[i] = std::exp(samples[i].log_weight - max_lw);
    return w;
}

}  // namespace

MarginalHistogram marginalize(const std::vector<ChainSample>& samples,
                              int param_index, int n_bins) {
    if (samples.empty())
        throw std::invalid_argument("marginalize: no samples");
    if (param_index < 0 || param_index >= samples.front().params.size())
        throw std::invalid_argument("marginalize: param_index out of range");

    const Eigen::VectorXd w = normalized_weights(samples);
    const double total = w.sum();
    if (!(total > 0.0))
        throw std::runtime_error("marginalize: zero total weight");

    double mean = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        mean += w[i] * samples[i].params[param_index];
    mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double dev = samples[i].params[param_index] - mean;
        var += w[i] * dev * dev;
    }
    var /= total;

    MarginalHistogram hist;
    hist.mean = mean;
    hist.rms = std::sqrt(var);
    hist.n_samples = static_cast<long>(samples.size());
    hist.total_weight = total;

    double half_span = 5.0 * hist.rms;
    if (!(half_span > 0.0))
        half_span = std::max(1e-9, 1e-9 * std::abs(mean));
    const double lo = mean - half_span;
    const double hi = mean + half_span;
    hist.bin_edges = Eigen::VectorXd::LinSpaced(n_bins + 1, lo, hi);
    hist.mass = Eigen::VectorXd::Zero(n_bins);
    const double width = (hi - lo) / n_bins;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        int b = static_cast<int>(
            std::floor((samples[i].params[param_index] - lo) / width));
        b = std::clamp(b, 0, n_bins - 1);   // tail samples land in edge bins
        hist.mass[b] += w[i];
    }
    hist.mass /= total;
    return hist;
}

double expectation(const std::vector<ChainSample>& samples,
                   const std::function<double(const ChainSample&)>& g_fn) {
    if (samples.empty())
        throw std::invalid_argument("expectation: no samples");
    const Eigen::VectorXd w = normalized_weights(samples);
    const double total = w.sum();
    if (!(total > 0.0))
        throw std::runtime_error("expectation: zero total weight");
    double acc = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        acc += w[i] * g_fn(samples[i]);
    return acc / total;
}

}  // namespace smcva
