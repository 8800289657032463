#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "smcva/action.hpp"

namespace smcva {

/// Gaussian proposal-shaping density: uncorrelated, centered on the best
/// VA path, one width per state component shared across time.
struct BiasSpec {
    Path center;
    Eigen::VectorXd sigma_state;   // length D
    Eigen::VectorXd sigma_param;   // length n_params

    void validate() const;
};

// Widths are four times the largest per-component distance between the
// best and worst VA paths, clamped to the caps so a degenerate worst
// endpoint cannot blow the search region open; exact zeros are replaced
// by `floor`.
BiasSpec build_bias(const Path& best, const Path& worst, double floor = 1e-2,
                    double cap_state = std::numeric_limits<double>::infinity(),
                    double cap_param = std::numeric_limits<double>::infinity());

// Log of the normalized bias density at `path`.
double log_bias(const Path& path, const BiasSpec& bias);

using LogDensity = std::function<double(const Path&)>;

struct WalkerState {
    Path path;
    double log_p = 0.0;
    double log_b = 0.0;
    std::mt19937_64 rng;
};

struct RunSettings {
    int n_walkers = 20;
    int burn_in = 2000;
    int n_steps = 100000;
    int thin = 80;
    double step_scale = 0.02;
    // Adapt per-walker step scale toward acceptance in [0.2, 0.5] during
    // burn-in, then freeze.
    bool adapt_during_burn_in = true;
    // true: the chain targets P * P_bias so the 1/P_bias weights are an
    // exact correction. false: literal proposal-shaping-only variant (the
    // bias affects step widths only and the weights stay as reported).
    bool bias_in_acceptance = true;
    bool keep_states = false;       // retain full state snapshots per sample

    void validate() const;
};

struct ChainSample {
    int walker_id = 0;
    int step_index = 0;             // post burn-in step at which it was recorded
    double log_weight = 0.0;        // log(1/P_bias), unnormalized
    Eigen::VectorXd params;
    RowMat states;                  // empty unless keep_states
};

struct EnsembleStats {
    double acceptance_rate = 0.0;   // post burn-in, pooled over walkers
    std::vector<double> final_step_scale;
};

struct MarginalHistogram {
    Eigen::VectorXd bin_edges;      // 51 edges for 50 bins
    Eigen::VectorXd mass;           // normalized to sum 1
    double mean = 0.0;
    double rms = 0.0;
    long n_samples = 0;
    double total_weight = 0.0;
};

// One proposal/accept-reject move. Returns true when accepted; on reject
// the walker is untouched.
bool mh_step(WalkerState& walker, const BiasSpec& bias, double step_scale,
             const LogDensity& log_p_fn, bool bias_in_acceptance);

// Independent walkers started uniformly in a box of half-side sigma/4
// around the bias center; burn-in discarded; every thin-th step recorded.
std::vector<ChainSample> run_ensemble(const BiasSpec& bias,
                                      const LogDensity& log_p_fn,
                                      const RunSettings& run,
                                      std::uint64_t seed,
                                      EnsembleStats* stats = nullptr);

MarginalHistogram marginalize(const std::vector<ChainSample>& samples,
                              int param_index, int n_bins = 50);

// Self-normalized importance estimate of E[G]. G_fn sees the parameter
// vector and, when recorded, the state snapshot.
double expectation(const std::vector<ChainSample>& samples,
                   const std::function<double(const ChainSample&)>& g_fn);

}  // namespace smcva
