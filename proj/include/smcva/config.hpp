#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace smcva {

/// Flat experiment configuration. Defaults are the desk-scale profile;
/// the paper profile switches to the full-scale run sizes.
struct RunConfig {
    // model
    int d = 11;
    double dt = 0.025;
    double g_true = 10.0;
    // window
    int n_window = 165;
    int t_pred = 100;
    // noise
    double noise_fraction = 0.034;
    double noise_range = 20.0;
    // measurement
    int l = 7;
    // annealing schedule
    double r_f0_ratio = 1e-4;   // r_f0 = ratio * r_m
    double alpha = 1.5;
    int beta_max = 45;
    int n_inits = 20;
    // sampler
    int walkers = 20;
    int burn_in = 2000;
    long steps = 100000;
    int thin = 80;
    double step_scale = 0.02;
    bool bias_in_acceptance = true;
    // per-component clamp on the bias widths; keeps the search local to
    // the best path when the worst endpoint is far off the attractor
    double bias_cap_state = 1.0;
    double bias_cap_param = 0.5;

    std::uint64_t seed = 1;

    double noise_halfwidth() const { return noise_fraction * noise_range; }
    double r_m() const;   // variance-matched to the uniform noise

    void validate() const;

    static RunConfig profile(const std::string& name);   // "desk" or "paper"

    // key = value lines, '#' comments; unknown keys are hard errors.
    void apply_file(const std::string& path);
    void apply_key(const std::string& key, const std::string& value);

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

}  // namespace smcva
