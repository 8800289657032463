#pragma once

#include <cstdint>
#include <vector>

#include "smcva/optimizer.hpp"

namespace smcva {

/// Geometric ramp of the model precision. beta = 0 is special-cased to
/// R_f = 0 (model unenforced); from beta = 1 on, R_f = r_f0 * alpha^beta.
struct AnnealSchedule {
    double r_f0;
    double alpha;
    int beta_max;

    double r_f(int beta) const;
    void validate() const;
};

struct AnnealCell {
    OptimResult optim;
    double r_f = 0.0;
};

struct AnnealResult {
    AnnealSchedule schedule;
    int n_inits = 0;
    // cells[beta][init]
    std::vector<std::vector<AnnealCell>> cells;
};

struct PredictionScore {
    int beta = 0;
    int init_id = 0;
    double mse = 0.0;
    int t_pred = 0;
};

struct EndpointSelection {
    OptimResult best;
    OptimResult worst;
    double r_f_star = 0.0;
    PredictionScore best_score;
    PredictionScore worst_score;
};

struct AnnealOptions {
    int n_inits = 20;
    double param_init_lo = 5.0;   // beta=0 draw range for the forcing
    double param_init_hi = 15.0;
    double state_init_lo = -10.0;
    double state_init_hi = 10.0;
    int n_threads = 0;            // 0 = hardware concurrency
};

// For each initialization: beta=0 sets measured states to the data and
// draws the rest uniformly; every later beta warm-starts from that init's
// previous solution.
AnnealResult anneal(const ModelSpec& spec, const Observations& obs, double r_m,
                    const AnnealSchedule& schedule, const AnnealOptions& options,
                    const OptimizerSettings& settings, std::uint64_t seed);

struct ActionLevel {
    int beta;
    int init_id;
    ActionValue action;
    double r_f;
};

// Per-beta action values sorted ascending, for the level plots.
std::vector<std::vector<ActionLevel>> action_levels(const AnnealResult& result);

// Forward prediction from x(t_F), scored against the noisy continuation
// over the measured components only.
PredictionScore predict_mse(const ModelSpec& spec, const Path& path,
                            const Observations& obs, int t_pred);

std::vector<PredictionScore> score_all(const ModelSpec& spec,
                                       const AnnealResult& result,
                                       const Observations& obs, int t_pred);

EndpointSelection select_endpoints(const AnnealResult& result,
                                   const std::vector<PredictionScore>& scores);

// Number of distinct action clusters at relative tolerance rel_tol among
// the given totals (used on the final-beta column of the level plot).
int count_action_levels(std::vector<double> totals, double rel_tol);

}  // namespace smcva
