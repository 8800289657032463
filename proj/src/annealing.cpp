#include "smcva/annealing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "smcva/rng.hpp"

namespace smcva {

void AnnealSchedule::validate() const {
    if (!(r_f0 > 0.0)) throw std::invalid_argument("AnnealSchedule: r_f0 must be > 0");
    if (!(alpha > 1.0)) throw std::invalid_argument("AnnealSchedule: alpha must be > 1");
    if (beta_max < 0) throw std::invalid_argument("AnnealSchedule: beta_max must be >= 0");
}

double AnnealSchedule::r_f(int beta) const {
    if (beta < 0 || beta > beta_max)
        throw std::out_of_range("AnnealSchedule: beta out of range");
    if (beta == 0) return 0.0;
    return r_f0 * std::pow(alpha, beta);
}

namespace {

Path initial_path(const ModelSpec& spec, const Observations& obs,
                  const AnnealOptions& options, std::uint64_t seed, int init_id) {
    const int n = obs.n_window();
    auto rng = seed_stream(seed, kStreamAnnealInit, static_cast<std::uint64_t>(init_id));
    std::uniform_real_distribution<double> us(options.state_init_lo, options.state_init_hi);
    std::uniform_real_distribution<double> up(options.param_init_lo, options.param_init_hi);

    Path path;
    path.states.resize(n + 1, spec.dim);
    for (int t = 0; t <= n; ++t)
        for (int a = 0; a < spec.dim; ++a) path.states(t, a) = us(rng);
    for (int t = 0; t <= n; ++t)
        for (int l = 0; l < obs.n_measured(); ++l)
            path.states(t, obs.measured[l]) = obs.values(t, l);
    path.params.resize(spec.n_params);
    for (int i = 0; i < spec.n_params; ++i) path.params[i] = up(rng);
    return path;
}

void run_range(const ModelSpec& spec, const Observations& obs, double r_m,
               double r_f, const OptimizerSettings& settings,
               std::vector<AnnealCell>& row,
               const std::vector<Path>& starts, int lo, int hi) {
    ActionConfig cfg{r_m, r_f, &obs};
    for (int i = lo; i < hi; ++i) {
        AnnealCell& cell = row[i];
        cell.r_f = r_f;
        cell.optim = minimize(starts[i], spec, cfg, settings);
    }
}

}  // namespace

AnnealResult anneal(const ModelSpec& spec, const Observations& obs, double r_m,
                    const AnnealSchedule& schedule, const AnnealOptions& options,
                    const OptimizerSettings& settings, std::uint64_t seed) {
    spec.validate();
    schedule.validate();
    if (options.n_inits < 2)
        throw std::invalid_argument("anneal: n_inits must be >= 2");

    const int n_inits = options.n_inits;
    int n_threads = options.n_threads;
    if (n_threads <= 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n_inits);

    AnnealResult result;
    result.schedule = schedule;
    result.n_inits = n_inits;
    result.cells.resize(schedule.beta_max + 1);

    std::vector<Path> starts(n_inits);
    for (int i = 0; i < n_inits; ++i)
        starts[i] = initial_path(spec, obs, options, seed, i);

    for (int beta = 0; beta <= schedule.beta_max; ++beta) {
        const double r_f = schedule.r_f(beta);
        std::vector<AnnealCell>& row = result.cells[beta];
        row.resize(n_inits);

        if (n_threads == 1) {
            run_range(spec, obs, r_m, r_f, settings, row, starts, 0, n_inits);
        } else {
            std::vector<std::thread> pool;
            const int chunk = (n_inits + n_threads - 1) / n_threads;
            for (int th = 0; th < n_threads; ++th) {
                const int lo = th * chunk;
                const int hi = std::min(n_inits, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(run_range, std::cref(spec), std::cref(obs),
                                  r_m, r_f, std::cref(settings), std::ref(row),
                                  std::cref(starts), lo, hi);
            }
            for (auto& t : pool) t.join();
        }
        // each init tracks its own minimum across beta
        for (int i = 0; i < n_inits; ++i) starts[i] = row[i].optim.path;
    }
    return result;
}

std::vector<std::vector<ActionLevel>> action_levels(const AnnealResult& result) {
    std::vector<std::vector<ActionLevel>> levels(result.cells.size());
    for (std::size_t beta = 0; beta < result.cells.size(); ++beta) {
        for (int i = 0; i < result.n_inits; ++i) {
            const AnnealCell& cell = result.cells[beta][i];
            levels[beta].push_back({static_cast<int>(beta), i,
                                    cell.optim.action, cell.r_f});
        }
        std::sort(levels[beta].begin(), levels[beta].end(),
                  [](const ActionLevel& a, const ActionLevel& b) {
                      if (a.action.total != b.action.total)
                          return a.action.total < b.action.total;
                      return a.init_id < b.init_id;
                  });
    }
    return levels;
}

PredictionScore predict_mse(const ModelSpec& spec, const Path& path,
                            const Observations& obs, int t_pred) {
    if (t_pred < 1) throw std::invalid_argument("predict_mse: t_pred must be >= 1");
    if (obs.continuation.rows() < t_pred)
        throw std::invalid_argument("predict_mse: continuation shorter than t_pred");

    PredictionScore score;
    score.t_pred = t_pred;
    const int n_meas = obs.n_measured();
    const Eigen::VectorXd x_final = path.states.row(path.n_window());
    double sum = 0.0;
    try {
        Eigen::MatrixXd pred = integrate_trajectory(spec, x_final, path.params, t_pred);
        for (int t = 1; t <= t_pred; ++t)
            for (int l = 0; l < n_meas; ++l) {
                const double e = obs.continuation(t - 1, l) - pred(t, obs.measured[l]);
                sum += e * e;
            }
        score.mse = sum / (static_cast<double>(t_pred) * n_meas);
        if (!std::isfinite(score.mse))
            score.mse = std::numeric_limits<double>::infinity();
    } catch (const std::runtime_error&) {
        score.mse = std::numeric_limits<double>::infinity();
    }
    return score;
}

std::vector<PredictionScore> score_all(const ModelSpec& spec,
                                       const AnnealResult& result,
                                       const Observations& obs, int t_pred) {
    std::vector<PredictionScore> scores;
    for (std::size_t beta = 0; beta < result.cells.size(); ++beta)
        for (int i = 0; i < result.n_inits; ++i) {
            PredictionScore s =
                predict_mse(spec, result.cells[beta][i].optim.path, obs, t_pred);
            s.beta = static_cast<int>(beta);
            s.init_id = i;
            scores.push_back(s);
        }
    return scores;
}

EndpointSelection select_endpoints(const AnnealResult& result,
                                   const std::vector<PredictionScore>& scores) {
    const std::size_t expected =
        result.cells.size() * static_cast<std::size_t>(result.n_inits);
    if (scores.size() != expected)
        throw std::invalid_argument("select_endpoints: need one score per cell");

    auto action_of = [&](const PredictionScore& s) {
        return result.cells[s.beta][s.init_id].optim.action.total;
    };
    auto better = [&](const PredictionScore& a, const PredictionScore& b) {
        if (a.mse != b.mse) return a.mse < b.mse;
        if (action_of(a) != action_of(b)) return action_of(a) < action_of(b);
        return a.init_id < b.init_id;
    };

    const PredictionScore* best = nullptr;
    const PredictionScore* worst = nullptr;
    for (const auto& s : scores) {
        if (std::isfinite(s.mse)) {
            if (!best || better(s, *best)) best = &s;
            if (!worst || better(*worst, s)) worst = &s;
        }
    }
    if (!best)
        throw std::runtime_error("select_endpoints: every prediction diverged");

    EndpointSelection sel;
    sel.best = result.cells[best->beta][best->init_id].optim;
    sel.worst = result.cells[worst->beta][worst->init_id].optim;
    sel.r_f_star = result.cells[best->beta][best->init_id].r_f;
    sel.best_score = *best;
    sel.worst_score = *worst;
    return sel;
}

int count_action_levels(std::vector<double> totals, double rel_tol) {
    if (totals.empty()) return 0;
    std::sort(totals.begin(), totals.end());
    int clusters = 1;
    double ref = totals.front();
    for (double a : totals) {
        if (a - ref > rel_tol * std::max(std::abs(ref), 1e-12)) {
            ++clusters;
            ref = a;
        }
    }
    return clusters;
}

}  // namespace smcva
