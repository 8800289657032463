#include "smcva/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "smcva/csv.hpp"
#include "smcva/twin.hpp"

namespace fs = std::filesystem;

namespace smcva {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void save_manifest(const nlohmann::json& manifest, const std::string& out_dir) {
    std::ofstream out(fs::path(out_dir) / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest.json in " + out_dir);
    out << manifest.dump(2) << '\n';
}

void add_artifact(nlohmann::json& manifest, const std::string& name) {
    auto& list = manifest["artifacts"];
    for (const auto& a : list)
        if (a == name) return;
    list.push_back(name);
}

ModelSpec model_spec(const RunConfig& cfg) { return {cfg.d, cfg.dt, 1}; }

Path path_from_trajectory(const Eigen::MatrixXd& states, double g) {
    Path p;
    p.states = states;
    p.params.resize(1);
    p.params[0] = g;
    return p;
}

Eigen::MatrixXd load_trajectory(const std::string& file, int expect_cols) {
    CsvTable table = read_csv(file);
    if (table.data.cols() != expect_cols + 1)
        throw std::runtime_error("unexpected column count in " + file);
    return table.data.rightCols(expect_cols);
}

}  // namespace

nlohmann::json load_manifest(const std::string& out_dir) {
    std::ifstream in(fs::path(out_dir) / "manifest.json");
    if (!in)
        throw std::runtime_error("no manifest.json in " + out_dir +
                                 "; run `generate` first");
    nlohmann::json manifest;
    in >> manifest;
    return manifest;
}

Observations load_observations(const std::string& out_dir) {
    const nlohmann::json manifest = load_manifest(out_dir);
    CsvTable window = read_csv((fs::path(out_dir) / "observations.csv").string());
    CsvTable cont = read_csv((fs::path(out_dir) / "continuation.csv").string());

    Observations obs;
    for (std::size_t c = 1; c < window.header.size(); ++c) {
        const std::string& h = window.header[c];
        if (h.rfind("y_", 0) != 0)
            throw std::runtime_error("bad observations header field " + h);
        obs.measured.push_back(std::stoi(h.substr(2)));
    }
    obs.values = window.data.rightCols(window.data.cols() - 1);
    obs.continuation = cont.data.rightCols(cont.data.cols() - 1);
    return obs;
}

void run_generate(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);

    const ModelSpec spec = model_spec(cfg);
    Eigen::VectorXd p(1);
    p[0] = cfg.g_true;
    const std::vector<int> indices = measured_indices(cfg.d, cfg.l);

    const Eigen::MatrixXd truth =
        generate_truth(spec, p, cfg.n_window, cfg.t_pred, cfg.seed);
    NoiseSpec noise{cfg.noise_fraction, cfg.noise_range, cfg.seed};
    const Observations obs = apply_noise(truth, indices, cfg.n_window, noise);

    std::vector<int> all_cols(cfg.d);
    for (int i = 0; i < cfg.d; ++i) all_cols[i] = i;
    const fs::path dir(out_dir);
    write_trajectory_csv((dir / "truth.csv").string(), truth, "x", all_cols);
    write_trajectory_csv((dir / "observations.csv").string(), obs.values, "y",
                         indices);
    write_trajectory_csv((dir / "continuation.csv").string(), obs.continuation,
                         "y", indices, cfg.n_window + 1);

    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = cfg.to_json();
    manifest["derived"] = {
        {"r_m", cfg.r_m()},
        {"noise_halfwidth", cfg.noise_halfwidth()},
        {"measured_indices", indices},
    };
    manifest["artifacts"] = nlohmann::json::array();
    add_artifact(manifest, "truth.csv");
    add_artifact(manifest, "observations.csv");
    add_artifact(manifest, "continuation.csv");
    manifest["timestamps"]["generate"] = timestamp_now();
    save_manifest(manifest, out_dir);
}

void run_anneal(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    nlohmann::json manifest = load_manifest(out_dir);
    const Observations obs = load_observations(out_dir);
    if (obs.n_window() != cfg.n_window)
        throw std::runtime_error("observations window does not match config");

    const ModelSpec spec = model_spec(cfg);
    const double r_m = cfg.r_m();
    AnnealSchedule schedule{cfg.r_f0_ratio * r_m, cfg.alpha, cfg.beta_max};
    AnnealOptions options;
    options.n_inits = cfg.n_inits;
    OptimizerSettings settings;

    const AnnealResult result =
        anneal(spec, obs, r_m, schedule, options, settings, cfg.seed);
    const auto levels = action_levels(result);
    const auto scores = score_all(spec, result, obs, cfg.t_pred);
    const EndpointSelection sel = select_endpoints(result, scores);

    const fs::path dir(out_dir);
    {
        Eigen::MatrixXd data((cfg.beta_max + 1) * cfg.n_inits, 6);
        long row = 0;
        for (const auto& per_beta : levels)
            for (const ActionLevel& lvl : per_beta) {
                data(row, 0) = lvl.beta;
                data(row, 1) = lvl.r_f > 0.0
                                   ? std::log10(lvl.r_f / r_m)
                                   : -std::numeric_limits<double>::infinity();
                data(row, 2) = lvl.init_id;
                data(row, 3) = lvl.action.total;
                data(row, 4) = lvl.action.measurement_term;
                data(row, 5) = lvl.action.model_term;
                ++row;
            }
        write_csv((dir / "action_levels.csv").string(),
                  {"beta", "log10_rf_over_rm", "init_id", "action_total",
                   "action_meas", "action_model"},
                  data);
    }
    {
        Eigen::MatrixXd data(scores.size(), 3);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            data(i, 0) = scores[i].beta;
            data(i, 1) = scores[i].init_id;
            data(i, 2) = scores[i].mse;
        }
        write_csv((dir / "scores.csv").string(), {"beta", "init_id", "mse"},
                  data);
    }
    std::vector<int> all_cols(cfg.d);
    for (int i = 0; i < cfg.d; ++i) all_cols[i] = i;
    write_trajectory_csv((dir / "best_path.csv").string(), sel.best.path.states,
                         "x", all_cols);
    write_trajectory_csv((dir / "worst_path.csv").string(),
                         sel.worst.path.states, "x", all_cols);

    manifest["derived"]["r_f_star"] = sel.r_f_star;
    manifest["derived"]["best_g"] = sel.best.path.params[0];
    manifest["derived"]["worst_g"] = sel.worst.path.params[0];
    manifest["derived"]["best_cell"] = {{"beta", sel.best_score.beta},
                                        {"init_id", sel.best_score.init_id},
                                        {"mse", sel.best_score.mse}};
    manifest["derived"]["worst_cell"] = {{"beta", sel.worst_score.beta},
                                         {"init_id", sel.worst_score.init_id},
                                         {"mse", sel.worst_score.mse}};
    add_artifact(manifest, "action_levels.csv");
    add_artifact(manifest, "scores.csv");
    add_artifact(manifest, "best_path.csv");
    add_artifact(manifest, "worst_path.csv");
    manifest["timestamps"]["anneal"] = timestamp_now();
    save_manifest(manifest, out_dir);
}

void run_sample(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    nlohmann::json manifest = load_manifest(out_dir);
    if (!manifest["derived"].contains("r_f_star"))
        throw std::runtime_error("manifest has no annealing results; run `anneal` first");
    const Observations obs = load_observations(out_dir);
    const ModelSpec spec = model_spec(cfg);
    const fs::path dir(out_dir);

    const Path best = path_from_trajectory(
        load_trajectory((dir / "best_path.csv").string(), cfg.d),
        manifest["derived"]["best_g"]);
    const Path worst = path_from_trajectory(
        load_trajectory((dir / "worst_path.csv").string(), cfg.d),
        manifest["derived"]["worst_g"]);

    const BiasSpec bias = build_bias(best, worst, 1e-2, cfg.bias_cap_state,
                                     cfg.bias_cap_param);
    ActionConfig action_cfg{cfg.r_m(), manifest["derived"]["r_f_star"], &obs};
    ActionEvaluator eval(spec, action_cfg);
    LogDensity log_p = [&eval](const Path& p) { return eval.log_prob(p); };

    RunSettings run;
    run.n_walkers = cfg.walkers;
    run.burn_in = cfg.burn_in;
    run.n_steps = static_cast<int>(cfg.steps);
    run.thin = cfg.thin;
    run.step_scale = cfg.step_scale;
    run.bias_in_acceptance = cfg.bias_in_acceptance;

    EnsembleStats stats;
    const std::vector<ChainSample> samples =
        run_ensemble(bias, log_p, run, cfg.seed, &stats);
    const MarginalHistogram hist = marginalize(samples, 0);

    {
        // weights reported relative to the largest recorded bias weight
        double max_lw = -std::numeric_limits<double>::infinity();
        for (const auto& s : samples) max_lw = std::max(max_lw, s.log_weight);
        Eigen::MatrixXd data(samples.size(), 4);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            data(i, 0) = samples[i].walker_id;
            data(i, 1) = samples[i].step_index;
            data(i, 2) = std::exp(samples[i].log_weight - max_lw);
            data(i, 3) = samples[i].params[0];
        }
        write_csv((dir / "chain.csv").string(), {"walker", "step", "weight", "G"},
                  data);
    }
    {
        nlohmann::json report;
        report["param_index"] = 0;
        report["bin_edges"] = std::vector<double>(
            hist.bin_edges.data(), hist.bin_edges.data() + hist.bin_edges.size());
        report["mass"] = std::vector<double>(hist.mass.data(),
                                             hist.mass.data() + hist.mass.size());
        report["mean"] = hist.mean;
        report["rms"] = hist.rms;
        report["n_samples"] = hist.n_samples;
        report["total_weight"] = hist.total_weight;
        report["acceptance_rate"] = stats.acceptance_rate;
        std::ofstream out(dir / "report.json", std::ios::binary);
        out << report.dump(2) << '\n';
    }

    add_artifact(manifest, "chain.csv");
    add_artifact(manifest, "report.json");
    manifest["timestamps"]["sample"] = timestamp_now();
    save_manifest(manifest, out_dir);
}

void run_report(const std::string& out_dir) {
    nlohmann::json manifest = load_manifest(out_dir);
    const RunConfig cfg = RunConfig::from_json(manifest["config"]);
    const fs::path dir(out_dir);
    const ModelSpec spec = model_spec(cfg);

    // action-level figure data is the anneal export, re-emitted verbatim
    {
        CsvTable levels = read_csv((dir / "action_levels.csv").string());
        write_csv((dir / "fig_action_levels.csv").string(), levels.header,
                  levels.data);
    }

    // prediction overlay for the first measured component
    {
        const Observations obs = load_observations(out_dir);
        const Path best = path_from_trajectory(
            load_trajectory((dir / "best_path.csv").string(), cfg.d),
            manifest["derived"]["best_g"]);
        const int comp = obs.measured[0];
        const Eigen::VectorXd x_final = best.states.row(cfg.n_window);
        const Eigen::MatrixXd pred =
            integrate_trajectory(spec, x_final, best.params, cfg.t_pred);

        const double nan = std::numeric_limits<double>::quiet_NaN();
        Eigen::MatrixXd data(cfg.n_window + cfg.t_pred + 1, 4);
        for (int t = 0; t <= cfg.n_window + cfg.t_pred; ++t) {
            data(t, 0) = t;
            data(t, 1) = t <= cfg.n_window ? obs.values(t, 0)
                                           : obs.continuation(t - cfg.n_window - 1, 0);
            data(t, 2) = t <= cfg.n_window ? best.states(t, comp) : nan;
            data(t, 3) = t >= cfg.n_window ? pred(t - cfg.n_window, comp) : nan;
        }
        write_csv((dir / "fig_prediction.csv").string(),
                  {"t", "y", "x_est", "x_pred"}, data);
    }

    // histogram figure data from report.json
    {
        std::ifstream in(dir / "report.json");
        if (!in) throw std::runtime_error("no report.json; run `sample` first");
        nlohmann::json report;
        in >> report;
        const std::vector<double> edges = report["bin_edges"];
        const std::vector<double> mass = report["mass"];
        Eigen::MatrixXd data(mass.size(), 2);
        for (std::size_t b = 0; b < mass.size(); ++b) {
            data(b, 0) = 0.5 * (edges[b] + edges[b + 1]);
            data(b, 1) = mass[b];
        }
        write_csv((dir / "fig_histogram.csv").string(), {"G", "mass"}, data);
    }

    add_artifact(manifest, "fig_action_levels.csv");
    add_artifact(manifest, "fig_prediction.csv");
    add_artifact(manifest, "fig_histogram.csv");
    manifest["timestamps"]["report"] = timestamp_now();
    save_manifest(manifest, out_dir);
}

}  // namespace smcva
