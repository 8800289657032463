#include "smcva/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smcva/action.hpp"

namespace smcva {

double RunConfig::r_m() const {
    return precision_from_uniform_halfwidth(noise_halfwidth());
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) {
        throw std::invalid_argument("config: " + msg);
    };
    if (d < 4) fail("model.d must be >= 4");
    if (!(dt > 0.0)) fail("model.dt must be > 0");
    if (n_window < 1) fail("window.n_window must be >= 1");
    if (t_pred < 1) fail("window.t_pred must be >= 1");
    if (!(noise_fraction >= 0.0)) fail("noise.fraction must be >= 0");
    if (!(noise_range > 0.0)) fail("noise.range must be > 0");
    if (!(noise_halfwidth() > 0.0)) fail("noise amplitude must be > 0 (r_m is 3/a^2)");
    if (l < 1 || l > d) fail("measurement.l must satisfy 1 <= l <= model.d");
    if (!(r_f0_ratio > 0.0)) fail("schedule.r_f0_ratio must be > 0");
    if (!(alpha > 1.0)) fail("schedule.alpha must be > 1");
    if (beta_max < 0) fail("schedule.beta_max must be >= 0");
    if (n_inits < 2) fail("schedule.n_inits must be >= 2");
    if (walkers < 1) fail("sampler.walkers must be >= 1");
    if (burn_in < 0) fail("sampler.burn_in must be >= 0");
    if (steps < 1) fail("sampler.steps must be >= 1");
    if (thin < 1) fail("sampler.thin must be >= 1");
    if (!(step_scale > 0.0)) fail("sampler.step_scale must be > 0");
    if (!(bias_cap_state > 0.0)) fail("sampler.bias_cap_state must be > 0");
    if (!(bias_cap_param > 0.0)) fail("sampler.bias_cap_param must be > 0");
}

RunConfig RunConfig::profile(const std::string& name) {
    RunConfig cfg;
    if (name == "desk") return cfg;
    if (name == "paper") {
        cfg.n_inits = 100;
        cfg.walkers = 100;
        cfg.steps = 1000000;
        return cfg;
    }
    throw std::invalid_argument("config: unknown profile '" + name + "'");
}

void RunConfig::apply_key(const std::string& key, const std::string& value) {
    auto as_int = [&](int& dst) { dst = std::stoi(value); };
    auto as_long = [&](long& dst) { dst = std::stol(value); };
    auto as_real = [&](double& dst) { dst = std::stod(value); };
    auto as_bool = [&](bool& dst) {
        if (value == "true" || value == "1") dst = true;
        else if (value == "false" || value == "0") dst = false;
        else throw std::invalid_argument("config: bad boolean for " + key);
    };

    if (key == "model.d") as_int(d);
    else if (key == "model.dt") as_real(dt);
    else if (key == "model.g_true") as_real(g_true);
    else if (key == "window.n_window") as_int(n_window);
    else if (key == "window.t_pred") as_int(t_pred);
    else if (key == "noise.fraction") as_real(noise_fraction);
    else if (key == "noise.range") as_real(noise_range);
    else if (key == "measurement.l") as_int(l);
    else if (key == "schedule.r_f0_ratio") as_real(r_f0_ratio);
    else if (key == "schedule.alpha") as_real(alpha);
    else if (key == "schedule.beta_max") as_int(beta_max);
    else if (key == "schedule.n_inits") as_int(n_inits);
    else if (key == "sampler.walkers") as_int(walkers);
    else if (key == "sampler.burn_in") as_int(burn_in);
    else if (key == "sampler.steps") as_long(steps);
    else if (key == "sampler.thin") as_int(thin);
    else if (key == "sampler.step_scale") as_real(step_scale);
    else if (key == "sampler.bias_in_acceptance") as_bool(bias_in_acceptance);
    else if (key == "sampler.bias_cap_state") as_real(bias_cap_state);
    else if (key == "sampler.bias_cap_param") as_real(bias_cap_param);
    else if (key == "seed") seed = std::stoull(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        // skip blank lines
        std::string stripped = line;
        stripped.erase(0, stripped.find_first_not_of(" \t\r"));
        if (stripped.empty()) continue;
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        apply_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

nlohmann::json RunConfig::to_json() const {
    return {
        {"model", {{"d", d}, {"dt", dt}, {"g_true", g_true}}},
        {"window", {{"n_window", n_window}, {"t_pred", t_pred}}},
        {"noise", {{"fraction", noise_fraction}, {"range", noise_range}}},
        {"measurement", {{"l", l}}},
        {"schedule",
         {{"r_f0_ratio", r_f0_ratio},
          {"alpha", alpha},
          {"beta_max", beta_max},
          {"n_inits", n_inits}}},
        {"sampler",
         {{"walkers", walkers},
          {"burn_in", burn_in},
          {"steps", steps},
          {"thin", thin},
          {"step_scale", step_scale},
          {"bias_in_acceptance", bias_in_acceptance},
          {"bias_cap_state", bias_cap_state},
          {"bias_cap_param", bias_cap_param}}},
        {"seed", seed},
    };
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    c.d = j.at("model").at("d");
    c.dt = j.at("model").at("dt");
    c.g_true = j.at("model").at("g_true");
    c.n_window = j.at("window").at("n_window");
    c.t_pred = j.at("window").at("t_pred");
    c.noise_fraction = j.at("noise").at("fraction");
    c.noise_range = j.at("noise").at("range");
    c.l = j.at("measurement").at("l");
    c.r_f0_ratio = j.at("schedule").at("r_f0_ratio");
    c.alpha = j.at("schedule").at("alpha");
    c.beta_max = j.at("schedule").at("beta_max");
    c.n_inits = j.at("schedule").at("n_inits");
    c.walkers = j.at("sampler").at("walkers");
    c.burn_in = j.at("sampler").at("burn_in");
    c.steps = j.at("sampler").at("steps");
    c.thin = j.at("sampler").at("thin");
    c.step_scale = j.at("sampler").at("step_scale");
    c.bias_in_acceptance = j.at("sampler").at("bias_in_acceptance");
    c.bias_cap_state = j.at("sampler").at("bias_cap_state");
    c.bias_cap_param = j.at("sampler").at("bias_cap_param");
    c.seed = j.at("seed");
    return c;
}

}  // namespace smcva
