#include <doctest.h>

#include <cmath>
#include <random>

#include "smcva/action.hpp"
#include "smcva/rng.hpp"

using namespace smcva;

namespace {

const ModelSpec spec11{11, 0.025, 1};

Eigen::VectorXd g10() {
    Eigen::VectorXd p(1);
    p << 10.0;
    return p;
}

Observations make_obs(const Eigen::MatrixXd& truth,
                      const std::vector<int>& idx, int n_window) {
    return apply_noise(truth, idx, n_window, NoiseSpec{0.0, 20.0, 0});
}

Path random_path(int n_window, int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    Path p;
    p.states.resize(n_window + 1, dim);
    for (int t = 0; t <= n_window; ++t)
        for (int a = 0; a < dim; ++a) p.states(t, a) = u(rng);
    p.params.resize(1);
    p.params[0] = 5.0 + 0.5 * u(rng);
    return p;
}

}  // namespace

TEST_CASE("zero action when the path matches data and r_f = 0") {
    const auto truth = generate_truth(spec11, g10(), 30, 0, 1);
    const auto idx = measured_indices(11, 5);
    const Observations obs = make_obs(truth, idx, 30);
    Path path;
    path.states = truth.topRows(31);
    path.params = g10();
    const ActionValue v = action(path, spec11, ActionConfig{1.0, 0.0, &obs});
    CHECK(v.total == 0.0);
    CHECK(v.measurement_term == 0.0);
    CHECK(v.model_term == 0.0);
}

TEST_CASE("single-residual hand value: r_m=2, x-y=1 gives total 1") {
    // one measured variable, two times; only the t=0 entry off by one
    Observations obs;
    obs.measured = {0};
    obs.values = Eigen::MatrixXd::Zero(2, 1);
    Path path;
    path.states = RowMat::Zero(2, 4);
    path.states(0, 0) = 1.0;
    path.params = Eigen::VectorXd::Zero(1);
    const ModelSpec spec{4, 0.025, 1};
    const ActionValue v = action(path, spec, ActionConfig{2.0, 0.0, &obs});
    CHECK(v.total == doctest::Approx(1.0));
}

TEST_CASE("exact model trajectory has zero model term for any r_f") {
    const auto truth = generate_truth(spec11, g10(), 40, 0, 2);
    const auto idx = measured_indices(11, 2);
    const Observations obs = make_obs(truth, idx, 40);
    Path path;
    path.states = truth.topRows(41);
    path.params = g10();
    for (double r_f : {0.0, 1.0, 100.0}) {
        const ActionValue v = action(path, spec11, ActionConfig{6.5, r_f, &obs});
        CHECK(v.model_term <= 1e-18);
    }
}

TEST_CASE("action components are nonnegative and additive") {
    auto rng = seed_stream(5, 0);
    const auto truth = generate_truth(spec11, g10(), 25, 0, 3);
    const Observations obs = make_obs(truth, measured_indices(11, 7), 25);
    for (int trial = 0; trial < 10; ++trial) {
        const Path path = random_path(25, 11, rng);
        const ActionValue v = action(path, spec11, ActionConfig{6.5, 2.0, &obs});
        CHECK(v.measurement_term >= 0.0);
        CHECK(v.model_term >= 0.0);
        CHECK(v.total == v.measurement_term + v.model_term);
    }
}

TEST_CASE("total is strictly increasing in r_f at fixed nonzero residual") {
    auto rng = seed_stream(6, 0);
    const auto truth = generate_truth(spec11, g10(), 25, 0, 4);
    const Observations obs = make_obs(truth, measured_indices(11, 4), 25);
    const Path path = random_path(25, 11, rng);
    double prev = action(path, spec11, ActionConfig{6.5, 0.0, &obs}).total;
    for (double r_f : {0.5, 1.0, 4.0, 32.0}) {
        const double cur = action(path, spec11, ActionConfig{6.5, r_f, &obs}).total;
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("gradient is zero at a zero-action path") {
    const auto truth = generate_truth(spec11, g10(), 30, 0, 7);
    const Observations obs = make_obs(truth, measured_indices(11, 5), 30);
    Path path;
    path.states = truth.topRows(31);
    path.params = g10();
    const Eigen::VectorXd grad =
        action_gradient(path, spec11, ActionConfig{6.5, 10.0, &obs});
    CHECK(grad.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("r_f = 0 leaves unmeasured state gradients at zero") {
    auto rng = seed_stream(8, 0);
    const auto truth = generate_truth(spec11, g10(), 20, 0, 8);
    const auto idx = measured_indices(11, 4);
    const Observations obs = make_obs(truth, idx, 20);
    const Path path = random_path(20, 11, rng);
    const Eigen::VectorXd grad =
        action_gradient(path, spec11, ActionConfig{6.5, 0.0, &obs});
    for (int t = 0; t <= 20; ++t)
        for (int a = 0; a < 11; ++a) {
            const bool measured =
                std::find(idx.begin(), idx.end(), a) != idx.end();
            if (!measured) CHECK(grad[t * 11 + a] == 0.0);
        }
    // parameters never enter the measurement term
    CHECK(grad[21 * 11] == 0.0);
}

TEST_CASE("analytic gradient matches central finite differences") {
    auto rng = seed_stream(9, 0);
    const auto truth = generate_truth(spec11, g10(), 165, 0, 9);
    const Observations obs = make_obs(truth, measured_indices(11, 7), 165);
    const ActionConfig cfg{6.5, 3.0, &obs};
    const ActionEvaluator eval(spec11, cfg);

    const Path path = random_path(165, 11, rng);
    Eigen::VectorXd grad;
    eval.value_and_gradient(path, grad);

    const double h = 1e-6;
    Eigen::VectorXd flat = path.flatten();
    auto value_at = [&](const Eigen::VectorXd& v) {
        return eval.value(Path::unflatten(v, 165, 11, 1)).total;
    };
    // spot-check a spread of coordinates plus the parameter
    std::uniform_int_distribution<int> pick(0, static_cast<int>(flat.size()) - 2);
    std::vector<int> coords{0, 5, 11 * 80 + 3, 11 * 165 + 10,
                            static_cast<int>(flat.size()) - 1};
    for (int k = 0; k < 40; ++k) coords.push_back(pick(rng));
    double max_diff = 0.0, max_fd = 0.0;
    for (int c : coords) {
        Eigen::VectorXd vp = flat, vm = flat;
        vp[c] += h;
        vm[c] -= h;
        const double fd = (value_at(vp) - value_at(vm)) / (2 * h);
        max_diff = std::max(max_diff, std::abs(grad[c] - fd));
        max_fd = std::max(max_fd, std::abs(fd));
    }
    CHECK(max_diff / max_fd < 1e-5);
}

TEST_CASE("log_prob is the negative total") {
    auto rng = seed_stream(10, 0);
    const auto truth = generate_truth(spec11, g10(), 15, 0, 10);
    const Observations obs = make_obs(truth, measured_indices(11, 2), 15);
    const ActionConfig cfg{6.5, 1.0, &obs};
    const Path path = random_path(15, 11, rng);
    CHECK(log_prob(path, spec11, cfg) ==
          doctest::Approx(-action(path, spec11, cfg).total));
}

TEST_CASE("shape mismatches are rejected") {
    const auto truth = generate_truth(spec11, g10(), 10, 0, 11);
    const Observations obs = make_obs(truth, measured_indices(11, 2), 10);
    Path path;
    path.states = RowMat::Zero(12, 11);   // one time too many for the window
    path.params = g10();
    CHECK_THROWS(action(path, spec11, ActionConfig{6.5, 1.0, &obs}));
    CHECK_THROWS(action(path, spec11, ActionConfig{0.0, 1.0, &obs}));
}
