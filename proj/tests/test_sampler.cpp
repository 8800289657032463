#include <doctest.h>

#include <cmath>
#include <random>

#include "smcva/rng.hpp"
#include "smcva/sampler.hpp"

using namespace smcva;

namespace {

Path tiny_path(double state, double param) {
    Path p;
    p.states = RowMat::Constant(1, 1, state);
    p.params = Eigen::VectorXd::Constant(1, param);
    return p;
}

Path const_path(int n_times, int dim, double state, double param) {
    Path p;
    p.states = RowMat::Constant(n_times, dim, state);
    p.params = Eigen::VectorXd::Constant(1, param);
    return p;
}

// 1-D asymmetric bimodal target in the parameter, Gaussian in the state.
double bimodal_log_p(const Path& p) {
    const double x = p.params[0];
    const double s = p.states(0, 0);
    const double q = x * x - 1.0;
    return -3.0 * q * q - 0.3 * x - 0.5 * s * s;
}

}  // namespace

TEST_CASE("build_bias: constant distance gives sigma 4") {
    const Path best = const_path(5, 3, 1.0, 2.0);
    const Path worst = const_path(5, 3, 2.0, 3.0);
    const BiasSpec bias = build_bias(best, worst);
    CHECK(bias.sigma_state.isApproxToConstant(4.0, 0.0));
    CHECK(bias.sigma_param[0] == 4.0);
}

TEST_CASE("build_bias: max over time rule and zero floor") {
    Path best = const_path(4, 2, 0.0, 1.0);
    Path worst = best;
    worst.states(2, 1) = 0.5;   // one component, one time
    const BiasSpec bias = build_bias(best, worst);
    CHECK(bias.sigma_state[1] == 2.0);
    CHECK(bias.sigma_state[0] == 1e-2);   // floor for untouched component
    CHECK(bias.sigma_param[0] == 1e-2);

    const BiasSpec degenerate = build_bias(best, best);
    CHECK(degenerate.sigma_state.isApproxToConstant(1e-2, 0.0));
    CHECK(degenerate.sigma_param[0] == 1e-2);
}

TEST_CASE("build_bias: width caps clamp far-off endpoints") {
    const Path best = const_path(3, 2, 0.0, 10.0);
    const Path worst = const_path(3, 2, 5.0, 12.0);   // raw sigmas 20 and 8
    const BiasSpec bias = build_bias(best, worst, 1e-2, 1.0, 0.5);
    CHECK(bias.sigma_state.isApproxToConstant(1.0, 0.0));
    CHECK(bias.sigma_param[0] == 0.5);

    // caps above the raw widths leave them untouched
    const BiasSpec loose = build_bias(best, worst, 1e-2, 100.0, 100.0);
    CHECK(loose.sigma_state.isApproxToConstant(20.0, 0.0));
    CHECK(loose.sigma_param[0] == 8.0);

    CHECK_THROWS(build_bias(best, worst, 1e-2, 0.0, 1.0));
}

TEST_CASE("log_bias closed-form Gaussian values") {
    const Path center = const_path(2, 2, 0.0, 0.0);
    BiasSpec bias;
    bias.center = center;
    bias.sigma_state = Eigen::VectorXd::Constant(2, 1.5);
    bias.sigma_param = Eigen::VectorXd::Constant(1, 0.7);

    const double log2pi = std::log(2.0 * std::acos(-1.0));
    const double at_mode = -4.0 * (std::log(1.5) + 0.5 * log2pi) -
                           (std::log(0.7) + 0.5 * log2pi);
    CHECK(log_bias(center, bias) == doctest::Approx(at_mode).epsilon(1e-12));

    // one coordinate displaced by its sigma drops the log density by 1/2
    Path displaced = center;
    displaced.states(1, 0) = 1.5;
    CHECK(log_bias(displaced, bias) ==
          doctest::Approx(at_mode - 0.5).epsilon(1e-12));
    Path displaced_p = center;
    displaced_p.params[0] = 0.7;
    CHECK(log_bias(displaced_p, bias) ==
          doctest::Approx(at_mode - 0.5).epsilon(1e-12));

    // the density integrates to one along a 1-D slice (trapezoid oracle)
    const Path c1 = tiny_path(0.0, 0.0);
    BiasSpec b1;
    b1.center = c1;
    b1.sigma_state = Eigen::VectorXd::Constant(1, 0.9);
    b1.sigma_param = Eigen::VectorXd::Constant(1, 1.3);
    double integral = 0.0;
    const double h = 1e-3;
    for (double x = -10.0; x <= 10.0; x += h) {
        Path p = c1;
        p.states(0, 0) = x;
        // factor out the parameter slice at its mode
        integral += std::exp(log_bias(p, b1) - log_bias(c1, b1)) * h;
    }
    const double expected = std::sqrt(2.0 * std::acos(-1.0)) * 0.9;
    CHECK(integral == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("mh_step acceptance follows the action ratio") {
    BiasSpec bias;
    bias.center = tiny_path(0.0, 0.0);
    bias.sigma_state = Eigen::VectorXd::Constant(1, 1.0);
    bias.sigma_param = Eigen::VectorXd::Constant(1, 1.0);

    // constant log density: every proposal is accepted
    WalkerState walker;
    walker.path = tiny_path(0.1, 0.2);
    walker.rng = seed_stream(1, 0);
    LogDensity flat = [](const Path&) { return 0.0; };
    walker.log_p = 0.0;
    walker.log_b = log_bias(walker.path, bias);
    int accepted = 0;
    for (int i = 0; i < 500; ++i)
        if (mh_step(walker, bias, 0.05, flat, /*bias_in_acceptance=*/false))
            ++accepted;
    CHECK(accepted == 500);

    // proposed action always higher by ln 2: acceptance probability 1/2
    bool first = true;
    LogDensity ln2_worse = [&first](const Path&) {
        if (first) {
            first = false;
            return 0.0;
        }
        return -std::log(2.0);
    };
    WalkerState w2;
    w2.path = tiny_path(0.0, 0.0);
    w2.rng = seed_stream(2, 0);
    w2.log_p = 0.0;
    w2.log_b = log_bias(w2.path, bias);
    accepted = 0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        WalkerState w = w2;
        w.rng = seed_stream(3, i);
        if (mh_step(w, bias, 0.05, [](const Path&) { return -std::log(2.0); },
                    false))
            ++accepted;
    }
    const double rate = static_cast<double>(accepted) / trials;
    CHECK(rate == doctest::Approx(0.5).epsilon(0.03));

    // non-finite proposals are rejected and leave the walker bit-identical
    WalkerState w3;
    w3.path = tiny_path(0.3, -0.4);
    w3.rng = seed_stream(4, 0);
    w3.log_p = 0.0;
    w3.log_b = log_bias(w3.path, bias);
    const Path before = w3.path;
    LogDensity nan_fn = [](const Path&) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_FALSE(mh_step(w3, bias, 0.05, nan_fn, true));
    CHECK(w3.path.states == before.states);
    CHECK(w3.path.params == before.params);
    CHECK(w3.log_p == 0.0);
}

TEST_CASE("recording contract: thin=1, 5 steps gives 5 samples per walker") {
    BiasSpec bias;
    bias.center = tiny_path(0.0, 0.0);
    bias.sigma_state = Eigen::VectorXd::Constant(1, 1.0);
    bias.sigma_param = Eigen::VectorXd::Constant(1, 1.0);
    RunSettings run;
    run.n_walkers = 3;
    run.burn_in = 10;
    run.n_steps = 5;
    run.thin = 1;
    run.adapt_during_burn_in = false;
    run.step_scale = 0.1;
    LogDensity gauss = [](const Path& p) {
        return -0.5 * p.states(0, 0) * p.states(0, 0) -
               0.5 * p.params[0] * p.params[0];
    };
    const auto samples = run_ensemble(bias, gauss, run, 7);
    CHECK(samples.size() == 15);
    for (int w = 0; w < 3; ++w)
        for (int s = 1; s <= 5; ++s) {
            const ChainSample& cs = samples[w * 5 + s - 1];
            CHECK(cs.walker_id == w);
            CHECK(cs.step_index == s);
        }
}

TEST_CASE("determinism: the full sample sequence reproduces from the seed") {
    BiasSpec bias;
    bias.center = tiny_path(0.0, 0.0);
    bias.sigma_state = Eigen::VectorXd::Constant(1, 1.0);
    bias.sigma_param = Eigen::VectorXd::Constant(1, 1.0);
    RunSettings run;
    run.n_walkers = 4;
    run.burn_in = 50;
    run.n_steps = 200;
    run.thin = 10;
    LogDensity log_p = bimodal_log_p;
    const auto a = run_ensemble(bias, log_p, run, 99);
    const auto b = run_ensemble(bias, log_p, run, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].params == b[i].params);
        CHECK(a[i].log_weight == b[i].log_weight);
    }
}

TEST_CASE("gaussian calibration: weighted moments match the analytic target") {
    // target: state ~ N(1.2, 0.8^2), param ~ N(-0.5, 0.5^2); offset bias
    const double ms = 1.2, ss = 0.8, mp = -0.5, sp = 0.5;
    LogDensity log_p = [=](const Path& p) {
        const double ds = (p.states(0, 0) - ms) / ss;
        const double dp = (p.params[0] - mp) / sp;
        return -0.5 * ds * ds - 0.5 * dp * dp;
    };
    BiasSpec bias;
    bias.center = tiny_path(0.8, -0.2);   // deliberately off the target mean
    bias.sigma_state = Eigen::VectorXd::Constant(1, 2.0);
    bias.sigma_param = Eigen::VectorXd::Constant(1, 1.5);

    RunSettings run;
    run.n_walkers = 10;
    run.burn_in = 2000;
    run.n_steps = 50000;
    run.thin = 20;
    run.step_scale = 0.3;
    const auto samples = run_ensemble(bias, log_p, run, 2024);

    const MarginalHistogram hist = marginalize(samples, 0);
    // effective sample size for the standard error of the weighted mean
    double sw = 0.0, sw2 = 0.0;
    double max_lw = -1e300;
    for (const auto& s : samples) max_lw = std::max(max_lw, s.log_weight);
    for (const auto& s : samples) {
        const double w = std::exp(s.log_weight - max_lw);
        sw += w;
        sw2 += w * w;
    }
    const double ess = sw * sw / sw2;
    const double se = sp / std::sqrt(ess);
    CHECK(std::abs(hist.mean - mp) < 3.0 * se);
    CHECK(hist.rms * hist.rms == doctest::Approx(sp * sp).epsilon(0.05));

    const double state_mean = expectation(
        samples, [](const ChainSample& s) { return s.params[0]; });
    CHECK(state_mean == doctest::Approx(hist.mean).epsilon(1e-12));
}

TEST_CASE("importance weights undo the bias on the bimodal toy") {
    // quadrature oracle over the parameter marginal
    auto target = [](double x) {
        const double q = x * x - 1.0;
        return std::exp(-3.0 * q * q - 0.3 * x);
    };
    double z = 0.0, m1 = 0.0;
    const double h = 1e-4;
    for (double x = -5.0; x <= 5.0; x += h) {
        z += target(x) * h;
        m1 += x * target(x) * h;
    }
    const double true_mean = m1 / z;

    BiasSpec bias;
    bias.center = tiny_path(0.3, 0.5);   // offset toward the minor mode
    bias.sigma_state = Eigen::VectorXd::Constant(1, 2.0);
    bias.sigma_param = Eigen::VectorXd::Constant(1, 1.5);

    RunSettings run;
    run.n_walkers = 10;
    run.burn_in = 2000;
    run.n_steps = 100000;
    run.thin = 20;
    run.step_scale = 0.3;
    const auto samples = run_ensemble(bias, bimodal_log_p, run, 555);

    const double weighted = expectation(
        samples, [](const ChainSample& s) { return s.params[0]; });
    double unweighted = 0.0;
    for (const auto& s : samples) unweighted += s.params[0];
    unweighted /= static_cast<double>(samples.size());

    const double werr = std::abs(weighted - true_mean);
    CHECK(werr < 0.02 * std::max(1.0, std::abs(true_mean)));
    CHECK(std::abs(unweighted - true_mean) > 5.0 * werr);
}

TEST_CASE("marginalize hand examples") {
    auto sample_at = [](double g, double log_w) {
        ChainSample s;
        s.params = Eigen::VectorXd::Constant(1, g);
        s.log_weight = log_w;
        return s;
    };
    std::vector<ChainSample> two{sample_at(9.0, 0.0), sample_at(11.0, 0.0)};
    const MarginalHistogram h2 = marginalize(two, 0);
    CHECK(h2.mean == doctest::Approx(10.0));
    CHECK(h2.rms == doctest::Approx(1.0));
    CHECK(h2.mass.sum() == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<ChainSample> same{sample_at(3.0, 0.0), sample_at(3.0, 0.0)};
    CHECK(marginalize(same, 0).rms == 0.0);

    std::vector<ChainSample> weighted{sample_at(0.0, std::log(1.0)),
                                      sample_at(4.0, std::log(3.0))};
    CHECK(marginalize(weighted, 0).mean == doctest::Approx(3.0));

    CHECK_THROWS(marginalize({}, 0));
    CHECK_THROWS(marginalize(two, 1));
}

TEST_CASE("expectation of the constant function is exactly one") {
    std::vector<ChainSample> samples;
    auto rng = seed_stream(8, 0);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        ChainSample s;
        s.params = Eigen::VectorXd::Constant(1, u(rng));
        s.log_weight = u(rng);
        samples.push_back(s);
    }
    CHECK(expectation(samples, [](const ChainSample&) { return 1.0; }) == 1.0);
}
