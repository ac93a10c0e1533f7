#include <doctest.h>

#include <cmath>
#include <random>

#include "epiflow/shapley.hpp"

using namespace epiflow;

namespace {

AttributionDataset planted_dataset(int rows, double theta, std::uint64_t seed,
                                   bool shuffle_labels = false) {
    // Rule: strict-first iff inflow > theta; other features are noise.
    AttributionDataset d;
    d.feature_names = {"origin_I", "dest_R", "inflow", "noise"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < rows; ++i) {
        AttributionRow r;
        r.cycle = i;
        r.dest = "AA";
        r.origin = "BB";
        const double inflow = 2000.0 * u(rng);
        r.features = {500.0 * u(rng), 300.0 * u(rng), inflow, u(rng)};
        r.strict_first = inflow > theta ? 1 : 0;
        d.rows.push_back(std::move(r));
    }
    if (shuffle_labels) {
        std::vector<int> labels;
        for (const auto& r : d.rows) labels.push_back(r.strict_first);
        std::shuffle(labels.begin(), labels.end(), rng);
        for (std::size_t i = 0; i < d.rows.size(); ++i) d.rows[i].strict_first = labels[i];
    }
    return d;
}

double accuracy(const BaggedForest& f, const AttributionDataset& d) {
    int correct = 0;
    for (const auto& r : d.rows) {
        const int pred = f.predict(r.features) >= 0.5 ? 1 : 0;
        correct += pred == r.strict_first;
    }
    return static_cast<double>(correct) / d.rows.size();
}

}  // namespace

TEST_CASE("additive model recovers the closed form phi_j = a_j (x_j - mean_j)") {
    const std::vector<double> a = {2.0, -1.5, 0.75, 4.0};
    const PredictFn f = [&](const std::vector<double>& x) {
        double s = 1.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += a[j] * x[j];
        return s;
    };
    const std::vector<double> instance = {1.0, 2.0, -0.5, 3.0};
    const std::vector<double> background = {0.5, 0.5, 0.5, 0.5};
    const auto phi = shapley_values(f, instance, background);
    for (std::size_t j = 0; j < a.size(); ++j)
        CHECK(phi[j] == doctest::Approx(a[j] * (instance[j] - background[j])).epsilon(1e-12));
}

TEST_CASE("constant model gets zero attribution everywhere") {
    const PredictFn f = [](const std::vector<double>&) { return 3.25; };
    const auto phi = shapley_values(f, std::vector<double>{1, 2, 3}, std::vector<double>{0, 0, 0});
    for (double p : phi) CHECK(p == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("efficiency holds on random nonlinear functions") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 9);  // M <= 10
        std::vector<double> w(m), instance(m), background(m);
        for (int j = 0; j < m; ++j) {
            w[j] = u(rng);
            instance[j] = u(rng);
            background[j] = u(rng);
        }
        const PredictFn f = [&](const std::vector<double>& x) {
            double s = 0.0, prod = 1.0;
            for (int j = 0; j < m; ++j) {
                s += w[j] * x[j];
                prod *= 1.0 + 0.3 * x[j] * w[(j + 1) % m];
            }
            return s + prod;
        };
        const auto phi = shapley_values(f, instance, background);
        double total = 0.0;
        for (double p : phi) total += p;
        CHECK(std::fabs(total - (f(instance) - f(background))) <= 1e-9);
    }
}

TEST_CASE("symmetric features receive equal attribution") {
    const PredictFn f = [](const std::vector<double>& x) {
        return x[0] + x[1] + 3.0 * x[0] * x[1] + 0.5 * x[2];
    };
    const std::vector<double> instance = {0.8, 0.8, 0.3};
    const std::vector<double> background = {0.1, 0.1, 0.9};
    const auto phi = shapley_values(f, instance, background);
    CHECK(phi[0] == doctest::Approx(phi[1]).epsilon(1e-12));
}

TEST_CASE("more than 20 features is an explicit size error") {
    const PredictFn f = [](const std::vector<double>&) { return 0.0; };
    const std::vector<double> x(21, 0.0);
    CHECK_THROWS_AS(shapley_values(f, x, x), SizeError);
}

TEST_CASE("bagged trees") {
    SUBCASE("linearly separable data trains to >= 0.95 accuracy") {
        const AttributionDataset d = planted_dataset(300, 1000.0, 5);
        const BaggedForest f = build_attribution_model(d, 7);
        CHECK_FALSE(f.degenerate);
        CHECK(accuracy(f, d) >= 0.95);
    }
    SUBCASE("label-shuffled data scores near the class prior") {
        const AttributionDataset d = planted_dataset(400, 1400.0, 6, true);
        double prior_pos = 0;
        for (const auto& r : d.rows) prior_pos += r.strict_first;
        prior_pos /= d.rows.size();
        const double prior = std::max(prior_pos, 1.0 - prior_pos);

        const BaggedForest f = build_attribution_model(d, 8);
        // In-bag evaluation of memorized noise stays near the majority-class
        // rate: no real signal exists to lift it far above the prior.
        CHECK(std::fabs(accuracy(f, d) - prior) <= 0.1);
    }
    SUBCASE("single-class data degenerates to a flagged constant") {
        AttributionDataset d = planted_dataset(100, -1.0, 9);  // all strict
        const BaggedForest f = build_attribution_model(d, 3);
        CHECK(f.degenerate);
        CHECK(f.predict(d.rows[0].features) == doctest::Approx(1.0));
    }
    SUBCASE("fewer than 50 rows is an error") {
        const AttributionDataset d = planted_dataset(49, 1000.0, 4);
        CHECK_THROWS_AS(build_attribution_model(d, 1), ValidationError);
    }
}

TEST_CASE("planted rule ranks inflow as the top attribution") {
    const AttributionDataset d = planted_dataset(400, 1000.0, 11);
    const BaggedForest f = build_attribution_model(d, 13);
    const auto background = d.background_mean();
    const PredictFn fn = f.as_function();

    // Mean |phi| per feature over a sample of instances.
    std::vector<double> mean_abs(d.feature_names.size(), 0.0);
    for (int i = 0; i < 40; ++i) {
        const auto phi = shapley_values(fn, d.rows[i].features, background);
        for (std::size_t j = 0; j < phi.size(); ++j) mean_abs[j] += std::fabs(phi[j]);
    }
    std::size_t top = 0;
    for (std::size_t j = 1; j < mean_abs.size(); ++j)
        if (mean_abs[j] > mean_abs[top]) top = j;
    CHECK(d.feature_names[top] == "inflow");
}
