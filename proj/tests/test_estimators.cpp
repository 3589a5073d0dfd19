#include "doctest.h"

#include <cmath>
#include <map>
#include <numbers>

#include "ordent/compat.hpp"
#include "ordent/errors.hpp"
#include "ordent/estimators.hpp"

using namespace ordent;

TEST_CASE("empirical distribution of the doubling map at n=2") {
    auto map = make_doubling();
    auto leb = make_measure("lebesgue");
    auto dist = empirical_pattern_distribution(map, leb, 2, 1'000'000, 7);
    CHECK(dist.total == 1'000'000);
    CHECK(dist.discarded_ties == 0);

    OrdinalPattern up, down;
    up.pi = {0, 1};
    down.pi = {1, 0};
    const double p_up = static_cast<double>(dist.count_of(rank(up))) / dist.total;
    const double p_down = static_cast<double>(dist.count_of(rank(down))) / dist.total;
    CHECK(std::abs(p_up - 0.5) <= 0.002);
    CHECK(std::abs(p_down - 0.5) <= 0.002);
}

TEST_CASE("empty sampling and determinism") {
    auto map = make_doubling();
    auto leb = make_measure("lebesgue");
    auto empty = empirical_pattern_distribution(map, leb, 3, 0, 1);
    CHECK(empty.total == 0);
    CHECK(empty.distinct() == 0);
    CHECK_THROWS_AS(permutation_entropy_estimate(empty), EmptyDistributionError);

    auto a = empirical_pattern_distribution(map, leb, 5, 40'000, 123, 1);
    auto b = empirical_pattern_distribution(map, leb, 5, 40'000, 123, 1);
    auto c = empirical_pattern_distribution(map, leb, 5, 40'000, 123, 4);
    CHECK(a.counts == b.counts);
    CHECK(a.counts == c.counts);  // worker-count invariance
    CHECK(a.total == c.total);
}

TEST_CASE("merge invariance") {
    auto map = make_tent();
    auto leb = make_measure("lebesgue");
    auto whole = empirical_pattern_distribution(map, leb, 4, 50'000, 9, 1);
    auto merged = empirical_pattern_distribution(map, leb, 4, 50'000, 9, 3);
    CHECK(whole.counts == merged.counts);
    const double v1 = permutation_entropy_estimate(whole).value;
    const double v2 = permutation_entropy_estimate(merged).value;
    CHECK(v1 == v2);  // bitwise: deterministic iteration order
}

TEST_CASE("permutation entropy estimates") {
    // degenerate: one pattern
    PatternDistribution single;
    single.n = 3;
    for (std::uint64_t i = 0; i < 100; ++i) single.add(0, i);
    CHECK(permutation_entropy_estimate(single).value == 0.0);

    // uniform over all six patterns of order 3: H = ln 6, value = ln6/3
    PatternDistribution uniform;
    uniform.n = 3;
    std::uint64_t idx = 0;
    for (std::uint64_t k = 0; k < 6; ++k)
        for (int r = 0; r < 600; ++r) uniform.add(k, idx++);
    CHECK(permutation_entropy_estimate(uniform).value ==
          doctest::Approx(std::log(6.0) / 3.0).epsilon(1e-12));

    // doubling at n=2: both patterns near mass 1/2, so about ln2/2
    auto map = make_doubling();
    auto leb = make_measure("lebesgue");
    auto dist = empirical_pattern_distribution(map, leb, 2, 200'000, 21);
    auto est = permutation_entropy_estimate(dist);
    CHECK(std::abs(est.value - std::numbers::ln2 / 2.0) <= 0.01);
    CHECK(est.std_error > 0.0);
    CHECK(est.std_error < 0.01);

    // plugin entropy never exceeds log of the observed support
    auto d8 = empirical_pattern_distribution(map, leb, 8, 20'000, 33);
    auto e8 = permutation_entropy_estimate(d8);
    CHECK(e8.value * 8 <= std::log(static_cast<double>(d8.distinct())) + 1e-12);

    // Miller-Madow nudges the plugin value up
    auto mm = permutation_entropy_estimate(d8, Estimator::miller_madow);
    CHECK(mm.value >= e8.value);
}

TEST_CASE("undersampled flag") {
    auto map = make_doubling();
    auto leb = make_measure("lebesgue");
    auto d = empirical_pattern_distribution(map, leb, 9, 500, 3);
    auto e = permutation_entropy_estimate(d);
    CHECK(e.has_flag("undersampled"));
}

TEST_CASE("exact dyadic entropy rates equal ln 2") {
    auto leb = make_measure("lebesgue");
    for (const char* name : {"doubling", "tent"}) {
        auto map = make_builtin(name);
        auto m = map.monotony_partition();
        for (int n : {1, 2, 5, 10}) {
            auto est = partition_entropy_rate_estimate(map, leb, m, n);
            CHECK(std::abs(est.value - std::numbers::ln2) <= 1e-12);
        }
        // difference estimator agrees on the exactly dyadic case
        auto diff = partition_entropy_rate_estimate(map, leb, m, 10, RateMode::exact_cells,
                                                    Estimator::difference);
        CHECK(std::abs(diff.value - std::numbers::ln2) <= 1e-12);
    }

    auto map = make_doubling();
    auto trivial = IntervalPartition::trivial(map.domain());
    CHECK(partition_entropy_rate_estimate(map, leb, trivial, 5).value == 0.0);
}

TEST_CASE("cell budget guard") {
    auto map = make_doubling();
    auto leb = make_measure("lebesgue");
    auto m = map.monotony_partition();
    CHECK_THROWS_AS(partition_entropy_rate_estimate(map, leb, m, 15, RateMode::exact_cells,
                                                    Estimator::quotient, 0, 0, 1000),
                    CellExplosionError);
}

TEST_CASE("sampled entropy rate approaches the exact one") {
    auto map = make_doubling();
    auto leb = make_measure("lebesgue");
    auto m = map.monotony_partition();
    auto est = partition_entropy_rate_estimate(map, leb, m, 6, RateMode::sampled,
                                               Estimator::quotient, 200'000, 5);
    CHECK(std::abs(est.value - std::numbers::ln2) <= 0.01);
}

TEST_CASE("rokhlin formula oracle values") {
    const double ln2 = std::numbers::ln2;
    CHECK(std::abs(rokhlin_formula_oracle(make_doubling(), 1e-9) - ln2) <= 1e-9);
    CHECK(std::abs(rokhlin_formula_oracle(make_tent(), 1e-9) - ln2) <= 1e-9);

    const double gauss_ks = std::numbers::pi * std::numbers::pi / (6.0 * ln2);
    CHECK(std::abs(rokhlin_formula_oracle(make_gauss(100), 1e-9) - gauss_ks) <= 1e-6);

    CHECK(std::abs(rokhlin_formula_oracle(make_logistic(), 1e-9) - ln2) <= 1e-6);

    const std::string pw = R"({"domain":[0,1],
        "pieces":[{"x0":0,"x1":0.5,"y0":0,"y1":1},{"x0":0.5,"x1":1,"y0":0,"y1":1}]})";
    CHECK_THROWS(rokhlin_formula_oracle(load_custom(pw), 1e-9));
}

TEST_CASE("bracket check") {
    EntropyEstimate hpe, lower;
    hpe.value = std::numbers::ln2;
    hpe.std_error = 0.001;
    CHECK(check_bounds(hpe, lower, std::numbers::ln2).pass);  // zero margin use

    hpe.value = std::numbers::ln2 + 1.0;  // exceeds the log-2 corollary excess
    hpe.std_error = 0.0;
    CHECK(!check_bounds(hpe, lower, std::numbers::ln2).pass);

    hpe.value = std::numbers::ln2 - 0.5;
    CHECK(!check_bounds(hpe, lower, std::numbers::ln2).pass);
}

TEST_CASE("entropy chain through the compatible-pattern sets") {
    // H(OP_n) <= H(P^(n) v OP_n) <= H(P^(n)) + sum_w mu(M(w)) ln|S_n(w)|
    auto leb = make_measure("lebesgue");
    for (const char* name : {"doubling", "tent"}) {
        auto map = make_builtin(name);
        for (int n : {3, 5}) {
            std::map<OrdinalPattern, double> op_mass;
            double h_joint = 0.0;
            double h_cells = 0.0;
            double err_term = 0.0;
            // enumerate all words of length n (both maps have full branches)
            const int n_words = 1 << n;
            for (int bits = 0; bits < n_words; ++bits) {
                std::vector<int> w(static_cast<std::size_t>(n));
                for (int k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] = (bits >> k) & 1;
                CompatReport rep = compatible_patterns_exact(map, leb, CylinderIndex{w});
                h_cells += phi(rep.cylinder_measure);
                err_term += rep.cylinder_measure * std::log(static_cast<double>(rep.count));
                for (std::size_t i = 0; i < rep.patterns.size(); ++i) {
                    op_mass[rep.patterns[i]] += rep.pattern_measures[i];
                    h_joint += phi(rep.pattern_measures[i]);
                }
            }
            double h_op = 0.0, mass = 0.0;
            for (const auto& [pat, m] : op_mass) {
                h_op += phi(m);
                mass += m;
            }
            CHECK(std::abs(mass - 1.0) <= 1e-9);
            CHECK(h_op <= h_joint + 1e-9);
            CHECK(h_joint <= h_cells + err_term + 1e-9);
        }
    }
}
