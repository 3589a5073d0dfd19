#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ordent/compat.hpp"
#include "ordent/errors.hpp"

using namespace ordent;

TEST_CASE("lemma bound counts last-symbol matches") {
    CHECK(lemma_bound(CylinderIndex{0, 1, 0, 0}) == 4);
    CHECK(lemma_bound(CylinderIndex{0, 1}) == 1);
    CHECK(lemma_bound(CylinderIndex{7, 7, 7}) == 4);
    CHECK_THROWS_AS(lemma_bound(CylinderIndex{3}), ConfigError);
}

TEST_CASE("exact pattern sets on pinned words") {
    auto leb = make_measure("lebesgue");
    auto doubling = make_doubling();

    auto rep = compatible_patterns_exact(doubling, leb, CylinderIndex{0, 0, 0});
    REQUIRE(rep.count == 1);
    CHECK(rep.bound == 4);
    CHECK(rep.patterns[0].pi == std::vector<std::uint8_t>{0, 1, 2});
    CHECK(rep.count_within_bound);
    CHECK(rep.cylinder_measure == doctest::Approx(0.125));

    auto rep2 = compatible_patterns_exact(doubling, leb, CylinderIndex{1, 0});
    REQUIRE(rep2.count == 1);
    CHECK(rep2.bound == 1);
    CHECK(rep2.patterns[0].pi == std::vector<std::uint8_t>{1, 0});

    auto tent = make_tent();
    auto rep3 = compatible_patterns_exact(tent, leb, CylinderIndex{1, 1});
    REQUIRE(rep3.count == 2);
    CHECK(rep3.bound == 2);
    REQUIRE(rep3.roots.size() == 1);
    CHECK(rep3.roots[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("per-d factorization and case split") {
    auto leb = make_measure("lebesgue");
    auto doubling = make_doubling();
    auto tent = make_tent();

    CHECK(per_d_factorization(doubling, leb, CylinderIndex{0, 0, 0}) ==
          std::vector<std::uint64_t>{1, 1});
    CHECK(per_d_factorization(tent, leb, CylinderIndex{1, 1}) == std::vector<std::uint64_t>{2});

    // all labels distinct: every per-d count forced to 1
    auto rep = compatible_patterns_exact(doubling, leb, CylinderIndex{0, 1});
    CHECK(rep.per_d_counts == std::vector<std::uint64_t>{1});
    CHECK(rep.count == 1);
    auto rep2 = compatible_patterns_exact(tent, leb, CylinderIndex{0, 1});
    CHECK(rep2.per_d_counts == std::vector<std::uint64_t>{1});
    CHECK(rep2.count == 1);
}

TEST_CASE("side invariants hold on all short words") {
    auto leb = make_measure("lebesgue");
    for (const char* name : {"doubling", "tent"}) {
        auto map = make_builtin(name);
        for (int n = 2; n <= 5; ++n) {
            for (int bits = 0; bits < (1 << n); ++bits) {
                std::vector<int> w(static_cast<std::size_t>(n));
                for (int k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] = (bits >> k) & 1;
                auto rep = compatible_patterns_exact(map, leb, CylinderIndex{w});
                CHECK(rep.count_within_bound);
                CHECK(rep.factorization_ok);
                CHECK(rep.per_d_case_split_ok);
                CHECK(rep.constant_bits_ok);
                CHECK(rep.propagation_ok);
                CHECK(rep.scan_consistent);
            }
        }
    }
}

TEST_CASE("sampling never finds patterns missing from the exact set") {
    auto leb = make_measure("lebesgue");
    std::uint64_t seed = 1;
    for (const char* name : {"doubling", "tent"}) {
        auto map = make_builtin(name);
        for (int bits = 0; bits < (1 << 5); ++bits) {
            std::vector<int> w(5);
            for (int k = 0; k < 5; ++k) w[static_cast<std::size_t>(k)] = (bits >> k) & 1;
            auto rep = compatible_patterns_exact(map, leb, CylinderIndex{w});
            auto sampled = sampled_patterns(map, CylinderIndex{w}, 10'000, seed++);
            for (const auto& p : sampled) {
                const bool found =
                    std::find(rep.patterns.begin(), rep.patterns.end(), p) != rep.patterns.end();
                CHECK(found);
            }
        }
    }
}

TEST_CASE("verify_lemma runs exhaustively") {
    auto leb = make_measure("lebesgue");

    auto doubling_sum = verify_lemma(make_doubling(), leb, 4);
    CHECK(doubling_sum.violations == 0);
    CHECK(doubling_sum.words_checked == 4 + 8 + 16);
    CHECK(doubling_sum.all_side_checks_ok);
    CHECK(doubling_sum.all_scans_consistent);
    for (double term : doubling_sum.error_terms) CHECK(term <= std::numbers::ln2 + 1e-12);

    auto tent_sum = verify_lemma(make_tent(), leb, 4);
    CHECK(tent_sum.violations == 0);
    CHECK(!tent_sum.equality_witnesses.empty());  // (1,1) attains the bound
    bool has_11 = false;
    for (const auto& w : tent_sum.equality_witnesses)
        if (w.word == std::vector<int>{1, 1}) has_11 = true;
    CHECK(has_11);

    CHECK_THROWS_AS(verify_lemma(make_doubling(), leb, 9), ConfigError);
}

TEST_CASE("verify_lemma on the truncated gauss map") {
    auto gaussmu = make_measure("gauss");
    auto gauss = make_gauss(8);
    auto sum = verify_lemma(gauss, gaussmu, 3);
    CHECK(sum.violations == 0);
    CHECK(sum.words_checked == 8 * 8 + 8 * 8 * 8);
    CHECK(sum.tail_word_mass > 0.0);
    CHECK(sum.tail_word_mass < 0.5);
    CHECK(sum.all_side_checks_ok);
}

TEST_CASE("singleton and invalid words are rejected") {
    auto leb = make_measure("lebesgue");
    auto gauss = make_gauss(5);
    // the {0} cell is a singleton branch somewhere in the branch list
    int singleton_idx = -1;
    for (std::size_t i = 0; i < gauss.branches().size(); ++i)
        if (gauss.branches()[i].is_singleton) singleton_idx = static_cast<int>(i);
    REQUIRE(singleton_idx >= 0);
    CHECK_THROWS_AS(
        compatible_patterns_exact(gauss, leb, CylinderIndex{singleton_idx, singleton_idx}),
        EmptyCylinderError);
    CHECK_THROWS_AS(compatible_patterns_exact(make_doubling(), leb, CylinderIndex{0, 7}),
                    OutOfDomainError);
}
