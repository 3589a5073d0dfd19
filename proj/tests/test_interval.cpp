#include "doctest.h"

#include <vector>

#include "ordent/errors.hpp"
#include "ordent/interval.hpp"
#include "ordent/rng.hpp"

using namespace ordent;

namespace {

IntervalPartition random_partition(std::uint64_t seed, std::uint64_t stream, int cells) {
    std::vector<double> cuts{0.0, 1.0};
    for (int i = 0; i < cells - 1; ++i)
        cuts.push_back(counter_uniform(seed, stream, static_cast<std::uint64_t>(i)));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Interval> cs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const bool last = (i + 2 == cuts.size());
        cs.push_back(last ? Interval::closed(cuts[i], cuts[i + 1])
                          : Interval::half_open(cuts[i], cuts[i + 1]));
    }
    return IntervalPartition(Interval::closed(0.0, 1.0), cs, {});
}

}  // namespace

TEST_CASE("normalize merges adjacent and overlapping cells") {
    auto u = normalize({Interval::half_open(0.0, 0.5), Interval::half_open(0.5, 1.0)});
    REQUIRE(u.size() == 1);
    CHECK(u.cells()[0] == Interval::half_open(0.0, 1.0));

    auto v = normalize({Interval::closed(0.3, 0.6), Interval::closed(0.1, 0.4)});
    REQUIRE(v.size() == 1);
    CHECK(v.cells()[0] == Interval::closed(0.1, 0.6));

    CHECK(normalize({}).empty());
}

TEST_CASE("normalize keeps genuinely separated cells and is idempotent") {
    auto u = normalize({Interval(0.5, 1.0, false, false), Interval::half_open(0.0, 0.5)});
    CHECK(u.size() == 2);  // the point 0.5 is missing: not connected

    CounterRng rng(42, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Interval> raw;
        const int k = 1 + static_cast<int>(rng.below(6));
        for (int i = 0; i < k; ++i) {
            double a = rng.uniform(), b = rng.uniform();
            if (a > b) std::swap(a, b);
            raw.push_back(Interval(a, b, rng.below(2) == 0, rng.below(2) == 0));
        }
        auto once = normalize(raw);
        auto twice = IntervalUnion::normalize(once.cells());
        CHECK(once == twice);
    }
}

TEST_CASE("interval union set operations") {
    auto a = normalize({Interval::half_open(0.0, 0.5)});
    auto b = normalize({Interval::half_open(0.25, 0.75)});
    CHECK(a.intersect(b).length() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(a.unite(b).length() == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(a.subtract(b).length() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(a.sym_diff_length(b) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a.sym_diff_length(a) == 0.0);

    // singleton subtraction leaves two half-lines
    auto c = normalize({Interval::closed(0.0, 1.0)});
    auto s = normalize({Interval::singleton(0.5)});
    auto d = c.subtract(s);
    CHECK(d.size() == 2);
    CHECK(d.length() == doctest::Approx(1.0));
    CHECK(!d.contains(0.5));
}

TEST_CASE("contains respects endpoint topology") {
    Interval iv(0.25, 0.5, true, false);
    CHECK(iv.contains(0.25));
    CHECK(!iv.contains(0.5));
    auto u = normalize({iv, Interval::singleton(0.75)});
    CHECK(u.contains(0.75));
    CHECK(!u.contains(0.6));
}

TEST_CASE("refine computes the common refinement") {
    auto p = IntervalPartition(Interval::closed(0.0, 1.0),
                               {Interval::half_open(0.0, 0.5), Interval::closed(0.5, 1.0)}, {});
    auto q = IntervalPartition(Interval::closed(0.0, 1.0),
                               {Interval::half_open(0.0, 0.25), Interval::closed(0.25, 1.0)}, {});
    auto r = refine(p, q);
    REQUIRE(r.size() == 3);

    // idempotence: P ∨ P has the cells of P
    auto pp = refine(p, p);
    REQUIRE(pp.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(pp.cells()[i] == p.cells()[i]);

    // identity: {Ω} ∨ Q = Q
    auto triv = IntervalPartition::trivial(Interval::closed(0.0, 1.0));
    auto tq = refine(triv, q);
    REQUIRE(tq.size() == q.size());

    // domain mismatch
    auto other = IntervalPartition::trivial(Interval::closed(0.0, 2.0));
    CHECK_THROWS_AS(refine(p, other), DomainMismatchError);
}

TEST_CASE("refinement cells are disjoint and cover the domain") {
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_partition(7, 100 + trial, 6);
        auto q = random_partition(9, 200 + trial, 5);
        auto r = refine(p, q);
        double total = 0.0;
        for (const auto& c : r.cells()) total += c.length();
        CHECK(std::abs(total - 1.0) <= 1e-12);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = i + 1; j < r.size(); ++j)
                CHECK(r.cells()[i].intersect(r.cells()[j]).length() == 0.0);
    }
}

TEST_CASE("split_by returns the covering cells") {
    auto p = IntervalPartition(
        Interval::closed(0.0, 1.0),
        {Interval::half_open(0.0, 0.25), Interval::half_open(0.25, 0.5),
         Interval::closed(0.5, 1.0)},
        {"a", "b", "c"});
    auto a = normalize({Interval::half_open(0.0, 0.5)});
    auto cells = split_by(a, p);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].first == "a");
    CHECK(cells[1].first == "b");

    // full set: all cells
    auto omega = normalize({Interval::closed(0.0, 1.0)});
    CHECK(split_by(omega, p).size() == 3);

    // straddling cell
    auto bad = normalize({Interval::half_open(0.0, 0.3)});
    CHECK_THROWS_AS(split_by(bad, p), NotInSigmaAlgebraError);
}

TEST_CASE("split_by round trip on unions built from partition cells") {
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_partition(13, 300 + trial, 8);
        CounterRng rng(17, 400 + static_cast<std::uint64_t>(trial));
        std::vector<Interval> picked;
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (rng.below(2) == 0) {
                picked.push_back(p.cells()[i]);
                labels.push_back(p.labels()[i]);
            }
        }
        auto a = normalize(picked);
        auto got = split_by(a, p);
        REQUIRE(got.size() == labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) CHECK(got[i].first == labels[i]);
        std::vector<Interval> back;
        for (const auto& [lbl, cell] : got) back.push_back(cell);
        CHECK(normalize(back).sym_diff_length(a) == 0.0);
    }
}

TEST_CASE("partition cell lookup handles singletons") {
    IntervalPartition p(Interval::closed(0.0, 1.0),
                        {Interval::singleton(0.0), Interval(0.0, 0.5, false, false),
                         Interval::closed(0.5, 1.0)},
                        {"zero", "lo", "hi"});
    REQUIRE(p.cell_of(0.0).has_value());
    CHECK(p.labels()[*p.cell_of(0.0)] == "zero");
    CHECK(p.labels()[*p.cell_of(0.3)] == "lo");
    CHECK(p.labels()[*p.cell_of(0.5)] == "hi");
}

TEST_CASE("tail cells aggregate through refinement") {
    TailCell tail;
    tail.hull = Interval(0.0, 0.125, false, false);
    tail.measure_bound = 0.2;
    IntervalPartition p(Interval::closed(0.0, 1.0),
                        {Interval::half_open(0.125, 0.5), Interval::closed(0.5, 1.0)}, {}, tail);
    auto q = IntervalPartition(Interval::closed(0.0, 1.0),
                               {Interval::half_open(0.0, 0.75), Interval::closed(0.75, 1.0)}, {});
    auto r = refine(p, q);
    REQUIRE(r.tail().has_value());
    CHECK(r.tail()->measure_bound == doctest::Approx(0.2));
    for (const auto& c : r.cells()) CHECK(c.lo >= 0.125 - 1e-15);
}
