#pragma once

// JSON serialization for the wire formats: interval unions and partitions,
// entropy values, pattern distributions, reports.  Kept separate so the core
// headers stay JSON-free.

#include <string>

#include "json.hpp"
#include "ordent/compat.hpp"
#include "ordent/estimators.hpp"
#include "ordent/interval.hpp"
#include "ordent/measures.hpp"
#include "ordent/rokhlin.hpp"

namespace ordent {

using json = nlohmann::json;

inline json to_json(const Interval& iv, const std::string& label = "") {
    json j{{"lo", iv.lo}, {"hi", iv.hi}, {"lo_closed", iv.lo_closed},
           {"hi_closed", iv.hi_closed}};
    if (!label.empty()) j["label"] = label;
    return j;
}

inline json to_json(const IntervalUnion& u) {
    json arr = json::array();
    for (const auto& c : u.cells()) arr.push_back(to_json(c));
    return arr;
}

inline json to_json(const IntervalPartition& p) {
    json arr = json::array();
    for (std::size_t i = 0; i < p.size(); ++i) arr.push_back(to_json(p.cells()[i], p.labels()[i]));
    if (p.tail()) {
        json t{{"tail", true},
               {"lo", p.tail()->hull.lo},
               {"hi", p.tail()->hull.hi},
               {"measure_bound", p.tail()->measure_bound}};
        if (p.tail()->entropy_bound) t["entropy_bound"] = *p.tail()->entropy_bound;
        arr.push_back(t);
    }
    return arr;
}

inline Interval interval_from_json(const json& j) {
    return Interval(j.at("lo").get<double>(), j.at("hi").get<double>(),
                    j.value("lo_closed", true), j.value("hi_closed", false));
}

inline IntervalUnion union_from_json(const json& arr) {
    std::vector<Interval> cells;
    for (const auto& j : arr)
        if (!j.value("tail", false)) cells.push_back(interval_from_json(j));
    return IntervalUnion::normalize(std::move(cells));
}

/// log_base: "e" keeps nats; "2" converts value and tail bound to bits.
inline json to_json(const EntropyValue& v, const std::string& log_base = "e") {
    const double scale = (log_base == "2") ? 1.4426950408889634 : 1.0;
    return json{{"value", v.value * scale},
                {"tail_bound", v.tail_bound * scale},
                {"cells", v.cell_count},
                {"log_base", log_base}};
}

inline json to_json(const EntropyEstimate& e, const std::string& log_base = "e") {
    const double scale = (log_base == "2") ? 1.4426950408889634 : 1.0;
    return json{{"value", e.value * scale},
                {"n", e.n},
                {"samples", e.samples},
                {"std_error", e.std_error * scale},
                {"estimator", estimator_name(e.estimator)},
                {"tail_bound", e.tail_bound * scale},
                {"flags", e.flags}};
}

inline json to_json(const PatternDistribution& d) {
    json counts = json::object();
    for (const auto& [rank_key, blocks] : d.counts) {
        json arr = json::array();
        for (auto c : blocks) arr.push_back(c);
        counts[std::to_string(rank_key)] = arr;
    }
    return json{{"n", d.n},
                {"total", d.total},
                {"discarded_ties", d.discarded_ties},
                {"counts", counts}};
}

inline PatternDistribution distribution_from_json(const json& j) {
    PatternDistribution d;
    d.n = j.at("n").get<int>();
    d.total = j.at("total").get<std::uint64_t>();
    d.discarded_ties = j.at("discarded_ties").get<std::uint64_t>();
    for (const auto& [key, arr] : j.at("counts").items()) {
        auto& blocks = d.counts[std::stoull(key)];
        for (int b = 0; b < PatternDistribution::kBlocks; ++b)
            blocks[b] = arr.at(b).get<std::uint64_t>();
    }
    return d;
}

inline json to_json(const LemmaSummary& s) {
    json witnesses = json::array();
    for (const auto& w : s.equality_witnesses) witnesses.push_back(w.to_string());
    return json{{"n_max", s.n_max},
                {"words_checked", s.words_checked},
                {"violations", s.violations},
                {"max_count_over_bound_ratio", s.max_count_over_bound_ratio},
                {"error_terms", s.error_terms},
                {"witnesses_of_equality", witnesses},
                {"tail_word_mass", s.tail_word_mass},
                {"scans_consistent", s.all_scans_consistent},
                {"side_checks_ok", s.all_side_checks_ok}};
}

inline json to_json(const RokhlinTower& t) {
    return json{{"base", to_json(t.base)},
                {"height", t.height},
                {"base_measure", t.base_measure},
                {"epsilon", t.epsilon},
                {"verification", t.verification}};
}

inline json to_json(const QReport& r) {
    return json{{"item_i", r.item_i},
                {"item_ii", r.item_ii},
                {"item_iii", r.item_iii},
                {"item_iv", r.item_iv},
                {"good_mass", r.good_mass},
                {"entropy", to_json(r.entropy)},
                {"epsilon", r.epsilon_used}};
}

inline json to_json(const VisitReport& r) {
    return json{{"windows", r.windows},
                {"violations", r.violations},
                {"bound", r.bound},
                {"max_count", r.max_count}};
}

}  // namespace ordent
