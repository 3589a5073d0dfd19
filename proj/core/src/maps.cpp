#include "ordent/maps.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "ordent/errors.hpp"
#include "ordent/measures.hpp"

namespace ordent {

Interval MonotoneBranch::image() const {
    if (is_singleton) return Interval::singleton(forward(domain.lo));
    const double flo = forward(domain.lo);
    const double fhi = forward(domain.hi);
    if (direction == Direction::increasing)
        return Interval(flo, fhi, domain.lo_closed, domain.hi_closed);
    return Interval(fhi, flo, domain.hi_closed, domain.lo_closed);
}

std::string CylinderIndex::to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(word[i]);
    }
    return s + ")";
}

const IntervalUnion& PreimageResult::exact() const {
    if (tail) throw Error("preimage has an unresolved tail contribution");
    return resolved;
}

PiecewiseMonotoneMap::PiecewiseMonotoneMap(std::string name, Interval domain,
                                           std::vector<MonotoneBranch> branches,
                                           std::optional<MapTail> tail,
                                           std::string default_measure)
    : name_(std::move(name)), domain_(domain), branches_(std::move(branches)),
      tail_(std::move(tail)), default_measure_(std::move(default_measure)) {
    std::sort(branches_.begin(), branches_.end(),
              [](const MonotoneBranch& a, const MonotoneBranch& b) {
                  if (a.domain.lo != b.domain.lo) return a.domain.lo < b.domain.lo;
                  return a.domain.is_singleton() && !b.domain.is_singleton();
              });
}

int PiecewiseMonotoneMap::branch_of(double x) const {
    if (!domain_.contains(x)) throw OutOfDomainError("branch_of: x outside the ambient domain");
    auto it = std::upper_bound(branches_.begin(), branches_.end(), x,
                               [](double v, const MonotoneBranch& b) { return v < b.domain.lo; });
    for (auto rit = it; rit != branches_.begin();) {
        --rit;
        if (rit->domain.contains(x)) return static_cast<int>(rit - branches_.begin());
        if (rit->domain.hi < x) break;
    }
    if (tail_ && tail_->region.contains(x)) return kTailBranch;
    throw OutOfDomainError("branch_of: x not covered by any branch cell");
}

double PiecewiseMonotoneMap::eval(double x) const {
    const int b = branch_of(x);
    double y = (b == kTailBranch) ? tail_->eval(x) : branches_[b].forward(x);
    return std::clamp(y, domain_.lo, domain_.hi);
}

namespace {

// Pull an interval in the image of a branch back through its inverse.
Interval pull_back(const MonotoneBranch& b, const Interval& y) {
    const double xa = b.inverse(y.lo);
    const double xb = b.inverse(y.hi);
    Interval x = (b.direction == Direction::increasing)
                     ? Interval(xa, xb, y.lo_closed, y.hi_closed)
                     : Interval(xb, xa, y.hi_closed, y.lo_closed);
    // inverse evaluation may drift a few ulp outside the branch cell
    return x.intersect(b.domain);
}

}  // namespace

PreimageResult PiecewiseMonotoneMap::preimage(const IntervalUnion& a) const {
    std::vector<Interval> cells;
    for (const auto& b : branches_) {
        if (b.is_singleton) {
            if (a.contains(b.forward(b.domain.lo))) cells.push_back(b.domain);
            continue;
        }
        const Interval img = b.image();
        for (const auto& cell : a.cells()) {
            Interval y = cell.intersect(img);
            if (y.is_empty()) continue;
            Interval x = pull_back(b, y);
            if (!x.is_empty()) cells.push_back(x);
        }
    }
    PreimageResult out;
    out.resolved = IntervalUnion::normalize(std::move(cells));
    if (tail_ && !a.empty()) {
        TailCell t;
        t.hull = tail_->region;
        t.measure_bound = tail_->measure_bound;
        out.tail = t;
    }
    return out;
}

IntervalUnion PiecewiseMonotoneMap::cylinder(const CylinderIndex& w) const {
    if (w.word.empty()) throw OutOfDomainError("cylinder: empty word");
    for (int label : w.word)
        if (label < 0 || label >= static_cast<int>(branches_.size()))
            throw OutOfDomainError("cylinder: invalid branch label " + std::to_string(label));
    Interval c = branches_[w.word.back()].domain;
    for (int k = static_cast<int>(w.word.size()) - 2; k >= 0; --k) {
        const MonotoneBranch& b = branches_[w.word[k]];
        if (b.is_singleton) {
            c = c.contains(b.forward(b.domain.lo)) ? b.domain : Interval::empty();
            continue;
        }
        Interval y = c.intersect(b.image());
        if (y.is_empty()) return IntervalUnion();
        c = pull_back(b, y);
        if (c.is_empty()) return IntervalUnion();
    }
    if (c.is_empty()) return IntervalUnion();
    return IntervalUnion::from_normalized({c});
}

double PiecewiseMonotoneMap::eval_pinned(double x, const CylinderIndex& w, int iterates) const {
    double y = x;
    for (int k = 0; k < iterates; ++k) y = branches_[w.word[k]].forward(y);
    return y;
}

IntervalPartition PiecewiseMonotoneMap::monotony_partition() const {
    std::vector<Interval> cells;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        cells.push_back(branches_[i].domain);
        labels.push_back(std::to_string(i));
    }
    std::optional<TailCell> tail;
    if (tail_) {
        TailCell t;
        t.hull = tail_->region;
        t.measure_bound = tail_->measure_bound;
        t.entropy_bound = tail_->entropy_bound;
        tail = t;
    }
    return IntervalPartition(domain_, std::move(cells), std::move(labels), std::move(tail));
}

PiecewiseMonotoneMap make_doubling() {
    std::vector<MonotoneBranch> br;
    br.push_back({Interval::half_open(0.0, 0.5), Direction::increasing,
                  [](double x) { return 2.0 * x; }, [](double y) { return 0.5 * y; }});
    br.push_back({Interval::closed(0.5, 1.0), Direction::increasing,
                  [](double x) { return 2.0 * x - 1.0; },
                  [](double y) { return 0.5 * (y + 1.0); }});
    return PiecewiseMonotoneMap("doubling", Interval::closed(0.0, 1.0), std::move(br),
                                std::nullopt, "lebesgue");
}

PiecewiseMonotoneMap make_tent() {
    std::vector<MonotoneBranch> br;
    br.push_back({Interval::half_open(0.0, 0.5), Direction::increasing,
                  [](double x) { return 2.0 * x; }, [](double y) { return 0.5 * y; }});
    br.push_back({Interval::closed(0.5, 1.0), Direction::decreasing,
                  [](double x) { return 2.0 - 2.0 * x; },
                  [](double y) { return 1.0 - 0.5 * y; }});
    return PiecewiseMonotoneMap("tent", Interval::closed(0.0, 1.0), std::move(br), std::nullopt,
                                "lebesgue");
}

PiecewiseMonotoneMap make_logistic() {
    std::vector<MonotoneBranch> br;
    br.push_back({Interval::half_open(0.0, 0.5), Direction::increasing,
                  [](double x) { return 4.0 * x * (1.0 - x); },
                  [](double y) { return 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - y))); }});
    br.push_back({Interval::closed(0.5, 1.0), Direction::decreasing,
                  [](double x) { return 4.0 * x * (1.0 - x); },
                  [](double y) { return 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - y))); }});
    return PiecewiseMonotoneMap("logistic", Interval::closed(0.0, 1.0), std::move(br),
                                std::nullopt, "arcsine");
}

PiecewiseMonotoneMap make_gauss(int n_max) {
    if (n_max < 1) throw ConfigError("gauss: n_max must be >= 1");
    std::vector<MonotoneBranch> br;
    // branch for digit n: cell [1/(n+1), 1/n), map 1/x - n, decreasing;
    // the continuous extension at cell endpoints replaces the raw mod-1
    // values on a null set, keeping each branch genuinely monotone.
    for (int n = 1; n <= n_max; ++n) {
        Interval cell = (n == 1) ? Interval::closed(0.5, 1.0)
                                 : Interval::half_open(1.0 / (n + 1.0), 1.0 / n);
        const double digit = n;
        br.push_back({cell, Direction::decreasing,
                      [digit](double x) { return 1.0 / x - digit; },
                      [digit](double y) { return 1.0 / (y + digit); }});
    }
    br.push_back({Interval::singleton(0.0), Direction::increasing, [](double) { return 0.0; },
                  [](double) { return 0.0; }, true});
    MapTail tail;
    tail.region = Interval(0.0, 1.0 / (n_max + 1.0), false, false);
    tail.measure_bound = std::log2(1.0 + 1.0 / (n_max + 1.0));
    tail.entropy_bound = gauss_entropy_tail_bound(n_max);
    tail.eval = [](double x) {
        if (x == 0.0) return 0.0;
        const double r = 1.0 / x;
        return std::clamp(r - std::floor(r), 0.0, 1.0);
    };
    return PiecewiseMonotoneMap("gauss", Interval::closed(0.0, 1.0), std::move(br),
                                std::move(tail), "gauss");
}

PiecewiseMonotoneMap make_builtin(const std::string& name, int n_max) {
    if (name == "doubling") return make_doubling();
    if (name == "tent") return make_tent();
    if (name == "logistic") return make_logistic();
    if (name == "gauss") return make_gauss(n_max);
    throw ConfigError("unknown builtin map: " + name);
}

PiecewiseMonotoneMap load_custom(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("custom map: invalid JSON: ") + e.what());
    }
    if (!j.contains("domain") || !j.contains("pieces"))
        throw ConfigError("custom map: need \"domain\" and \"pieces\"");
    const auto dom = j["domain"];
    if (!dom.is_array() || dom.size() != 2)
        throw ConfigError("custom map: domain must be [lo, hi]");
    const double dlo = dom[0].get<double>();
    const double dhi = dom[1].get<double>();
    if (!(dlo < dhi)) throw ConfigError("custom map: empty domain");
    const auto& pieces = j["pieces"];
    if (!pieces.is_array() || pieces.empty()) throw ConfigError("custom map: no pieces");

    std::vector<MonotoneBranch> br;
    double prev_x1 = dlo;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& p = pieces[i];
        const double x0 = p.at("x0").get<double>();
        const double x1 = p.at("x1").get<double>();
        const double y0 = p.at("y0").get<double>();
        const double y1 = p.at("y1").get<double>();
        if (!(x0 < x1)) throw ConfigError("custom map: piece breakpoints not increasing");
        if (x0 != prev_x1)
            throw ConfigError("custom map: pieces must tile the domain contiguously");
        prev_x1 = x1;
        const double slope = (y1 - y0) / (x1 - x0);
        if (slope == 0.0 || !std::isfinite(slope))
            throw ConfigError("custom map: zero-slope piece is not monotone");
        if (std::min(y0, y1) < dlo - 1e-12 || std::max(y0, y1) > dhi + 1e-12)
            throw ConfigError("custom map: piece range leaves the domain");
        const bool last = (i + 1 == pieces.size());
        Interval cell = last ? Interval::closed(x0, x1) : Interval::half_open(x0, x1);
        br.push_back({cell, slope > 0 ? Direction::increasing : Direction::decreasing,
                      [x0, y0, slope](double x) { return y0 + (x - x0) * slope; },
                      [x0, y0, slope](double y) { return x0 + (y - y0) / slope; }});
    }
    if (prev_x1 != dhi) throw ConfigError("custom map: pieces do not reach the domain end");
    return PiecewiseMonotoneMap("custom", Interval::closed(dlo, dhi), std::move(br),
                                std::nullopt, "");
}

std::function<double(double)> make_bisection_inverse(std::function<double(double)> forward,
                                                     Interval domain, Direction direction) {
    return [forward = std::move(forward), domain, direction](double y) {
        double lo = domain.lo, hi = domain.hi;
        for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double v = forward(mid);
            const bool go_right = (direction == Direction::increasing) ? (v < y) : (v > y);
            if (go_right)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
}

}  // namespace ordent
