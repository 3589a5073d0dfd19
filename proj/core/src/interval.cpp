#include "ordent/interval.hpp"

#include <algorithm>
#include <cmath>

#include "ordent/errors.hpp"

namespace ordent {

Interval Interval::intersect(const Interval& other) const {
    if (is_empty() || other.is_empty()) return Interval::empty();
    Interval out;
    if (lo > other.lo) {
        out.lo = lo;
        out.lo_closed = lo_closed;
    } else if (lo < other.lo) {
        out.lo = other.lo;
        out.lo_closed = other.lo_closed;
    } else {
        out.lo = lo;
        out.lo_closed = lo_closed && other.lo_closed;
    }
    if (hi < other.hi) {
        out.hi = hi;
        out.hi_closed = hi_closed;
    } else if (hi > other.hi) {
        out.hi = other.hi;
        out.hi_closed = other.hi_closed;
    } else {
        out.hi = hi;
        out.hi_closed = hi_closed && other.hi_closed;
    }
    if (out.is_empty()) return Interval::empty();
    return out;
}

namespace {

// Two intervals (a before b by lo) form one connected set.
bool connects(const Interval& a, const Interval& b) {
    if (b.lo < a.hi) return true;
    if (b.lo == a.hi) return a.hi_closed || b.lo_closed;
    return false;
}

}  // namespace

IntervalUnion IntervalUnion::normalize(std::vector<Interval> raw) {
    std::vector<Interval> cells;
    cells.reserve(raw.size());
    for (const auto& iv : raw) {
        if (!iv.is_empty()) cells.push_back(iv);
    }
    std::sort(cells.begin(), cells.end(), [](const Interval& a, const Interval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return b.lo_closed < a.lo_closed;  // closed endpoint first
    });
    std::vector<Interval> merged;
    for (const auto& iv : cells) {
        if (!merged.empty() && connects(merged.back(), iv)) {
            Interval& last = merged.back();
            if (iv.hi > last.hi) {
                last.hi = iv.hi;
                last.hi_closed = iv.hi_closed;
            } else if (iv.hi == last.hi) {
                last.hi_closed = last.hi_closed || iv.hi_closed;
            }
        } else {
            merged.push_back(iv);
        }
    }
    IntervalUnion out;
    out.cells_ = std::move(merged);
    return out;
}

IntervalUnion IntervalUnion::from_normalized(std::vector<Interval> cells) {
    IntervalUnion out;
    out.cells_ = std::move(cells);
    return out;
}

double IntervalUnion::length() const {
    double sum = 0.0;
    for (const auto& c : cells_) sum += c.length();
    return sum;
}

bool IntervalUnion::contains(double x) const {
    auto it = std::upper_bound(cells_.begin(), cells_.end(), x,
                               [](double v, const Interval& c) { return v < c.lo; });
    if (it == cells_.begin()) return false;
    return std::prev(it)->contains(x);
}

Interval IntervalUnion::hull() const {
    if (cells_.empty()) return Interval::empty();
    return Interval(cells_.front().lo, cells_.back().hi, cells_.front().lo_closed,
                    cells_.back().hi_closed);
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < cells_.size() && j < other.cells_.size()) {
        Interval c = cells_[i].intersect(other.cells_[j]);
        if (!c.is_empty()) out.push_back(c);
        if (cells_[i].hi < other.cells_[j].hi) {
            ++i;
        } else if (cells_[i].hi > other.cells_[j].hi) {
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    return IntervalUnion::normalize(std::move(out));
}

IntervalUnion IntervalUnion::intersect(const Interval& other) const {
    std::vector<Interval> out;
    for (const auto& c : cells_) {
        Interval r = c.intersect(other);
        if (!r.is_empty()) out.push_back(r);
    }
    return IntervalUnion::normalize(std::move(out));
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
    std::vector<Interval> all = cells_;
    all.insert(all.end(), other.cells_.begin(), other.cells_.end());
    return IntervalUnion::normalize(std::move(all));
}

IntervalUnion IntervalUnion::subtract(const IntervalUnion& other) const {
    std::vector<Interval> out;
    for (const auto& cell : cells_) {
        // carve `other`'s cells out of `cell`
        Interval rest = cell;
        for (const auto& sub : other.cells_) {
            if (rest.is_empty()) break;
            if (sub.hi < rest.lo || (sub.hi == rest.lo && !(sub.hi_closed && rest.lo_closed)))
                continue;
            if (sub.lo > rest.hi || (sub.lo == rest.hi && !(sub.lo_closed && rest.hi_closed)))
                break;
            // left remainder of rest before sub
            Interval left(rest.lo, sub.lo, rest.lo_closed, !sub.lo_closed);
            if (!left.is_empty()) out.push_back(left);
            // continue with the part after sub
            Interval right(sub.hi, rest.hi, !sub.hi_closed, rest.hi_closed);
            rest = right.is_empty() ? Interval::empty() : right;
        }
        if (!rest.is_empty()) out.push_back(rest);
    }
    return IntervalUnion::normalize(std::move(out));
}

double IntervalUnion::sym_diff_length(const IntervalUnion& other) const {
    return subtract(other).length() + other.subtract(*this).length();
}

IntervalPartition::IntervalPartition(Interval domain, std::vector<Interval> cells,
                                     std::vector<std::string> labels,
                                     std::optional<TailCell> tail)
    : domain_(domain), cells_(std::move(cells)), labels_(std::move(labels)),
      tail_(std::move(tail)) {
    if (labels_.empty()) {
        labels_.reserve(cells_.size());
        for (std::size_t i = 0; i < cells_.size(); ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != cells_.size())
        throw Error("IntervalPartition: label count does not match cell count");
    order_.resize(cells_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
        return cells_[a].lo < cells_[b].lo;
    });
}

std::optional<std::size_t> IntervalPartition::cell_of(double x) const {
    auto it = std::upper_bound(order_.begin(), order_.end(), x,
                               [this](double v, std::size_t idx) { return v < cells_[idx].lo; });
    // Disjoint cells sorted by lo have nondecreasing hi, so scan backwards
    // until a cell ends strictly before x.  (A singleton {a} and a cell with
    // open lo at a share the same lo, hence the scan instead of one probe.)
    for (auto rit = it; rit != order_.begin();) {
        --rit;
        const std::size_t idx = *rit;
        if (cells_[idx].contains(x)) return idx;
        if (cells_[idx].hi < x) break;
    }
    return std::nullopt;
}

double IntervalPartition::coverage_length() const {
    double sum = tail_ ? tail_->hull.length() : 0.0;
    for (const auto& c : cells_) sum += c.length();
    return sum;
}

IntervalPartition IntervalPartition::trivial(Interval domain) {
    return IntervalPartition(domain, {domain}, {"0"});
}

IntervalUnion normalize(std::vector<Interval> raw) {
    return IntervalUnion::normalize(std::move(raw));
}

IntervalPartition refine(const IntervalPartition& p, const IntervalPartition& q) {
    if (!(p.domain() == q.domain()))
        throw DomainMismatchError("refine: partitions live on different domains");
    std::vector<Interval> cells;
    std::vector<std::string> labels;
    // Cells within a partition are pairwise disjoint, so a two-pointer sweep
    // over both sorted cell lists enumerates every intersecting pair.
    auto sorted_idx = [](const IntervalPartition& part) {
        std::vector<std::size_t> idx(part.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&part](std::size_t a, std::size_t b) {
            return part.cells()[a].lo < part.cells()[b].lo;
        });
        return idx;
    };
    const auto pi = sorted_idx(p);
    const auto qi = sorted_idx(q);
    std::size_t i = 0, j = 0;
    while (i < pi.size() && j < qi.size()) {
        const Interval& a = p.cells()[pi[i]];
        const Interval& b = q.cells()[qi[j]];
        Interval c = a.intersect(b);
        if (!c.is_empty()) {
            cells.push_back(c);
            labels.push_back(p.labels()[pi[i]] + "|" + q.labels()[qi[j]]);
        }
        if (a.hi < b.hi) {
            ++i;
        } else if (a.hi > b.hi) {
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    std::optional<TailCell> tail;
    if (p.tail() || q.tail()) {
        TailCell t;
        std::vector<Interval> hulls;
        double bound = 0.0;
        if (p.tail()) {
            hulls.push_back(p.tail()->hull);
            bound += p.tail()->measure_bound;
        }
        if (q.tail()) {
            hulls.push_back(q.tail()->hull);
            bound += q.tail()->measure_bound;
        }
        IntervalUnion hu = IntervalUnion::normalize(hulls);
        t.hull = hu.hull();
        t.measure_bound = bound;
        // cells overlapping the tail hull stay out of the resolved list
        std::vector<Interval> kept;
        std::vector<std::string> kept_labels;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (cells[k].intersect(t.hull).length() > 0.0) continue;
            kept.push_back(cells[k]);
            kept_labels.push_back(labels[k]);
        }
        cells = std::move(kept);
        labels = std::move(kept_labels);
        tail = t;
    }
    return IntervalPartition(p.domain(), std::move(cells), std::move(labels), std::move(tail));
}

std::vector<std::pair<std::string, Interval>> split_by(const IntervalUnion& a,
                                                       const IntervalPartition& p) {
    const double tol = kSplitTol * std::max(1.0, p.domain().length());
    std::vector<std::pair<std::string, Interval>> out;
    double covered = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Interval& cell = p.cells()[i];
        double inter = a.intersect(cell).length();
        if (inter >= cell.length() - tol) {
            if (cell.length() > 0.0 || (cell.is_singleton() && a.contains(cell.lo))) {
                out.emplace_back(p.labels()[i], cell);
                covered += cell.length();
            }
        } else if (inter > tol) {
            throw NotInSigmaAlgebraError("split_by: cell '" + p.labels()[i] +
                                         "' straddles the boundary of A");
        }
    }
    if (std::abs(covered - a.length()) > tol)
        throw NotInSigmaAlgebraError("split_by: A is not covered by cells of P");
    return out;
}

}  // namespace ordent
