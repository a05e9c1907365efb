#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace thinspec {

struct Interval {
    double a = 0.0;
    double b = 0.0;

    double length() const { return b - a; }
    bool contains(double x) const { return a <= x && x <= b; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, disjoint closed intervals inside the window [-window, window].
struct BandSet {
    std::vector<Interval> intervals;
    double window = 0.0;

    std::size_t size() const { return intervals.size(); }
    bool empty() const { return intervals.empty(); }
    double measure() const;
    bool contains(double x) const;
    /// Distance from x to the set; +inf when empty.
    double distance_to(double x) const;
};

/// A real function and its derivative evaluated together.
using DualFunction = std::function<std::pair<double, double>(double)>;

struct ScanOptions {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.1;    ///< initial grid spacing
    double tol = 1e-10;   ///< edge accuracy
    /// Extrema with |f| within this of 2 count as touching [-2, 2]; abutting
    /// bands across such a closed gap merge.
    double touch = 1e-10;
    /// Keep components apart at interior extrema instead of merging them.
    bool split_at_extrema = false;
};

/// Connected components of {x in [lo, hi] : |f(x)| <= 2}. The grid is refined
/// at sign changes of f' so every piece is monotone, then edges are bracketed
/// on each piece. Zero-length components are dropped.
std::vector<Interval> scan_level_set(const DualFunction& f, const ScanOptions& options);

/// Sorts and merges touching or overlapping intervals.
std::vector<Interval> merge_intervals(std::vector<Interval> v);

}  // namespace thinspec
