#include "thinspec/bandset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

namespace thinspec {

double BandSet::measure() const {
    double s = 0.0;
    for (const auto& i : intervals) s += i.length();
    return s;
}

bool BandSet::contains(double x) const {
    auto it = std::upper_bound(intervals.begin(), intervals.end(), x,
                               [](double v, const Interval& i) { return v < i.a; });
    return it != intervals.begin() && std::prev(it)->contains(x);
}

double BandSet::distance_to(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& i : intervals) {
        const double d = x < i.a ? i.a - x : (x > i.b ? x - i.b : 0.0);
        best = std::min(best, d);
    }
    return best;
}

std::vector<Interval> merge_intervals(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
    std::vector<Interval> out;
    for (const auto& i : v) {
        if (!out.empty() && i.a <= out.back().b) {
            out.back().b = std::max(out.back().b, i.b);
        } else {
            out.push_back(i);
        }
    }
    return out;
}

namespace {

struct Node {
    double x;
    double f;
    double df;
    bool critical;
};

template <class G>
double bracket_root(G g, double lo, double hi, double glo, double ghi, double tol) {
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        g, lo, hi, glo, ghi, [tol](double a, double b) { return std::abs(b - a) <= tol; }, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

std::vector<Interval> scan_level_set(const DualFunction& f, const ScanOptions& opt) {
    if (!(opt.hi > opt.lo)) return {};
    const auto cells = static_cast<std::int64_t>(std::ceil((opt.hi - opt.lo) / opt.step));
    const std::int64_t n = std::max<std::int64_t>(cells, 1);
    const double h = (opt.hi - opt.lo) / static_cast<double>(n);

    std::vector<Node> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i) {
        const double x = i == n ? opt.hi : opt.lo + static_cast<double>(i) * h;
        const auto [v, dv] = f(x);
        grid.push_back({x, v, dv, dv == 0.0});
    }

    // Insert interior critical points so consecutive nodes bound monotone pieces.
    const double crit_tol = std::min(opt.tol, 1e-12 * std::max(1.0, std::abs(opt.hi) + std::abs(opt.lo)));
    std::vector<Node> nodes;
    nodes.reserve(grid.size() * 2);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        nodes.push_back(grid[i]);
        const Node& l = grid[i];
        const Node& r = grid[i + 1];
        if (l.df * r.df < 0.0) {
            const double c = bracket_root([&](double x) { return f(x).second; }, l.x, r.x, l.df, r.df,
                                          crit_tol);
            if (c > l.x && c < r.x) {
                const auto [v, dv] = f(c);
                nodes.push_back({c, v, dv, true});
            }
        }
    }
    nodes.push_back(grid.back());

    auto inside = [&](const Node& p) {
        return std::abs(p.f) <= 2.0 + (p.critical ? opt.touch : 0.0);
    };
    auto crossing = [&](const Node& p, const Node& q, double level) {
        auto g = [&](double x) { return f(x).first - level; };
        const double gp = p.f - level;
        const double gq = q.f - level;
        if (gp * gq > 0.0) return std::numeric_limits<double>::quiet_NaN();
        return bracket_root(g, p.x, q.x, gp, gq, opt.tol);
    };

    std::vector<Interval> pieces;
    std::vector<bool> ends_at_extremum;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const std::size_t before = pieces.size();
        const Node& p = nodes[i];
        const Node& q = nodes[i + 1];
        const bool ip = inside(p);
        const bool iq = inside(q);
        if (ip && iq) {
            pieces.push_back({p.x, q.x});
        } else if (ip) {
            const double r = crossing(p, q, q.f > 0 ? 2.0 : -2.0);
            pieces.push_back({p.x, std::isnan(r) ? p.x : r});
        } else if (iq) {
            const double r = crossing(p, q, p.f > 0 ? 2.0 : -2.0);
            pieces.push_back({std::isnan(r) ? q.x : r, q.x});
        } else if ((p.f > 2.0 && q.f < -2.0) || (p.f < -2.0 && q.f > 2.0)) {
            const double r1 = crossing(p, q, 2.0);
            const double r2 = crossing(p, q, -2.0);
            if (!std::isnan(r1) && !std::isnan(r2)) pieces.push_back({std::min(r1, r2), std::max(r1, r2)});
        }
        if (pieces.size() > before) ends_at_extremum.push_back(q.critical && pieces.back().b == q.x);
    }

    // Pieces arrive in increasing order; consecutive ones share endpoints.
    std::vector<Interval> merged;
    bool split_here = false;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (!merged.empty() && pieces[i].a <= merged.back().b && !split_here) {
            merged.back().b = std::max(merged.back().b, pieces[i].b);
        } else {
            merged.push_back(pieces[i]);
        }
        split_here = opt.split_at_extrema && ends_at_extremum[i];
    }
    std::erase_if(merged, [](const Interval& i) { return !(i.b > i.a); });
    return merged;
}

}  // namespace thinspec
