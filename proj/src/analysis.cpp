#include "thinspec/analysis.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "thinspec/errors.hpp"
#include "thinspec/report.hpp"

namespace thinspec {

double lebesgue_measure(const BandSet& s) { return s.measure(); }
double lebesgue_measure(const ArcSet& s) { return s.measure(); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance from x to a sorted union of intervals.
double distance_sorted(const std::vector<Interval>& v, double x) {
    auto it = std::upper_bound(v.begin(), v.end(), x, [](double t, const Interval& i) { return t < i.a; });
    double d = kInf;
    if (it != v.end()) d = it->a - x;
    if (it != v.begin()) {
        const auto& p = *std::prev(it);
        d = std::min(d, x <= p.b ? 0.0 : x - p.b);
    }
    return d;
}

// sup over the part of `from` inside [lo, hi] of the distance to `to`. The
// distance is piecewise linear, so it peaks at an endpoint of a clipped
// interval or at a midpoint of a gap of `to`.
double directed(const std::vector<Interval>& from, const std::vector<Interval>& to, double lo, double hi) {
    std::vector<double> mids;
    for (std::size_t k = 0; k + 1 < to.size(); ++k) mids.push_back(0.5 * (to[k].b + to[k + 1].a));
    double best = 0.0;
    bool any = false;
    for (const auto& i : from) {
        const double a = std::max(i.a, lo);
        const double b = std::min(i.b, hi);
        if (a > b) continue;
        any = true;
        best = std::max({best, distance_sorted(to, a), distance_sorted(to, b)});
        auto m = std::lower_bound(mids.begin(), mids.end(), a);
        for (; m != mids.end() && *m <= b; ++m) best = std::max(best, distance_sorted(to, *m));
    }
    return any ? best : 0.0;
}

std::vector<Interval> sorted(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
    return v;
}

void require_nonempty(const BandSet& s1, const BandSet& s2) {
    if (s1.empty() || s2.empty()) throw EmptySet("Hausdorff distance needs two nonempty sets");
}

}  // namespace

double hausdorff_distance(const BandSet& s1, const BandSet& s2) {
    require_nonempty(s1, s2);
    const auto a = sorted(s1.intervals);
    const auto b = sorted(s2.intervals);
    return std::max(directed(a, b, -kInf, kInf), directed(b, a, -kInf, kInf));
}

double hausdorff_distance_within(const BandSet& s1, const BandSet& s2, double r) {
    require_nonempty(s1, s2);
    const auto a = sorted(s1.intervals);
    const auto b = sorted(s2.intervals);
    return std::max(directed(a, b, -r, r), directed(b, a, -r, r));
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kCountSlack = 1e-9;

long long sweep(const std::vector<Interval>& v, double eps) {
    long long count = 0;
    double reach = -kInf;
    for (const auto& i : v) {
        if (i.b <= reach) continue;
        double from = reach;
        if (i.a > reach) {
            ++count;
            from = i.a + eps;
            if (i.b <= from) {
                reach = from;
                continue;
            }
        }
        const auto k = static_cast<long long>(std::ceil((i.b - from) / eps - kCountSlack));
        count += std::max(0LL, k);
        reach = from + static_cast<double>(std::max(0LL, k)) * eps;
    }
    return count;
}

void check_eps(double eps) {
    if (!(eps > 0.0)) throw Error("covering scale must be positive");
}

}  // namespace

long long covering_count(const BandSet& s, double eps) {
    check_eps(eps);
    return sweep(sorted(s.intervals), eps);
}

long long covering_count(const ArcSet& s, double eps) {
    check_eps(eps);
    const auto arcs = sorted(s.merged());
    if (arcs.empty()) return 0;
    const double turn = 2.0 * kPi;
    if (arcs.size() == 1 && arcs[0].length() >= turn) {
        return static_cast<long long>(std::ceil(turn / eps - kCountSlack));
    }
    long long best = std::numeric_limits<long long>::max();
    for (std::size_t start = 0; start < arcs.size(); ++start) {
        std::vector<Interval> line;
        for (std::size_t k = 0; k < arcs.size(); ++k) {
            const std::size_t i = (start + k) % arcs.size();
            const double shift = i < start ? turn : 0.0;
            line.push_back({arcs[i].a + shift, arcs[i].b + shift});
        }
        best = std::min(best, sweep(line, eps));
    }
    return best;
}

namespace {

template <class Set>
DimensionReport box_counting_impl(const Set& s, const std::vector<double>& scales) {
    for (std::size_t k = 0; k < scales.size(); ++k) {
        check_eps(scales[k]);
        if (k > 0 && !(scales[k] < scales[k - 1])) throw Error("scales must be strictly decreasing");
    }
    DimensionReport r;
    std::vector<double> slopes;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        ScaleRow row{scales[k], covering_count(s, scales[k]), std::nullopt};
        if (k > 0 && row.count > 0 && r.rows.back().count > 0) {
            row.slope = std::log(static_cast<double>(row.count) / static_cast<double>(r.rows.back().count)) /
                        std::log(scales[k - 1] / scales[k]);
            slopes.push_back(*row.slope);
        }
        r.rows.push_back(row);
    }
    if (slopes.empty() && r.rows.size() == 1 && r.rows[0].count > 0 && scales[0] < 1.0) {
        slopes.push_back(std::log(static_cast<double>(r.rows[0].count)) / std::log(1.0 / scales[0]));
    }
    if (!slopes.empty()) {
        const auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
        r.lower = std::clamp(*lo, 0.0, 1.0);
        r.upper = std::clamp(*hi, 0.0, 1.0);
    }
    return r;
}

}  // namespace

DimensionReport box_counting(const BandSet& s, const std::vector<double>& scales) {
    return box_counting_impl(s, scales);
}

DimensionReport box_counting(const ArcSet& s, const std::vector<double>& scales) {
    return box_counting_impl(s, scales);
}

std::string DimensionReport::csv() const {
    std::ostringstream os;
    os << "epsilon,count,slope\n";
    for (const auto& r : rows) {
        os << format_double(r.epsilon) << ',' << r.count << ',';
        if (r.slope) os << format_double(*r.slope);
        os << '\n';
    }
    return os.str();
}

std::vector<double> geometric_scales(double base, int count) {
    if (!(base > 1.0)) throw Error("scale base must exceed 1");
    std::vector<double> out;
    for (int k = 1; k <= count; ++k) out.push_back(std::pow(base, -k));
    return out;
}

// ---------------------------------------------------------------------------

bool ScheduleStage::target_met() const { return measure > 0.0 ? std::log(measure) <= log_target : true; }

double log_step_bound(double log_previous, int n, double period, double measure) {
    const double half = std::log(0.5);
    const double quarter_measure = measure > 0.0 ? std::log(0.25 * measure) : -kInf;
    return std::min({log_previous + half, half - period * std::log(static_cast<double>(n) + 1.0), quarter_measure});
}

namespace {

// Perturbations below this relative size vanish in rounding.
bool resolvable(double log_eps, const PiecewisePotential& data) {
    return log_eps > std::log(1e3 * DBL_EPSILON * std::max(1.0, data.sup_norm()));
}

std::string describe(int n, const std::string& what, const ScheduleStage& prev) {
    std::ostringstream os;
    os << std::setprecision(6) << "stage " << n << ": " << what << " (T_" << n - 1 << " = " << prev.period
       << ", log eps_" << n - 1 << " = " << prev.log_epsilon << ")";
    return os.str();
}

}  // namespace

Schedule build_schedule(const PiecewisePotential& seed, double epsilon, int n_max, std::uint64_t seed_value,
                        const ScheduleOptions& opt) {
    if (!(epsilon > 0.0)) throw Error("schedule needs epsilon > 0");
    if (n_max < 0) throw Error("schedule needs n_max >= 0");
    if (!(opt.step_fraction > 0.0 && opt.step_fraction < 1.0)) throw Error("step fraction must lie in (0, 1)");
    if (opt.n_multiple < 1) throw Error("N multiple must be positive");

    Schedule s;
    s.seed = seed;
    s.epsilon = epsilon;
    ScheduleStage zero;
    zero.data = seed;
    zero.period = seed.period();
    zero.window = std::max(1, n_max);
    zero.bands = bands(seed, zero.window);
    zero.measure = zero.bands.measure();
    zero.log_epsilon = std::log(0.5 * epsilon);
    zero.epsilon = 0.5 * epsilon;
    zero.log_target = -std::pow(zero.period, opt.target_exponent);
    s.stages.push_back(std::move(zero));

    std::mt19937_64 seeds(seed_value);
    for (int n = 1; n <= n_max; ++n) {
        const ScheduleStage& prev = s.stages.back();
        const std::uint64_t stage_seed = seeds();
        if (!resolvable(prev.log_epsilon, prev.data)) {
            throw StageInfeasible(describe(n, "step bound is below the resolution of the data", prev));
        }
        ScheduleStage st;
        st.window = n;
        try {
            const auto cover = resolvent_cover(prev.data, st.window, prev.epsilon, stage_seed, opt.cover);
            const long long big_n = opt.n_multiple * minimal_n(cover.total_multiple());
            auto thin = thin_spectrum(prev.data, cover, st.window, big_n);
            st.data = std::move(thin.data);
            st.construction = std::move(thin.report);
        } catch (const BudgetExhausted& e) {
            throw StageInfeasible(describe(n, std::string("cover search failed: ") + e.what(), prev));
        }
        st.period = st.data.period();
        st.bands = BandSet{st.construction->bands, st.window};
        st.measure = st.construction->measure;
        st.distance_to_previous = st.construction->distance;
        if (!(st.distance_to_previous < prev.epsilon)) {
            throw StageInfeasible(describe(n, "stage left the step ball", prev));
        }
        if (!(st.measure > 0.0)) throw StageInfeasible(describe(n, "stage spectrum in the window is empty", prev));
        st.log_epsilon = std::log(opt.step_fraction) + log_step_bound(prev.log_epsilon, n, st.period, st.measure);
        st.epsilon = std::exp(st.log_epsilon);
        st.log_target = -std::pow(st.period, opt.target_exponent);
        s.stages.push_back(std::move(st));
    }
    return s;
}

std::vector<std::string> check_schedule(const Schedule& s) {
    std::vector<std::string> bad;
    auto fail = [&](int n, const std::string& what) {
        std::ostringstream os;
        os << "stage " << n << ": " << what;
        bad.push_back(os.str());
    };
    if (s.stages.empty()) {
        bad.push_back("schedule has no stages");
        return bad;
    }
    if (!(s.stages[0].data == s.seed)) fail(0, "stage 0 is not the seed");
    if (std::abs(s.stages[0].log_epsilon - std::log(0.5 * s.epsilon)) > 1e-12) fail(0, "eps_0 != epsilon / 2");

    const auto& last = s.stages.back().data;
    for (std::size_t k = 0; k < s.stages.size(); ++k) {
        const int n = static_cast<int>(k);
        const auto& st = s.stages[k];
        if (k > 0) {
            const auto& prev = s.stages[k - 1];
            const double ratio = st.data.period() / prev.data.period();
            const double mult = std::round(ratio);
            if (!(mult >= 1.0 && std::abs(ratio - mult) <= 1e-9 * ratio)) fail(n, "period is not a multiple");
            const double d = sup_distance(prev.data.repeated(static_cast<long long>(mult)), st.data);
            if (!(d < prev.epsilon)) fail(n, "sup-norm step not below eps_{n-1}");
            const double measure = bands(st.data, static_cast<double>(n)).measure();
            const double count = static_cast<double>(st.bands.size());
            if (std::abs(measure - st.measure) > 2.0 * (count + 1.0) * 1e-10 + 1e-12) {
                fail(n, "recorded measure does not match the recomputed spectrum");
            }
            if (!(st.log_epsilon < prev.log_epsilon + std::log(0.5))) fail(n, "eps_n not below eps_{n-1} / 2");
            if (!(st.log_epsilon < std::log(0.5) - st.period * std::log(n + 1.0))) {
                fail(n, "eps_n not below (n+1)^-T_n / 2");
            }
            if (!(measure > 0.0 && st.log_epsilon < std::log(0.25 * measure))) fail(n, "eps_n not below measure / 4");
        }
        if (!(log_gordon_defect(last, st.period, n + 1.0) < 0.0)) fail(n, "Gordon defect at q = T_n is not below 1");
    }
    return bad;
}

// ---------------------------------------------------------------------------

double log_gordon_defect(const PiecewisePotential& phi, double q, double c) {
    if (!(q > 0.0) || !(c > 0.0)) throw Error("Gordon defect needs q > 0 and C > 0");
    const double t = phi.period();
    // Breakpoints of phi on [-q, 2q], folded into [0, q) by the two shifts.
    std::vector<double> cuts{0.0, q};
    const auto first = static_cast<long long>(std::floor(-q / t)) - 1;
    const auto last = static_cast<long long>(std::ceil(2.0 * q / t)) + 1;
    for (long long k = first; k <= last; ++k) {
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double b = static_cast<double>(k) * t + phi.offset(i);
            for (double x : {b - q, b, b + q}) {
                if (x > 0.0 && x < q) cuts.push_back(x);
            }
        }
    }
    // Cuts closer than the rounding of the offsets are one cut; otherwise a
    // sliver between them would compare neighbouring segments.
    const double merge = 1e-9 * std::max(1.0, q);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [&](double l, double r) { return r - l < merge; }), cuts.end());
    double sup = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double x = 0.5 * (cuts[k] + cuts[k + 1]);
        const cplx v = phi(x);
        sup = std::max({sup, std::abs(phi(x - q) - v), std::abs(phi(x + q) - v)});
    }
    if (sup == 0.0) return -kInf;
    return q * std::log(c) + std::log(sup);
}

double gordon_defect(const PiecewisePotential& phi, double q, double c) {
    return std::exp(log_gordon_defect(phi, q, c));
}

}  // namespace thinspec
