#include "thinspec/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "thinspec/errors.hpp"

namespace thinspec {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng) { return unit_uniform(rng()); }

// Case 1 requires |D| beyond 2 by more than rounding.
constexpr double kOpenTolerance = 1e-9;

// Case 2 offsets sit just inside radius epsilon / 2, so that together with a
// degenerate-case step (strictly below epsilon / 2) the total stays below epsilon.
constexpr double kPartnerRadius = 1.0 - 1e-9;

template <class Data>
struct Ops;

template <>
struct Ops<PiecewisePotential> {
    using Data = PiecewisePotential;

    static ComplexMat2 mono(const Data& d, double t) { return monodromy(d, t); }
    static double trace(const Data& d, double t) { return discriminant(d, t); }
    static double lyap(const Data& d, double t) { return lyapunov(d, t); }

    static Data prepare(const Data& d, const GapBudget& b) {
        const auto n = static_cast<int>(d.size());
        if (n >= b.min_segments) return d;
        return d.subdivided((b.min_segments + n - 1) / n);
    }

    // Segment 0 keeps its value unless it is the only one.
    static Data perturb_all(const Data& d, double radius, Rng& rng) {
        std::vector<Segment> s = d.segments();
        for (std::size_t k = s.size() > 1 ? 1 : 0; k < s.size(); ++k) {
            s[k].value += std::polar(radius, 2.0 * kPi * uniform(rng));
        }
        return Data(std::move(s));
    }

    static Data perturb_one(const Data& d, double radius, Rng& rng) {
        std::vector<Segment> s = d.segments();
        const std::size_t lo = s.size() > 1 ? 1 : 0;
        const std::size_t k = lo + static_cast<std::size_t>(uniform(rng) * static_cast<double>(s.size() - lo));
        const double r = radius * std::sqrt(uniform(rng));
        s[std::min(k, s.size() - 1)].value += std::polar(r, 2.0 * kPi * uniform(rng));
        return Data(std::move(s));
    }

    static long long multiple(const Data& input, const Data& out) {
        return std::llround(out.period() / input.period());
    }

    static double distance(const Data& input, const Data& out) {
        return sup_distance(input.repeated(multiple(input, out)), out);
    }
};

template <>
struct Ops<VerblunskyCycle> {
    using Data = VerblunskyCycle;

    static ComplexMat2 mono(const Data& d, double t) { return cmv_monodromy(d, t); }
    static double trace(const Data& d, double t) { return cmv_discriminant(d, t); }
    static double lyap(const Data& d, double t) { return cmv_lyapunov(d, t); }
    static Data prepare(const Data& d, const GapBudget&) { return d; }

    static Data perturb_all(const Data& d, double radius, Rng& rng) {
        std::vector<cplx> v = d.values();
        for (auto& a : v) a = poincare_offset(a, radius, 2.0 * kPi * uniform(rng));
        return Data(std::move(v));
    }

    static Data perturb_one(const Data& d, double radius, Rng& rng) {
        std::vector<cplx> v = d.values();
        const auto k = static_cast<std::size_t>(uniform(rng) * static_cast<double>(v.size()));
        auto& a = v[std::min(k, v.size() - 1)];
        const double r = radius * std::sqrt(uniform(rng));
        a = poincare_offset(a, r, 2.0 * kPi * uniform(rng));
        return Data(std::move(v));
    }

    static long long multiple(const Data& input, const Data& out) { return out.period() / input.period(); }
    static double distance(const Data& input, const Data& out) { return poincare_delta(input, out); }
};

PiecewisePotential concat(const std::vector<PiecewisePotential>& v) { return PiecewisePotential::concatenate(v); }
VerblunskyCycle concat(const std::vector<VerblunskyCycle>& v) { return VerblunskyCycle::concatenate(v); }

template <class Data>
GapResult<Data> open_gap_impl(const Data& input, double target, double epsilon, std::uint64_t seed,
                              const GapBudget& budget) {
    using O = Ops<Data>;
    if (!(epsilon > 0.0)) throw Error("open_gap needs epsilon > 0");
    Rng rng(seed);
    const double half = 0.5 * epsilon;
    const double edge = 2.0 - budget.ellipticity_margin;

    GapCertificate<Data> cert;
    cert.target = target;
    double d = O::trace(input, target);
    cert.seed_trace = d;
    // Case 1 returns the input itself, before any subdivision.
    const Data prepared = std::abs(d) > 2.0 + kOpenTolerance ? input : O::prepare(input, budget);
    Data base = prepared;

    auto draw = [&] {
        if (cert.samples >= budget.max_samples) {
            std::ostringstream os;
            os << "gap opening at " << target << " used all " << budget.max_samples << " samples";
            throw BudgetExhausted(os.str());
        }
        ++cert.samples;
    };

    // Near |D| = 2 the monodromy is close to parabolic: move off it first.
    while (std::abs(d) > edge && std::abs(d) <= 2.0 + kOpenTolerance) {
        draw();
        base = O::perturb_one(prepared, half, rng);
        d = O::trace(base, target);
        cert.degenerate_step = true;
    }
    cert.base = base;

    if (std::abs(d) > 2.0 + kOpenTolerance) {
        cert.path = GapCase::AlreadyOpen;
        cert.partner = base;
    } else {
        cert.path = GapCase::Elliptic;
        const ComplexMat2 m0 = O::mono(base, target);
        for (;;) {
            draw();
            Data partner = O::perturb_all(base, kPartnerRadius * half, rng);
            const ComplexMat2 m1 = O::mono(partner, target);
            if (std::abs(m1.trace().real()) > edge) continue;
            if (commutator(m0, m1).max_abs() <= budget.commutator_threshold) continue;
            const SemigroupSearch found = hyperbolic_in_semigroup(m0, m1, budget.search);
            if (found.status != SearchStatus::Found) continue;
            cert.partner = std::move(partner);
            cert.word = found.word;
            break;
        }
    }

    Data out = cert.assemble();
    cert.period_multiple = O::multiple(input, out);
    cert.trace = O::trace(out, target);
    cert.distance = O::distance(input, out);
    if (!(cert.distance < epsilon)) {
        std::ostringstream os;
        os << "gap opening moved the data by " << cert.distance << " >= " << epsilon;
        throw NumericalAssertion(os.str());
    }
    cert.verify();
    return {std::move(out), std::move(cert)};
}

}  // namespace

template <class Data>
Data GapCertificate<Data>::assemble() const {
    if (word.empty()) return base;
    std::vector<Data> blocks;
    for (const auto& run : word.runs()) blocks.push_back((run.letter == 0 ? base : partner).repeated(run.power));
    return concat(blocks);
}

template <class Data>
void GapCertificate<Data>::verify() const {
    using O = Ops<Data>;
    const Data out = assemble();
    if (!word.empty()) {
        const ComplexMat2 product = word.evaluate(O::mono(base, target), O::mono(partner, target));
        const ComplexMat2 direct = O::mono(out, target);
        if (!(thinspec::distance(product, direct) <= 1e-8 * std::max(1.0, direct.max_abs()))) {
            throw NumericalAssertion("certificate word product does not match the assembled monodromy");
        }
    }
    const double d = O::trace(out, target);
    if (!(std::abs(d) > 2.0)) {
        std::ostringstream os;
        os << "certificate discriminant " << d << " at " << target << " is inside [-2, 2]";
        throw NumericalAssertion(os.str());
    }
}

template struct GapCertificate<PiecewisePotential>;
template struct GapCertificate<VerblunskyCycle>;

GapResult<PiecewisePotential> open_gap(const PiecewisePotential& phi, double lambda, double epsilon,
                                       std::uint64_t seed, const GapBudget& budget) {
    return open_gap_impl(phi, lambda, epsilon, seed, budget);
}

GapResult<VerblunskyCycle> cmv_open_gap(const VerblunskyCycle& alpha, double theta, double epsilon,
                                        std::uint64_t seed, const GapBudget& budget) {
    return open_gap_impl(alpha, theta, epsilon, seed, budget);
}

// ---------------------------------------------------------------------------

GapBudget cover_gap_budget() {
    GapBudget b;
    b.max_samples = 200;
    b.search.max_nodes = 200'000;
    return b;
}

namespace {

// Runs of uncovered grid indices as (first, length), longest first. On the
// circle a run may wrap past the last index.
std::vector<std::pair<std::size_t, std::size_t>> uncovered_runs(const std::vector<bool>& covered, bool circular) {
    const std::size_t n = covered.size();
    std::size_t start = 0;
    if (circular) {
        while (start < n && !covered[start]) ++start;
        if (start == n) return {{0, n}};
    }
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = (start + k) % n;
        if (covered[i]) continue;
        if (k == 0 || covered[(i + n - 1) % n]) runs.push_back({i, 0});
        ++runs.back().second;
    }
    std::stable_sort(runs.begin(), runs.end(), [](const auto& l, const auto& r) { return l.second > r.second; });
    return runs;
}

template <class Data>
std::vector<double> lyapunov_row(const Data& d, const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = Ops<Data>::lyap(d, grid[i]);
    return out;
}

template <class Data>
double kappa_of(const std::vector<Data>& members, const std::vector<double>& grid) {
    std::vector<double> best(grid.size(), 0.0);
    for (const auto& m : members) {
        const auto row = lyapunov_row(m, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) best[i] = std::max(best[i], row[i]);
    }
    return grid.empty() ? 0.0 : *std::min_element(best.begin(), best.end());
}

template <class Data, class OpenGap>
ResolventCover<Data> cover_impl(const Data& input, std::vector<double> grid, bool circular, double epsilon,
                                std::uint64_t seed, const CoverOptions& opt, OpenGap open) {
    if (opt.seed_repeats.empty() ||
        std::any_of(opt.seed_repeats.begin(), opt.seed_repeats.end(), [](int r) { return r < 1; })) {
        throw Error("cover seed repeats must be positive");
    }
    Rng seeds(seed);
    std::vector<double> best(grid.size(), 0.0);
    std::vector<bool> covered(grid.size(), false);
    std::vector<GapResult<Data>> chosen;

    for (;;) {
        const auto runs = uncovered_runs(covered, circular);
        if (runs.empty()) break;
        if (static_cast<int>(chosen.size()) >= opt.max_members) {
            std::ostringstream os;
            os << "resolvent cover needs more than " << opt.max_members << " members";
            throw BudgetExhausted(os.str());
        }

        std::optional<GapResult<Data>> pick;
        std::vector<double> pick_row;
        double pick_score = 0.0;
        // Fallback targets are tried only when every attempt at the earlier ones
        // failed: run midpoints longest first, then quartiles, then eighths.
        std::vector<std::size_t> targets;
        for (int den : {2, 4, 8}) {
            for (const auto& [at, len] : runs) {
                for (int num = 1; num < den; num += 2) {
                    targets.push_back((at + (len - 1) * static_cast<std::size_t>(num) / static_cast<std::size_t>(den)) %
                                      grid.size());
                }
            }
        }
        for (std::size_t ti = 0; ti < targets.size() && ti < opt.targets_per_round && !pick; ++ti) {
            const double target = grid[targets[ti]];
            for (int a = 0; a < opt.attempts_per_target; ++a) {
                const std::uint64_t s = seeds();
                GapResult<Data> r;
                const int rep = opt.seed_repeats[static_cast<std::size_t>(a) % opt.seed_repeats.size()];
                try {
                    r = open(input.repeated(rep), target, epsilon, s, opt.gap);
                    r.certificate.period_multiple *= rep;
                } catch (const BudgetExhausted&) {
                    continue;
                }
                auto row = lyapunov_row(r.data, grid);
                std::size_t gain = 0;
                for (std::size_t i = 0; i < grid.size(); ++i) gain += !covered[i] && row[i] > opt.kappa_threshold;
                const double score = static_cast<double>(gain) / static_cast<double>(r.certificate.period_multiple);
                if (gain > 0 && score > pick_score) {
                    pick_score = score;
                    pick = std::move(r);
                    pick_row = std::move(row);
                }
            }
        }
        if (!pick) {
            std::ostringstream os;
            os << "resolvent cover made no progress at " << std::min(targets.size(), opt.targets_per_round)
               << " uncovered targets";
            throw BudgetExhausted(os.str());
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            best[i] = std::max(best[i], pick_row[i]);
            covered[i] = best[i] > opt.kappa_threshold;
        }
        chosen.push_back(std::move(*pick));
    }

    ResolventCover<Data> cover;
    cover.grid = std::move(grid);
    for (auto& r : chosen) {
        cover.members.push_back(std::move(r.data));
        cover.multiples.push_back(r.certificate.period_multiple);
        cover.certificates.push_back(std::move(r.certificate));
    }
    cover.kappa = kappa_of(cover.members, cover.grid);
    return cover;
}

}  // namespace

ResolventCover<PiecewisePotential> resolvent_cover(const PiecewisePotential& phi, double window, double epsilon,
                                                   std::uint64_t seed, const CoverOptions& options) {
    if (!(window > 0.0)) throw Error("resolvent_cover needs a positive window");
    if (options.grid_points < 2) throw Error("resolvent_cover needs at least two grid points");
    std::vector<double> grid(static_cast<std::size_t>(options.grid_points));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = -window + 2.0 * window * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    }
    return cover_impl(phi, std::move(grid), false, epsilon, seed, options,
                      [](const PiecewisePotential& p, double t, double e, std::uint64_t s, const GapBudget& b) {
                          return open_gap(p, t, e, s, b);
                      });
}

ResolventCover<VerblunskyCycle> cmv_resolvent_cover(const VerblunskyCycle& alpha, double epsilon,
                                                    std::uint64_t seed, const CoverOptions& options) {
    if (options.grid_points < 2) throw Error("cmv_resolvent_cover needs at least two grid points");
    std::vector<double> grid(static_cast<std::size_t>(options.grid_points));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(grid.size());
    }
    return cover_impl(alpha, std::move(grid), true, epsilon, seed, options,
                      [](const VerblunskyCycle& a, double t, double e, std::uint64_t s, const GapBudget& b) {
                          return cmv_open_gap(a, t, e, s, b);
                      });
}

double cover_kappa(const ResolventCover<PiecewisePotential>& cover) { return kappa_of(cover.members, cover.grid); }
double cover_kappa(const ResolventCover<VerblunskyCycle>& cover) { return kappa_of(cover.members, cover.grid); }

// ---------------------------------------------------------------------------

template <class Data>
long long ResolventCover<Data>::total_multiple() const {
    return std::accumulate(multiples.begin(), multiples.end(), 0LL);
}

template struct ResolventCover<PiecewisePotential>;
template struct ResolventCover<VerblunskyCycle>;

long long minimal_n(long long total_multiple) { return 3 * total_multiple; }

namespace {

template <class Data>
long long hat_n(const ResolventCover<Data>& cover, long long n) {
    if (cover.members.empty()) throw Error("empty resolvent cover");
    const long long sum = cover.total_multiple();
    const long long n0 = minimal_n(sum);
    if (n < n0) {
        std::ostringstream os;
        os << "N = " << n << " is below the feasibility bound N0 = " << n0;
        throw NTooSmall(os.str(), n0);
    }
    return n / sum - 1;
}

template <class Block, class Data>
std::vector<Block> layout(const Data& input, const ResolventCover<Data>& cover, long long n) {
    const long long nh = hat_n(cover, n);
    std::vector<Block> blocks;
    for (const auto& m : cover.members) blocks.push_back({m, nh + 1});
    const long long rest = n - (nh + 1) * cover.total_multiple();
    if (rest > 0) blocks.push_back({input, rest});
    return blocks;
}

template <class Data>
ConstructionReport<Data> base_report(const ResolventCover<Data>& cover, long long n, double input_period) {
    ConstructionReport<Data> rep;
    rep.cover = cover;
    rep.n = n;
    rep.n_hat = hat_n(cover, n);
    rep.input_period = input_period;
    long long acc = 0;
    rep.starts.push_back(0.0);
    for (long long k : cover.multiples) {
        acc += k;
        rep.starts.push_back(static_cast<double>((rep.n_hat + 1) * acc) * input_period);
    }
    rep.final_period = static_cast<double>(n) * input_period;
    const long long kmin = *std::min_element(cover.multiples.begin(), cover.multiples.end());
    rep.c1 = cover.kappa * static_cast<double>(kmin) / (2.0 * static_cast<double>(cover.total_multiple()));
    return rep;
}

}  // namespace

BlockPotential thin_blocks(const PiecewisePotential& phi, const ResolventCover<PiecewisePotential>& cover,
                           long long n) {
    return BlockPotential{layout<BlockPotential::Block>(phi, cover, n)};
}

BlockCycle thin_blocks(const VerblunskyCycle& alpha, const ResolventCover<VerblunskyCycle>& cover, long long n) {
    return BlockCycle{layout<BlockCycle::Block>(alpha, cover, n)};
}

ThinResult<PiecewisePotential> thin_spectrum(const PiecewisePotential& phi,
                                             const ResolventCover<PiecewisePotential>& cover, double window,
                                             long long n) {
    const BlockPotential blocks = thin_blocks(phi, cover, n);
    auto rep = base_report(cover, n, phi.period());
    PiecewisePotential out = blocks.flatten();
    const BandSet b = bands(blocks, window);
    rep.window = window;
    rep.bands = b.intervals;
    rep.measure = b.measure();
    rep.distance = sup_distance(phi.repeated(n), out);
    return {std::move(out), std::move(rep)};
}

ThinResult<PiecewisePotential> thin_spectrum(const PiecewisePotential& phi, double window, double epsilon,
                                             long long n, std::uint64_t seed, const CoverOptions& options) {
    const auto cover = resolvent_cover(phi, window, epsilon, seed, options);
    auto r = thin_spectrum(phi, cover, window, n);
    if (!(r.report.distance < epsilon)) throw NumericalAssertion("thin-spectrum data left the epsilon ball");
    return r;
}

ThinResult<VerblunskyCycle> cmv_thin_spectrum(const VerblunskyCycle& alpha,
                                              const ResolventCover<VerblunskyCycle>& cover, long long n) {
    const BlockCycle blocks = thin_blocks(alpha, cover, n);
    auto rep = base_report(cover, n, static_cast<double>(alpha.period()));
    VerblunskyCycle out = blocks.flatten();
    const ArcSet arcs = cmv_bands(blocks);
    rep.bands = arcs.arcs;
    rep.measure = arcs.measure();
    rep.distance = poincare_delta(alpha, out);
    return {std::move(out), std::move(rep)};
}

ThinResult<VerblunskyCycle> cmv_thin_spectrum(const VerblunskyCycle& alpha, double epsilon, long long n,
                                              std::uint64_t seed, const CoverOptions& options) {
    const auto cover = cmv_resolvent_cover(alpha, epsilon, seed, options);
    auto r = cmv_thin_spectrum(alpha, cover, n);
    if (!(r.report.distance < epsilon)) throw NumericalAssertion("thin-spectrum data left the epsilon ball");
    return r;
}

std::optional<double> fit_log_measure_slope(const std::vector<double>& periods, const std::vector<double>& measures) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(periods.size(), measures.size()); ++i) {
        if (measures[i] > 0.0) pts.emplace_back(periods[i], std::log(measures[i]));
    }
    if (pts.size() < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (auto [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (!(sxx > 0.0)) return std::nullopt;
    return sxy / sxx;
}

}  // namespace thinspec
