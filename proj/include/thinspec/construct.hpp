#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "thinspec/cmv.hpp"
#include "thinspec/dirac.hpp"
#include "thinspec/su11.hpp"

namespace thinspec {

/// Limits of the randomized gap-opening search.
struct GapBudget {
    int max_samples = 1000;              ///< perturbations drawn, all cases together
    double commutator_threshold = 1e-3;  ///< max-entry norm of [M0, M1]
    double ellipticity_margin = 0.01;    ///< both blocks need |Tr| <= 2 - margin
    /// Dirac seeds with fewer segments are subdivided first, so that segment 0
    /// can stay fixed while the rest moves.
    int min_segments = 4;
    SemigroupBudget search;
};

/// Which case of the gap-opening argument produced the result.
enum class GapCase {
    AlreadyOpen = 1,  ///< |D| > 2 at the target; data returned unchanged
    Elliptic = 2,     ///< |D| < 2: noncommuting partner plus hyperbolic word
};

/// Record of one gap opening. Data is PiecewisePotential or VerblunskyCycle.
template <class Data>
struct GapCertificate {
    double target = 0.0;          ///< energy lambda or angle theta
    double seed_trace = 0.0;      ///< discriminant of the input at the target
    bool degenerate_step = false; ///< a |D| ~ 2 input was perturbed first
    GapCase path = GapCase::AlreadyOpen;
    SemigroupWord word;           ///< letter 0 is `base`, letter 1 is `partner`
    Data base;                    ///< block used for letter 0 (the input, possibly perturbed)
    Data partner;                 ///< block used for letter 1
    long long period_multiple = 1;
    double trace = 0.0;           ///< discriminant of the result at the target
    double distance = 0.0;        ///< sup-norm or Poincare distance to the input
    int samples = 0;

    /// The blocks laid out per the word; `base` alone for an already open gap.
    Data assemble() const;
    /// Re-evaluates the word on the block monodromies and checks it against the
    /// monodromy of the assembled data (relative 1e-8), then |D| > 2 at the
    /// target. Throws NumericalAssertion on failure.
    void verify() const;
};

template <class Data>
struct GapResult {
    Data data;
    GapCertificate<Data> certificate;
};

/// Opens a gap of the operator at energy lambda by a perturbation of sup-norm
/// less than epsilon. Throws BudgetExhausted when the samples run out.
GapResult<PiecewisePotential> open_gap(const PiecewisePotential& phi, double lambda, double epsilon,
                                       std::uint64_t seed, const GapBudget& budget = {});

/// CMV version: the distance is the Poincare metric; every coefficient moves.
GapResult<VerblunskyCycle> cmv_open_gap(const VerblunskyCycle& alpha, double theta, double epsilon,
                                        std::uint64_t seed, const GapBudget& budget = {});

/// Gap budget used inside covers: 200 samples per opening and 2e5 search
/// nodes per sample, which keeps failed openings cheap.
GapBudget cover_gap_budget();

struct CoverOptions {
    int grid_points = 2048;
    double kappa_threshold = 1e-3;  ///< a grid point is covered when max_j L exceeds this
    int max_members = 64;
    int attempts_per_target = 8;    ///< seeds tried per target; the best coverage wins
    std::size_t targets_per_round = 8;  ///< uncovered runs tried before giving up
    /// Attempt a opens the gap on the input repeated seed_repeats[a % size]
    /// times, which gives the random partner a longer period.
    std::vector<int> seed_repeats = {1, 2, 3, 4};
    GapBudget gap = cover_gap_budget();
};

/// Finitely many perturbations, all within epsilon of the input, whose
/// resolvent sets together cover the window. Member j has period
/// multiples[j] times the input period; periods are not equalized.
template <class Data>
struct ResolventCover {
    std::vector<Data> members;
    std::vector<long long> multiples;
    double kappa = 0.0;            ///< min over the grid of max_j L
    std::vector<double> grid;      ///< the verification grid
    std::vector<GapCertificate<Data>> certificates;

    /// Sum of the member multiples.
    long long total_multiple() const;
};

/// Greedy cover of [-R, R]: the midpoint of the longest uncovered grid run is
/// gapped next, falling back to shorter runs when that fails. Among the
/// attempts at a target the one covering the most new grid points per unit of
/// period wins. Throws BudgetExhausted when max_members does not suffice.
ResolventCover<PiecewisePotential> resolvent_cover(const PiecewisePotential& phi, double window,
                                                   double epsilon, std::uint64_t seed,
                                                   const CoverOptions& options = {});

/// Cover of the whole circle.
ResolventCover<VerblunskyCycle> cmv_resolvent_cover(const VerblunskyCycle& alpha, double epsilon,
                                                    std::uint64_t seed, const CoverOptions& options = {});

/// min over the cover grid of max_j L, recomputed from the members.
double cover_kappa(const ResolventCover<PiecewisePotential>& cover);
double cover_kappa(const ResolventCover<VerblunskyCycle>& cover);

template <class Data>
struct ConstructionReport {
    ResolventCover<Data> cover;
    long long n = 0;                  ///< final period over the input period
    long long n_hat = 0;              ///< each member repeats n_hat + 1 times
    double input_period = 0.0;
    std::vector<double> starts;       ///< block boundaries s_0 = 0, ..., s_m
    double final_period = 0.0;        ///< N T
    double window = 0.0;              ///< R; 0 for the circle
    std::vector<Interval> bands;      ///< measured spectrum (arcs for CMV)
    double measure = 0.0;
    double c1 = 0.0;                  ///< kappa K_min / (2 sum K_j); kappa / (2m) for equal periods
    double distance = 0.0;            ///< to the input, sup-norm or Poincare
    std::optional<double> fitted_slope;  ///< d log(measure) / d final_period over an N-grid

    std::size_t m() const { return cover.members.size(); }
    /// kappa / (2m), the constant of the proof with equal member periods.
    double c1_equal_periods() const { return cover.kappa / (2.0 * static_cast<double>(m())); }
};

template <class Data>
struct ThinResult {
    Data data;
    ConstructionReport<Data> report;
};

/// Smallest admissible N for a cover: 3 sum_j K_j, which is 3 m K when all
/// members have period K T.
long long minimal_n(long long total_multiple);

/// Lays out n_hat + 1 copies of each cover member, n_hat maximal with
/// (n_hat + 1) sum_j K_j <= N, and fills the rest of the period N T with the
/// input. Throws NTooSmall for N < minimal_n.
ThinResult<PiecewisePotential> thin_spectrum(const PiecewisePotential& phi,
                                             const ResolventCover<PiecewisePotential>& cover,
                                             double window, long long n);
ThinResult<PiecewisePotential> thin_spectrum(const PiecewisePotential& phi, double window, double epsilon,
                                             long long n, std::uint64_t seed, const CoverOptions& options = {});

ThinResult<VerblunskyCycle> cmv_thin_spectrum(const VerblunskyCycle& alpha,
                                              const ResolventCover<VerblunskyCycle>& cover, long long n);
ThinResult<VerblunskyCycle> cmv_thin_spectrum(const VerblunskyCycle& alpha, double epsilon, long long n,
                                              std::uint64_t seed, const CoverOptions& options = {});

/// Block form of a thin-spectrum result, for fast monodromies.
BlockPotential thin_blocks(const PiecewisePotential& phi, const ResolventCover<PiecewisePotential>& cover,
                           long long n);
BlockCycle thin_blocks(const VerblunskyCycle& alpha, const ResolventCover<VerblunskyCycle>& cover, long long n);

/// Least-squares slope of log(measure) against the final period. Needs at
/// least two reports with positive measure; returns nullopt otherwise.
std::optional<double> fit_log_measure_slope(const std::vector<double>& periods,
                                            const std::vector<double>& measures);

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace thinspec
