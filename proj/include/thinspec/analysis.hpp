#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thinspec/bandset.hpp"
#include "thinspec/cmv.hpp"
#include "thinspec/construct.hpp"
#include "thinspec/dirac.hpp"

namespace thinspec {

double lebesgue_measure(const BandSet& s);
/// Angular length.
double lebesgue_measure(const ArcSet& s);

/// Exact Hausdorff distance of two nonempty finite unions of closed
/// intervals. Throws EmptySet.
double hausdorff_distance(const BandSet& s1, const BandSet& s2);

/// Hausdorff distance seen from [-r, r]: the larger of sup over s1 inside
/// [-r, r] of the distance to s2, and the same with the roles swapped. Use it
/// for band sets computed on a window wider than r by at least the expected
/// distance, so that clipping at the window edge does not count. Throws
/// EmptySet when either set is empty.
double hausdorff_distance_within(const BandSet& s1, const BandSet& s2, double r);

struct ScaleRow {
    double epsilon = 0.0;
    long long count = 0;
    /// log(N_i / N_{i-1}) / log(eps_{i-1} / eps_i) against the previous row;
    /// absent on the first row.
    std::optional<double> slope;
};

struct DimensionReport {
    std::vector<ScaleRow> rows;
    double lower = 0.0;  ///< smallest scale-pair slope, clamped to [0, 1]
    double upper = 0.0;  ///< largest scale-pair slope, clamped to [0, 1]
    std::vector<double> stage_measures;

    /// Columns epsilon, count, slope; the first slope is empty.
    std::string csv() const;
};

/// Minimal number of closed intervals of length eps covering the set, by the
/// greedy left-to-right sweep. Counts are rounded with a 1e-9 relative
/// allowance, so that [0, 1] at eps = 1/n gives exactly n.
long long covering_count(const BandSet& s, double eps);
/// On the circle: the greedy sweep started at each arc, minimised.
long long covering_count(const ArcSet& s, double eps);

/// Scales must be positive and strictly decreasing.
DimensionReport box_counting(const BandSet& s, const std::vector<double>& scales);
DimensionReport box_counting(const ArcSet& s, const std::vector<double>& scales);

/// eps_k = base^-k for k = 1..count.
std::vector<double> geometric_scales(double base, int count);

struct ScheduleStage {
    PiecewisePotential data;
    double period = 0.0;             ///< T_n
    double window = 0.0;             ///< n, the stage window [-n, n]
    BandSet bands;                   ///< spectrum in the window
    double measure = 0.0;
    /// Step bound eps_n in log form; exp may underflow to 0.
    double log_epsilon = 0.0;
    double epsilon = 0.0;
    double distance_to_previous = 0.0;  ///< sup-norm, 0 for the seed
    double log_target = 0.0;            ///< log of the measure target exp(-T_n^p)
    /// Present for constructed stages.
    std::optional<ConstructionReport<PiecewisePotential>> construction;

    bool target_met() const;
};

struct Schedule {
    PiecewisePotential seed;
    double epsilon = 0.0;
    std::vector<ScheduleStage> stages;
};

struct ScheduleOptions {
    /// The stage measure target is exp(-T_n^target_exponent).
    double target_exponent = 0.5;
    /// Stage n uses N = n_multiple * N0 of its cover.
    long long n_multiple = 1;
    /// eps_n is this fraction of the minimum it must stay below.
    double step_fraction = 0.5;
    CoverOptions cover;
};

/// log of min(eps_{n-1} / 2, (n+1)^{-T_n} / 2, measure / 4); the first
/// argument is log eps_{n-1}.
double log_step_bound(double log_previous, int n, double period, double measure);

/// Builds stages 1..n_max from eps_0 = epsilon / 2, stage n being a thin
/// spectrum of stage n - 1 on [-n, n] within eps_{n-1}. Throws
/// StageInfeasible when a stage cannot be built, e.g. because eps_n is below
/// the resolution of the data or the stage spectrum is empty.
Schedule build_schedule(const PiecewisePotential& seed, double epsilon, int n_max, std::uint64_t seed_value,
                        const ScheduleOptions& options = {});

/// Re-derives every stage constraint from the stage data and returns the
/// violations, empty when the schedule is coherent.
std::vector<std::string> check_schedule(const Schedule& schedule);

/// C^q max(sup |phi(x - q) - phi(x)|, sup |phi(x + q) - phi(x)|) over
/// 0 <= x < q, exact for piecewise-constant data. The power is taken in log
/// space; the result is +inf on overflow.
double gordon_defect(const PiecewisePotential& phi, double q, double c);
/// The same quantity as a natural logarithm; -inf when the data repeats.
double log_gordon_defect(const PiecewisePotential& phi, double q, double c);

}  // namespace thinspec
