#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "thinspec/mat2.hpp"

namespace thinspec {

/// Group-membership tolerance in max-entry norm, scaled by max(1, |M|^2).
inline constexpr double kGroupTolerance = 1e-9;
/// A trace within this distance of +-2 is reported as parabolic.
inline constexpr double kParabolicTolerance = 1e-9;

/// max(|M* j M - j|, |det M - 1|). Zero exactly on SU(1,1).
double su11_defect(const ComplexMat2& m);

struct Elliptic {
    double angle;  ///< theta in (0, pi) with 2 cos(theta) = Tr M
};
struct Hyperbolic {
    double multiplier;  ///< real eigenvalue with |lambda| > 1
};
struct Parabolic {
    int sign;  ///< sign of the trace, +-1
};
using Su11Class = std::variant<Elliptic, Hyperbolic, Parabolic>;

/// Classifies an SU(1,1) element by its trace. Throws NotInGroup when the
/// matrix is not in the group or its trace is not real, to tolerance.
Su11Class classify(const ComplexMat2& m, double tol = kGroupTolerance);

inline bool is_elliptic(const Su11Class& k) { return std::holds_alternative<Elliptic>(k); }
inline bool is_hyperbolic(const Su11Class& k) { return std::holds_alternative<Hyperbolic>(k); }

/// A point of the Riemann sphere; projective convention [inf, 1] = [1, 0].
struct RiemannPoint {
    cplx value{};
    bool infinite = false;

    static RiemannPoint infinity() { return {cplx{}, true}; }
    static RiemannPoint finite(cplx z) { return {z, false}; }
};

RiemannPoint mobius_apply(const ComplexMat2& m, RiemannPoint z);
inline cplx mobius_apply(const ComplexMat2& m, cplx z) {
    const auto p = mobius_apply(m, RiemannPoint::finite(z));
    return p.infinite ? cplx{INFINITY, 0.0} : p.value;
}

/// The unique fixed point in the open unit disk of an elliptic element.
cplx disk_fixed_point(const ComplexMat2& m);
/// The fixed point of smaller modulus, without classifying first. Near a
/// parabolic boundary this stays usable where disk_fixed_point refuses.
cplx inner_fixed_point(const ComplexMat2& m);

/// B in SU(1,1) with B M B^{-1} diagonal (a rotation), built from the disk
/// fixed point xi as (1 - |xi|^2)^{-1/2} [[1, -xi], [-conj(xi), 1]].
ComplexMat2 conjugate_to_rotation(const ComplexMat2& m);

/// The printed Cayley matrix W = -(1+i)^{-1} [[1, -i], [1, i]].
ComplexMat2 cayley_matrix();

/// W* M W; maps SU(1,1) onto SL(2,R).
ComplexMat2 cayley_to_sl2r(const ComplexMat2& m);

struct GordonBounds {
    double m3;  ///< max(|M^-1 v|, |M v|, |M^2 v|)
    double m2;  ///< max(|M v|, |M^2 v|)
};

/// Norms entering the Cayley-Hamilton repetition bounds. For det M = 1:
/// m3 >= |v|/2 and m2 >= min(1, 1/|Tr M|) |v| / 2.
GordonBounds gordon_lower_bounds(const ComplexMat2& m, const Vec2& v);

// ---------------------------------------------------------------------------
// Semigroup words

/// One maximal run of a letter: letter 0 is A, letter 1 is B.
struct WordRun {
    int letter = 0;
    long long power = 1;

    friend bool operator==(const WordRun&, const WordRun&) = default;
};

/// A positive word in two letters, stored as runs in application order: the
/// first run acts first, so it is the rightmost factor of the product and the
/// leftmost block of a concatenated potential.
class SemigroupWord {
public:
    SemigroupWord() = default;
    explicit SemigroupWord(std::vector<WordRun> runs);

    /// Parses the text form produced by to_string(), e.g. "A^3 B^1 A^2".
    static SemigroupWord parse(std::string_view text);

    const std::vector<WordRun>& runs() const { return runs_; }
    bool empty() const { return runs_.empty(); }

    /// Total number of letters, i.e. the period multiplier of the concatenation.
    long long total_power() const;

    ComplexMat2 evaluate(const ComplexMat2& a, const ComplexMat2& b) const;

    std::string to_string() const;

    friend bool operator==(const SemigroupWord&, const SemigroupWord&) = default;

private:
    std::vector<WordRun> runs_;
};

struct SemigroupBudget {
    double margin = 0.05;                  ///< accept |Tr| >= 2 + margin
    int plain_max_length = 16;             ///< exhaustive words over {A, B}
    int max_length = 24;                   ///< token length over {A, B, A^p, B^p}
    int max_inverse_power = 256;           ///< p minimises |A^n - A^-1| over n <= this; 1 disables tokens
    long long max_nodes = 2'000'000;       ///< node budget of the token search
    double commutator_tolerance = 1e-9;    ///< |[A, B]| below this counts as commuting
    /// Optional filter on the total power of an accepted word.
    std::function<bool(long long)> accept_total;
};

enum class SearchStatus { Found, NotFound, CommutingInput };

struct SemigroupSearch {
    SearchStatus status = SearchStatus::NotFound;
    SemigroupWord word;
    double trace = 0.0;        ///< real trace of the accepted product
    long long nodes = 0;       ///< words evaluated
};

/// Power n in [1, max_power] minimising |A^n - A^{-1}|.
long long best_inverse_power(const ComplexMat2& a, int max_power);

/// Searches the semigroup generated by two elliptic SU(1,1) elements for a
/// hyperbolic word. Words over {A, B} are tried first by increasing length;
/// then tokens A^p, B^p approximating the inverses are admitted and the
/// search deepens over token count. At the first length that yields an
/// accepted word, the word with the largest |trace| is returned.
SemigroupSearch hyperbolic_in_semigroup(const ComplexMat2& a, const ComplexMat2& b,
                                        const SemigroupBudget& budget = {});

}  // namespace thinspec
