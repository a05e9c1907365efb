#include "thinspec/su11.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "thinspec/errors.hpp"

namespace thinspec {

double su11_defect(const ComplexMat2& m) {
    const ComplexMat2 j = j_form();
    const double form = distance(m.adjoint() * j * m, j);
    return std::max(form, std::abs(m.det() - 1.0));
}

namespace {

double group_scale(const ComplexMat2& m) {
    const double n = m.max_abs();
    return std::max(1.0, n * n);
}

void require_group(const ComplexMat2& m, double tol) {
    const double defect = su11_defect(m);
    if (!(defect <= tol * group_scale(m))) {
        std::ostringstream os;
        os << "matrix not in SU(1,1): defect " << defect;
        throw NotInGroup(os.str());
    }
}

}  // namespace

Su11Class classify(const ComplexMat2& m, double tol) {
    require_group(m, tol);
    const cplx tr = m.trace();
    if (!(std::abs(tr.imag()) <= tol * std::max(1.0, m.max_abs()))) {
        throw NotInGroup("trace is not real");
    }
    const double t = tr.real();
    if (std::abs(t - 2.0) <= kParabolicTolerance) return Parabolic{+1};
    if (std::abs(t + 2.0) <= kParabolicTolerance) return Parabolic{-1};
    if (std::abs(t) < 2.0) return Elliptic{std::acos(t / 2.0)};
    const double root = std::sqrt(t * t - 4.0);
    return Hyperbolic{t > 0 ? (t + root) / 2.0 : (t - root) / 2.0};
}

RiemannPoint mobius_apply(const ComplexMat2& m, RiemannPoint z) {
    cplx num, den;
    if (z.infinite) {
        num = m.a;
        den = m.c;
    } else {
        num = m.a * z.value + m.b;
        den = m.c * z.value + m.d;
    }
    if (den == cplx{}) return RiemannPoint::infinity();
    return RiemannPoint::finite(num / den);
}

cplx disk_fixed_point(const ComplexMat2& m) {
    if (!is_elliptic(classify(m))) throw NotElliptic("disk_fixed_point needs an elliptic element");
    return inner_fixed_point(m);
}

cplx inner_fixed_point(const ComplexMat2& m) {
    // c xi^2 + (d - a) xi - b = 0, discriminant Tr^2 - 4.
    const cplx qa = m.c;
    const cplx qb = m.d - m.a;
    const cplx qc = -m.b;
    cplx root = std::sqrt(qb * qb - 4.0 * qa * qc);
    if ((std::conj(qb) * root).real() < 0) root = -root;
    const cplx q = -0.5 * (qb + root);
    if (q == cplx{}) return cplx{};
    const cplx x2 = qc / q;
    if (qa == cplx{}) return x2;
    const cplx x1 = q / qa;
    return std::abs(x1) < std::abs(x2) ? x1 : x2;
}

ComplexMat2 conjugate_to_rotation(const ComplexMat2& m) {
    const cplx xi = disk_fixed_point(m);
    const double s = 1.0 / std::sqrt(1.0 - std::norm(xi));
    return {s, -s * xi, -s * std::conj(xi), s};
}

ComplexMat2 cayley_matrix() {
    const cplx f = -1.0 / cplx{1.0, 1.0};
    return {f, -kI * f, f, kI * f};
}

ComplexMat2 cayley_to_sl2r(const ComplexMat2& m) {
    require_group(m, kGroupTolerance);
    const ComplexMat2 w = cayley_matrix();
    return w.adjoint() * m * w;
}

GordonBounds gordon_lower_bounds(const ComplexMat2& m, const Vec2& v) {
    const Vec2 mv = m * v;
    const Vec2 m2v = m * mv;
    const Vec2 minv = m.inverse() * v;
    const double n1 = mv.norm();
    const double n2 = m2v.norm();
    return {std::max({minv.norm(), n1, n2}), std::max(n1, n2)};
}

// ---------------------------------------------------------------------------

SemigroupWord::SemigroupWord(std::vector<WordRun> runs) {
    for (const auto& r : runs) {
        if (r.letter != 0 && r.letter != 1) throw Error("word letter must be 0 or 1");
        if (r.power <= 0) throw Error("word powers must be positive");
        if (!runs_.empty() && runs_.back().letter == r.letter) {
            runs_.back().power += r.power;
        } else {
            runs_.push_back(r);
        }
    }
}

SemigroupWord SemigroupWord::parse(std::string_view text) {
    std::vector<WordRun> runs;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip();
    while (i < text.size()) {
        WordRun r;
        if (text[i] == 'A') r.letter = 0;
        else if (text[i] == 'B') r.letter = 1;
        else throw Error("bad word letter in '" + std::string(text) + "'");
        ++i;
        if (i < text.size() && text[i] == '^') {
            ++i;
            const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), r.power);
            if (ec != std::errc{}) throw Error("bad word power in '" + std::string(text) + "'");
            i = static_cast<std::size_t>(ptr - text.data());
        }
        runs.push_back(r);
        skip();
    }
    return SemigroupWord(std::move(runs));
}

long long SemigroupWord::total_power() const {
    long long n = 0;
    for (const auto& r : runs_) n += r.power;
    return n;
}

ComplexMat2 SemigroupWord::evaluate(const ComplexMat2& a, const ComplexMat2& b) const {
    ComplexMat2 p = ComplexMat2::identity();
    for (const auto& r : runs_) p = power(r.letter == 0 ? a : b, r.power) * p;
    return p;
}

std::string SemigroupWord::to_string() const {
    std::string s;
    for (const auto& r : runs_) {
        if (!s.empty()) s += ' ';
        s += r.letter == 0 ? 'A' : 'B';
        s += '^';
        s += std::to_string(r.power);
    }
    return s;
}

// ---------------------------------------------------------------------------

long long best_inverse_power(const ComplexMat2& a, int max_power) {
    const ComplexMat2 inv = a.inverse();
    ComplexMat2 p = a;
    long long best = 1;
    double best_dist = distance(p, inv);
    for (int n = 2; n <= max_power; ++n) {
        p *= a;
        const double d = distance(p, inv);
        if (d < best_dist) {
            best_dist = d;
            best = n;
        }
    }
    return best;
}

namespace {

struct Token {
    int letter;
    long long power;
    ComplexMat2 matrix;
};

// Depth-first enumeration of token words of a fixed length. Words begin with
// an A-token and end with a B-token; every word containing both letters is
// cyclically conjugate to such a word, and traces are conjugation invariant.
class WordEnumerator {
public:
    WordEnumerator(const std::vector<Token>& tokens, const SemigroupBudget& budget, long long& nodes)
        : tokens_(tokens), budget_(budget), nodes_(nodes) {}

    // Returns false once the node budget is spent.
    bool run(int length) {
        length_ = length;
        stack_.clear();
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            if (tokens_[i].letter != 0) continue;
            if (!descend(i, tokens_[i].matrix, tokens_[i].power)) return false;
        }
        return true;
    }

    bool found() const { return found_; }
    double best_trace() const { return best_trace_; }
    const std::vector<std::size_t>& best() const { return best_; }

private:
    bool descend(std::size_t token, const ComplexMat2& product, long long total) {
        if (++nodes_ > budget_.max_nodes) return false;
        stack_.push_back(token);
        const int depth = static_cast<int>(stack_.size());
        if (depth == length_) {
            if (tokens_[token].letter == 1) consider(product, total);
        } else {
            for (std::size_t i = 0; i < tokens_.size(); ++i) {
                if (!descend(i, tokens_[i].matrix * product, total + tokens_[i].power)) return false;
            }
        }
        stack_.pop_back();
        return true;
    }

    void consider(const ComplexMat2& product, long long total) {
        const double t = product.trace().real();
        if (std::abs(t) < 2.0 + budget_.margin) return;
        if (budget_.accept_total && !budget_.accept_total(total)) return;
        if (!found_ || std::abs(t) > std::abs(best_trace_)) {
            found_ = true;
            best_trace_ = t;
            best_ = stack_;
        }
    }

    const std::vector<Token>& tokens_;
    const SemigroupBudget& budget_;
    long long& nodes_;
    int length_ = 0;
    std::vector<std::size_t> stack_;
    bool found_ = false;
    double best_trace_ = 0.0;
    std::vector<std::size_t> best_;
};

SemigroupWord word_of(const std::vector<Token>& tokens, const std::vector<std::size_t>& picks) {
    std::vector<WordRun> runs;
    runs.reserve(picks.size());
    for (auto i : picks) runs.push_back({tokens[i].letter, tokens[i].power});
    return SemigroupWord(std::move(runs));
}

}  // namespace

SemigroupSearch hyperbolic_in_semigroup(const ComplexMat2& a, const ComplexMat2& b,
                                        const SemigroupBudget& budget) {
    for (const auto* m : {&a, &b}) {
        if (!is_elliptic(classify(*m))) throw NotElliptic("semigroup generators must be elliptic");
    }
    SemigroupSearch out;
    if (commutator(a, b).max_abs() <= budget.commutator_tolerance) {
        out.status = SearchStatus::CommutingInput;
        return out;
    }

    auto attempt = [&](const std::vector<Token>& tokens, int from, int to) {
        for (int len = from; len <= to; ++len) {
            WordEnumerator e(tokens, budget, out.nodes);
            const bool within = e.run(len);
            if (e.found()) {
                out.status = SearchStatus::Found;
                out.word = word_of(tokens, e.best());
                out.trace = e.best_trace();
                return true;
            }
            if (!within) return false;
        }
        return false;
    };

    const std::vector<Token> plain{{0, 1, a}, {1, 1, b}};
    if (attempt(plain, 2, std::min(budget.plain_max_length, budget.max_length))) return out;

    std::vector<Token> tokens = plain;
    const long long pa = best_inverse_power(a, budget.max_inverse_power);
    const long long pb = best_inverse_power(b, budget.max_inverse_power);
    if (pa > 1) tokens.push_back({0, pa, power(a, pa)});
    if (pb > 1) tokens.push_back({1, pb, power(b, pb)});
    if (tokens.size() > plain.size() && out.nodes < budget.max_nodes) {
        if (attempt(tokens, 2, budget.max_length)) return out;
    }
    out.status = SearchStatus::NotFound;
    return out;
}

}  // namespace thinspec
