#include "thinspec/report.hpp"

#include <charconv>
#include <cmath>

#include "thinspec/errors.hpp"

namespace thinspec {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace {

// JSON has no infinities; they become null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double real_at(const Json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string("expected a number in ") + what);
    return j.get<double>();
}

}  // namespace

Json to_json(const PiecewisePotential& phi) {
    Json out = Json::array();
    for (const auto& s : phi.segments()) out.push_back({s.length, s.value.real(), s.value.imag()});
    return out;
}

Json to_json(const VerblunskyCycle& alpha) {
    Json out = Json::array();
    for (auto a : alpha.values()) out.push_back({a.real(), a.imag()});
    return out;
}

Json to_json(const std::vector<Interval>& intervals) {
    Json out = Json::array();
    for (const auto& i : intervals) out.push_back({i.a, i.b});
    return out;
}

PiecewisePotential potential_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("segments must be a nonempty array of [length, re, im]");
    std::vector<Segment> segs;
    for (const auto& s : j) {
        if (!s.is_array() || s.size() < 2 || s.size() > 3) {
            throw ConfigError("each segment must be [length, re] or [length, re, im]");
        }
        const double len = real_at(s[0], "segment length");
        if (!(len > 0.0)) throw ConfigError("segment lengths must be positive");
        const double im = s.size() == 3 ? real_at(s[2], "segment value") : 0.0;
        segs.push_back({len, {real_at(s[1], "segment value"), im}});
    }
    return PiecewisePotential(std::move(segs));
}

VerblunskyCycle cycle_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("Verblunsky values must be a nonempty array of [re, im]");
    std::vector<cplx> v;
    for (const auto& a : j) {
        if (a.is_number()) {
            v.emplace_back(a.get<double>(), 0.0);
            continue;
        }
        if (!a.is_array() || a.size() != 2) throw ConfigError("each Verblunsky value must be [re, im]");
        const cplx z{real_at(a[0], "Verblunsky value"), real_at(a[1], "Verblunsky value")};
        if (!(std::abs(z) < 1.0)) throw ConfigError("Verblunsky values must lie in the open unit disk");
        v.push_back(z);
    }
    return VerblunskyCycle(std::move(v));
}

std::vector<Interval> intervals_from_json(const Json& j) {
    if (!j.is_array()) throw ConfigError("intervals must be an array of [a, b]");
    std::vector<Interval> out;
    for (const auto& i : j) {
        if (!i.is_array() || i.size() != 2) throw ConfigError("each interval must be [a, b]");
        const Interval v{real_at(i[0], "interval"), real_at(i[1], "interval")};
        if (!(v.a <= v.b)) throw ConfigError("intervals need a <= b");
        out.push_back(v);
    }
    return merge_intervals(std::move(out));
}

namespace {

template <class Data>
Json certificate_json(const GapCertificate<Data>& c) {
    return {
        {"target", c.target},
        {"seed_trace", c.seed_trace},
        {"degenerate_step", c.degenerate_step},
        {"case", static_cast<int>(c.path)},
        {"word", c.word.to_string()},
        {"word_length", c.word.total_power()},
        {"base", to_json(c.base)},
        {"partner", to_json(c.partner)},
        {"period_multiple", c.period_multiple},
        {"trace", c.trace},
        {"distance", c.distance},
        {"samples", c.samples},
    };
}

template <class Data>
Json cover_json(const ResolventCover<Data>& c) {
    Json members = Json::array();
    for (std::size_t j = 0; j < c.members.size(); ++j) {
        members.push_back({{"multiple", c.multiples[j]}, {"data", to_json(c.members[j])}});
    }
    Json certs = Json::array();
    for (const auto& k : c.certificates) certs.push_back(certificate_json(k));
    return {
        {"members", members},
        {"kappa", c.kappa},
        {"grid_points", c.grid.size()},
        {"grid", c.grid.empty() ? Json::array() : Json::array({c.grid.front(), c.grid.back()})},
        {"total_multiple", c.total_multiple()},
        {"certificates", certs},
    };
}

template <class Data>
Json report_json(const ConstructionReport<Data>& r, const char* kind) {
    Json blocks = Json::array();
    for (std::size_t j = 0; j < r.m(); ++j) {
        blocks.push_back({{"member", j}, {"copies", r.n_hat + 1}, {"start", r.starts[j]}});
    }
    const long long rest = r.n - (r.n_hat + 1) * r.cover.total_multiple();
    Json schedule = {{"blocks", blocks}, {"starts", r.starts}, {"filler_copies", rest}};
    return {
        {"kind", kind},
        {"cover", cover_json(r.cover)},
        {"m", r.m()},
        {"kappa", r.cover.kappa},
        {"n", r.n},
        {"n_hat", r.n_hat},
        {"input_period", r.input_period},
        {"final_period", r.final_period},
        {"window", r.window},
        {"schedule", schedule},
        {"bands", to_json(r.bands)},
        {"band_count", r.bands.size()},
        {"measure", r.measure},
        {"c1", r.c1},
        {"c1_equal_periods", r.c1_equal_periods()},
        {"distance", r.distance},
        {"fitted_slope", r.fitted_slope ? Json(*r.fitted_slope) : Json(nullptr)},
    };
}

}  // namespace

Json to_json(const GapCertificate<PiecewisePotential>& c) { return certificate_json(c); }
Json to_json(const GapCertificate<VerblunskyCycle>& c) { return certificate_json(c); }
Json to_json(const ResolventCover<PiecewisePotential>& c) { return cover_json(c); }
Json to_json(const ResolventCover<VerblunskyCycle>& c) { return cover_json(c); }
Json to_json(const ConstructionReport<PiecewisePotential>& r) { return report_json(r, "dirac"); }
Json to_json(const ConstructionReport<VerblunskyCycle>& r) { return report_json(r, "cmv"); }

Json to_json(const DimensionReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"epsilon", row.epsilon},
                        {"count", row.count},
                        {"slope", row.slope ? Json(*row.slope) : Json(nullptr)}});
    }
    return {{"scales", rows}, {"lower", r.lower}, {"upper", r.upper}, {"stage_measures", r.stage_measures}};
}

Json to_json(const Schedule& s) {
    Json stages = Json::array();
    for (std::size_t n = 0; n < s.stages.size(); ++n) {
        const auto& st = s.stages[n];
        Json j = {
            {"stage", n},
            {"period", st.period},
            {"window", st.window},
            {"measure", st.measure},
            {"band_count", st.bands.size()},
            {"log_epsilon", number(st.log_epsilon)},
            {"epsilon", st.epsilon},
            {"distance_to_previous", st.distance_to_previous},
            {"log_target", number(st.log_target)},
            {"target_met", st.target_met()},
        };
        if (st.construction) {
            j["cover_members"] = st.construction->m();
            j["kappa"] = st.construction->cover.kappa;
            j["n"] = st.construction->n;
            j["n_hat"] = st.construction->n_hat;
        }
        stages.push_back(std::move(j));
    }
    return {{"seed", to_json(s.seed)}, {"epsilon", s.epsilon}, {"stages", stages}};
}

}  // namespace thinspec
