#include "thinspec/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "thinspec/analysis.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/report.hpp"

namespace thinspec::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::string format = "both";
};

struct Context {
    Json config;
    Options opt;
    std::ostream& out;

    bool csv() const { return opt.format != "json"; }
    bool json() const { return opt.format != "csv"; }

    void write(const std::string& name, const std::string& text) const {
        fs::create_directories(opt.out);
        std::ofstream f(fs::path(opt.out) / name, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + (fs::path(opt.out) / name).string());
        f << text;
    }
    void write_json(const std::string& name, const Json& j) const {
        if (json()) write(name, j.dump(2) + "\n");
    }
    void write_csv(const std::string& name, const std::string& text) const {
        if (csv()) write(name, text);
    }
    void summary(const Json& j) const { out << j.dump() << "\n"; }

    std::uint64_t seed() const {
        if (opt.seed) return *opt.seed;
        if (config.contains("seed")) {
            const auto& s = config["seed"];
            if (!s.is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
            return s.get<std::uint64_t>();
        }
        throw ConfigError("this command is randomized and needs a seed (--seed or \"seed\")");
    }

    const Json& section(const char* key) const {
        static const Json empty = Json::object();
        if (!config.contains(key)) return empty;
        if (!config[key].is_object()) throw ConfigError(std::string(key) + " must be an object");
        return config[key];
    }
};

double get_real(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    return j[key].get<double>();
}

double get_positive(const Json& j, const char* key, double fallback) {
    const double v = get_real(j, key, fallback);
    if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be positive");
    return v;
}

long long get_count(const Json& j, const char* key, long long fallback, long long lo = 1) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer() || j[key].get<long long>() < lo) {
        throw ConfigError(std::string(key) + " must be an integer >= " + std::to_string(lo));
    }
    return j[key].get<long long>();
}

double require_real(const Json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing ") + key);
    return get_real(j, key, 0.0);
}

std::vector<double> get_reals(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty()) {
        throw ConfigError(std::string(key) + " must be a nonempty array of numbers");
    }
    std::vector<double> v;
    for (const auto& x : j[key]) {
        if (!x.is_number()) throw ConfigError(std::string(key) + " must contain numbers only");
        v.push_back(x.get<double>());
    }
    return v;
}

std::string kind(const Context& c) {
    const auto& op = c.section("operator");
    if (!op.contains("kind")) return op.contains("values") ? "cmv" : "dirac";
    if (!op["kind"].is_string()) throw ConfigError("operator.kind must be a string");
    const auto k = op["kind"].get<std::string>();
    if (k != "dirac" && k != "cmv") throw ConfigError("operator.kind must be dirac or cmv");
    return k;
}

PiecewisePotential potential(const Context& c) {
    const auto& op = c.section("operator");
    if (kind(c) != "dirac" || !op.contains("segments")) throw ConfigError("this command needs operator.segments");
    return potential_from_json(op["segments"]);
}

VerblunskyCycle cycle(const Context& c) {
    const auto& op = c.section("operator");
    if (kind(c) != "cmv" || !op.contains("values")) throw ConfigError("this command needs operator.values");
    return cycle_from_json(op["values"]);
}

double require_positive(const Json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing ") + key);
    return get_positive(j, key, 0.0);
}

double window(const Context& c) { return require_positive(c.config, "window"); }

double tolerance(const Context& c) { return get_positive(c.config, "tolerance", 1e-10); }

std::string interval_csv(const std::vector<Interval>& v) {
    std::ostringstream os;
    os << "index,left,right,length\n";
    for (std::size_t k = 0; k < v.size(); ++k) {
        os << k << ',' << format_double(v[k].a) << ',' << format_double(v[k].b) << ','
           << format_double(v[k].length()) << '\n';
    }
    return os.str();
}

CoverOptions cover_options(const Json& j) {
    CoverOptions o;
    o.grid_points = static_cast<int>(get_count(j, "grid_points", o.grid_points, 2));
    o.kappa_threshold = get_positive(j, "kappa_threshold", o.kappa_threshold);
    o.max_members = static_cast<int>(get_count(j, "max_members", o.max_members));
    o.attempts_per_target = static_cast<int>(get_count(j, "attempts_per_target", o.attempts_per_target));
    o.targets_per_round = static_cast<std::size_t>(get_count(j, "targets_per_round", 8));
    o.gap.max_samples = static_cast<int>(get_count(j, "max_samples", o.gap.max_samples));
    return o;
}

GapBudget gap_budget(const Json& j) {
    GapBudget b;
    b.max_samples = static_cast<int>(get_count(j, "max_samples", b.max_samples));
    b.commutator_threshold = get_positive(j, "commutator_threshold", b.commutator_threshold);
    b.search.max_length = static_cast<int>(get_count(j, "max_word_length", b.search.max_length));
    return b;
}

// ---------------------------------------------------------------------------

int cmd_cmv_bands(const Context& c);

int cmd_bands(const Context& c) {
    if (kind(c) == "cmv") return cmd_cmv_bands(c);
    const auto phi = potential(c);
    const double r = window(c);
    const BandSet b = bands(phi, r, tolerance(c));
    const Json j = {{"count", b.size()},
                    {"measure", b.measure()},
                    {"window", r},
                    {"period", phi.period()},
                    {"count_bound", band_count_bound(phi.period(), r, phi.sup_norm())},
                    {"bands", to_json(b.intervals)}};
    c.write_csv("bands.csv", interval_csv(b.intervals));
    c.write_json("bands.json", j);
    c.summary({{"command", "bands"}, {"count", b.size()}, {"measure", b.measure()}});
    return kOk;
}

int cmd_cmv_bands(const Context& c) {
    const auto alpha = cycle(c);
    const ArcSet a = cmv_bands(alpha, tolerance(c));
    const Json j = {{"count", a.size()}, {"measure", a.measure()}, {"period", alpha.period()}, {"arcs", to_json(a.arcs)}};
    c.write_csv("cmv_bands.csv", interval_csv(a.arcs));
    c.write_json("cmv_bands.json", j);
    c.summary({{"command", "cmv-bands"}, {"count", a.size()}, {"measure", a.measure()}});
    return kOk;
}

int cmd_dos(const Context& c) {
    const auto phi = potential(c);
    const auto& d = c.section("dos");
    const int nodes = static_cast<int>(get_count(d, "nodes", 8));
    const int outer = static_cast<int>(get_count(d, "outer", 48));
    std::ostringstream csv;
    csv << "energy,density\n";
    Json points = Json::array();
    if (c.config.contains("energies")) {
        for (double e : get_reals(c.config, "energies")) {
            const double rho = dos_density(phi, e, nodes);
            csv << format_double(e) << ',' << format_double(rho) << '\n';
            points.push_back({e, rho});
        }
    }
    Json weights = Json::array();
    if (c.config.contains("window")) {
        for (const auto& band : floquet_bands(phi, window(c), tolerance(c))) {
            weights.push_back({band.a, band.b, dos_band_weight(phi, band, outer, nodes)});
        }
    }
    c.write_csv("dos.csv", csv.str());
    c.write_json("dos.json", {{"period", phi.period()}, {"densities", points}, {"band_weights", weights}});
    c.summary({{"command", "dos"}, {"points", points.size()}, {"bands", weights.size()}});
    return kOk;
}

int cmd_lyapunov(const Context& c) {
    std::ostringstream csv;
    csv << "energy,lyapunov\n";
    Json points = Json::array();
    const bool is_cmv = kind(c) == "cmv";
    for (double e : get_reals(c.config, "energies")) {
        const double l = is_cmv ? cmv_lyapunov(cycle(c), e) : lyapunov(potential(c), e);
        csv << format_double(e) << ',' << format_double(l) << '\n';
        points.push_back({e, l});
    }
    c.write_csv("lyapunov.csv", csv.str());
    c.write_json("lyapunov.json", {{"kind", is_cmv ? "cmv" : "dirac"}, {"points", points}});
    c.summary({{"command", "lyapunov"}, {"points", points.size()}});
    return kOk;
}

int cmd_open_gap(const Context& c) {
    const auto& k = c.section("construction");
    const double eps = require_positive(k, "epsilon");
    const double target = require_real(c.config, "energy");
    const GapBudget budget = gap_budget(k);
    const std::uint64_t seed = c.seed();
    Json cert, data;
    double trace = 0.0, distance = 0.0;
    long long multiple = 1;
    std::string word;
    if (kind(c) == "cmv") {
        const auto r = cmv_open_gap(cycle(c), target, eps, seed, budget);
        cert = to_json(r.certificate);
        data = to_json(r.data);
        trace = r.certificate.trace;
        distance = r.certificate.distance;
        multiple = r.certificate.period_multiple;
        word = r.certificate.word.to_string();
    } else {
        const auto r = open_gap(potential(c), target, eps, seed, budget);
        cert = to_json(r.certificate);
        data = to_json(r.data);
        trace = r.certificate.trace;
        distance = r.certificate.distance;
        multiple = r.certificate.period_multiple;
        word = r.certificate.word.to_string();
    }
    std::ostringstream csv;
    csv << "target,trace,period_multiple,distance,word\n"
        << format_double(target) << ',' << format_double(trace) << ',' << multiple << ',' << format_double(distance)
        << ',' << word << '\n';
    c.write_csv("open_gap.csv", csv.str());
    c.write_json("open_gap.json", {{"seed", seed}, {"certificate", cert}, {"data", data}});
    c.summary({{"command", "open-gap"}, {"trace", trace}, {"period_multiple", multiple}, {"word", word}});
    return kOk;
}

// Shared by thin and cmv-thin: reports over an N-grid from one cover.
template <class Data, class Cover, class Thin>
int thin_grid(const Context& c, const char* name, const Data&, double eps, Cover make_cover, Thin thin) {
    const auto& k = c.section("construction");
    const std::uint64_t seed = c.seed();
    Json error = nullptr;
    std::vector<ConstructionReport<Data>> reports;
    try {
        const auto cover = make_cover(seed, cover_options(k));
        std::vector<long long> grid;
        if (k.contains("n")) {
            for (double n : get_reals(k, "n")) grid.push_back(static_cast<long long>(n));
        } else {
            std::vector<double> mult{1, 2, 3};
            if (k.contains("n_multiples")) mult = get_reals(k, "n_multiples");
            for (double m : mult) grid.push_back(static_cast<long long>(m) * minimal_n(cover.total_multiple()));
        }
        for (long long n : grid) {
            auto r = thin(cover, n);
            if (!(r.report.distance < eps)) throw NumericalAssertion("thin-spectrum data left the epsilon ball");
            reports.push_back(std::move(r.report));
        }
    } catch (const NTooSmall& e) {
        error = {{"error", "NTooSmall"}, {"message", e.what()}, {"minimal_n", e.minimal_n()}};
    } catch (const BudgetExhausted& e) {
        error = {{"error", "BudgetExhausted"}, {"message", e.what()}};
    }

    std::vector<double> periods, measures;
    for (const auto& r : reports) {
        periods.push_back(r.final_period);
        measures.push_back(r.measure);
    }
    const auto slope = fit_log_measure_slope(periods, measures);
    std::ostringstream csv;
    csv << "n,final_period,measure,log_measure\n";
    for (auto& r : reports) {
        r.fitted_slope = slope;
        Json j = to_json(r);
        j["seed"] = seed;
        j["epsilon"] = eps;
        c.write_json(std::string(name) + "_N" + std::to_string(r.n) + ".json", j);
        csv << r.n << ',' << format_double(r.final_period) << ',' << format_double(r.measure) << ','
            << (r.measure > 0 ? format_double(std::log(r.measure)) : std::string()) << '\n';
    }
    c.write_csv(std::string(name) + "_summary.csv", csv.str());
    std::string command = name;
    std::replace(command.begin(), command.end(), '_', '-');
    Json summary = {{"command", command}, {"reports", reports.size()}, {"fitted_slope", slope ? Json(*slope) : Json(nullptr)}};
    if (!reports.empty()) {
        summary["c1"] = reports.front().c1;
        summary["c1_equal_periods"] = reports.front().c1_equal_periods();
        summary["m"] = reports.front().m();
        summary["kappa"] = reports.front().cover.kappa;
    }
    if (!error.is_null()) {
        error["completed_reports"] = reports.size();
        c.write(std::string(name) + "_error.json", error.dump(2) + "\n");
        summary["error"] = error["error"];
        c.summary(summary);
        return kSearchError;
    }
    c.summary(summary);
    return kOk;
}

int cmd_cmv_thin(const Context& c);

int cmd_thin(const Context& c) {
    if (kind(c) == "cmv") return cmd_cmv_thin(c);
    const auto phi = potential(c);
    const double r = window(c);
    const double eps = get_positive(c.section("construction"), "epsilon", 0.3);
    return thin_grid(
        c, "thin", phi, eps,
        [&](std::uint64_t seed, const CoverOptions& o) { return resolvent_cover(phi, r, eps, seed, o); },
        [&](const ResolventCover<PiecewisePotential>& cover, long long n) { return thin_spectrum(phi, cover, r, n); });
}

int cmd_cmv_thin(const Context& c) {
    const auto alpha = cycle(c);
    const double eps = get_positive(c.section("construction"), "epsilon", 0.3);
    return thin_grid(
        c, "cmv_thin", alpha, eps,
        [&](std::uint64_t seed, const CoverOptions& o) { return cmv_resolvent_cover(alpha, eps, seed, o); },
        [&](const ResolventCover<VerblunskyCycle>& cover, long long n) { return cmv_thin_spectrum(alpha, cover, n); });
}

int cmd_dimension(const Context& c) {
    const auto& d = c.section("dimension");
    const double base = get_real(d, "scale_base", 2.0);
    const auto scales = geometric_scales(base, static_cast<int>(get_count(d, "scale_count", 14)));
    Json doc;
    DimensionReport rep;
    if (d.contains("sets")) {
        rep = box_counting(BandSet{intervals_from_json(d["sets"]), 0.0}, scales);
        doc = to_json(rep);
        doc["input"] = "sets";
    } else {
        ScheduleOptions so;
        so.target_exponent = get_positive(d, "target_exponent", so.target_exponent);
        so.n_multiple = get_count(d, "n_multiple", so.n_multiple);
        so.cover = cover_options(c.section("construction"));
        const double eps = get_positive(d, "epsilon", 0.4);
        const int n_max = static_cast<int>(get_count(d, "n_max", 1, 0));
        const auto seed = c.seed();
        Schedule s;
        try {
            s = build_schedule(potential(c), eps, n_max, seed, so);
        } catch (const StageInfeasible& e) {
            const Json err = {{"error", "StageInfeasible"}, {"message", e.what()}};
            c.write("dimension_error.json", err.dump(2) + "\n");
            c.summary({{"command", "dimension"}, {"error", "StageInfeasible"}});
            return kSearchError;
        }
        rep = box_counting(s.stages.back().bands, scales);
        for (const auto& st : s.stages) rep.stage_measures.push_back(st.measure);
        const auto seed_rep = box_counting(bands(s.seed, s.stages.back().window), scales);
        doc = to_json(rep);
        doc["input"] = "schedule";
        doc["seed"] = seed;
        doc["schedule"] = to_json(s);
        doc["seed_stage"] = to_json(seed_rep);
        doc["violations"] = check_schedule(s);
    }
    c.write_json("dimension.json", doc);
    c.write_csv("dimension.csv", rep.csv());
    c.summary({{"command", "dimension"}, {"lower", rep.lower}, {"upper", rep.upper}, {"scales", rep.rows.size()}});
    return kOk;
}

int cmd_gordon(const Context& c) {
    const auto phi = potential(c);
    const auto& g = c.section("gordon");
    const double q = get_positive(g, "q", phi.period());
    const double cc = get_positive(g, "c", 1.0);
    const double logd = log_gordon_defect(phi, q, cc);
    const double d = std::exp(logd);
    std::ostringstream csv;
    csv << "q,c,defect,log_defect\n"
        << format_double(q) << ',' << format_double(cc) << ',' << format_double(d) << ',' << format_double(logd) << '\n';
    c.write_csv("gordon.csv", csv.str());
    c.write_json("gordon.json", {{"q", q},
                                 {"c", cc},
                                 {"defect", std::isfinite(d) ? Json(d) : Json(nullptr)},
                                 {"log_defect", std::isfinite(logd) ? Json(logd) : Json(nullptr)}});
    c.summary({{"command", "gordon"}, {"defect", std::isfinite(d) ? Json(d) : Json(nullptr)}});
    return kOk;
}

const std::set<std::string> kTopKeys = {"operator", "window",       "tolerance", "seed",      "energies",
                                        "energy",   "construction", "dos",       "dimension", "gordon"};

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path);
    Json j;
    try {
        j = Json::parse(f, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!kTopKeys.count(key)) throw ConfigError("unknown config key " + key);
    }
    return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    using Command = std::function<int(const Context&)>;
    const std::vector<std::tuple<std::string, std::string, Command>> commands = {
        {"bands", "spectrum of a periodic Dirac operator in [-R, R]", cmd_bands},
        {"dos", "density of states and band weights", cmd_dos},
        {"lyapunov", "Lyapunov exponents at given energies", cmd_lyapunov},
        {"open-gap", "open a spectral gap at one energy", cmd_open_gap},
        {"thin", "thin-spectrum construction over an N-grid", cmd_thin},
        {"cmv-bands", "spectrum of a periodic CMV matrix", cmd_cmv_bands},
        {"cmv-thin", "CMV thin-spectrum construction over an N-grid", cmd_cmv_thin},
        {"dimension", "box-counting table of a schedule or a given set", cmd_dimension},
        {"gordon", "Gordon defect of the data at one scale", cmd_gordon},
    };

    CLI::App app{"Spectral toolkit for periodic Dirac operators and CMV matrices"};
    app.require_subcommand(1, 1);
    Options opt;
    std::uint64_t seed = 0;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "seed of the randomized searches");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--format", opt.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
        subs[name] = sub;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    for (const auto& [name, help, fn] : commands) {
        auto* sub = subs[name];
        if (!sub->parsed()) continue;
        if (sub->count("--seed") > 0) opt.seed = seed;
        try {
            Context ctx{load_config(opt.config), opt, out};
            return fn(ctx);
        } catch (const ConfigError& e) {
            err << "config error: " << e.what() << "\n";
            return kConfigError;
        } catch (const Json::exception& e) {
            err << "config error: " << e.what() << "\n";
            return kConfigError;
        } catch (const BudgetExhausted& e) {
            err << "search failed: " << e.what() << "\n";
            return kSearchError;
        } catch (const NTooSmall& e) {
            err << "infeasible: " << e.what() << "\n";
            return kSearchError;
        } catch (const StageInfeasible& e) {
            err << "infeasible: " << e.what() << "\n";
            return kSearchError;
        } catch (const NumericalAssertion& e) {
            err << "numerical assertion: " << e.what() << "\n";
            return kNumericalError;
        } catch (const NotInGroup& e) {
            err << "numerical assertion: " << e.what() << "\n";
            return kNumericalError;
        } catch (const NotInBandInterior& e) {
            err << "numerical assertion: " << e.what() << "\n";
            return kNumericalError;
        } catch (const Error& e) {
            err << "invalid input: " << e.what() << "\n";
            return kConfigError;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kNumericalError;
        }
    }
    return kConfigError;
}

}  // namespace thinspec::cli
