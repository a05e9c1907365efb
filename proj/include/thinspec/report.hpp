#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "thinspec/analysis.hpp"
#include "thinspec/cmv.hpp"
#include "thinspec/construct.hpp"
#include "thinspec/dirac.hpp"

namespace thinspec {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Segments as [length, re, im] triples.
Json to_json(const PiecewisePotential& phi);
/// Values as [re, im] pairs.
Json to_json(const VerblunskyCycle& alpha);
/// Intervals as [a, b] pairs.
Json to_json(const std::vector<Interval>& intervals);

/// Inverses of the two data encodings. Throw ConfigError on malformed input.
PiecewisePotential potential_from_json(const Json& j);
VerblunskyCycle cycle_from_json(const Json& j);
std::vector<Interval> intervals_from_json(const Json& j);

Json to_json(const GapCertificate<PiecewisePotential>& c);
Json to_json(const GapCertificate<VerblunskyCycle>& c);
Json to_json(const ResolventCover<PiecewisePotential>& c);
Json to_json(const ResolventCover<VerblunskyCycle>& c);
Json to_json(const ConstructionReport<PiecewisePotential>& r);
Json to_json(const ConstructionReport<VerblunskyCycle>& r);
Json to_json(const DimensionReport& r);
Json to_json(const Schedule& s);

}  // namespace thinspec
