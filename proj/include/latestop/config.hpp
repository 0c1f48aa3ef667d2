#pragma once

// JSON forms of configuration and report types. Config objects are flat;
// unknown keys are rejected.

#include <string>

#include "json.hpp"
#include "latestop/data.hpp"
#include "latestop/late_stopping.hpp"
#include "latestop/noise.hpp"

namespace latestop {

using Json = nlohmann::json;

LateStopConfig config_from_json(const Json& j);
Json config_to_json(const LateStopConfig& c);
// FNV-1a over the canonical (sorted-key, compact) serialization.
std::string config_hash(const LateStopConfig& c);

struct GenSpec {
  SyntheticSpec synthetic;
  // Fraction split off, with clean labels, as test.csv.
  double test_fraction = 0.0;
};

GenSpec gen_spec_from_json(const Json& j);
Json gen_spec_to_json(const GenSpec& g);

Json noise_report_to_json(const NoiseReport& r);
NoiseReport noise_report_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace latestop
