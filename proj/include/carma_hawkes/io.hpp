#pragma once

// File formats:
//   model spec   JSON {"type":"univariate","mu":..,"a":[..],"b":[..]} or
//                JSON {"type":"bivariate","mu":[..,..],"a1":[..],"a2":[..],
//                      "b11":[..],"b12":[..],"b21":[..],"b22":[..]}
//   events       CSV with header "time,mark", times at 15 significant digits
//   run metadata JSON sidecar {seed, horizon, proposed, accepted,
//                acceptance_ratio, wall_time_seconds, spec_hash, components}
//   diagnostics  JSON {"spec_hash":..,"components":[{component, n_events,
//                empirical_rate, theoretical_rate, ks_statistic, ks_p_value,
//                acceptance_ratio, ...}]}
//   residuals    CSV with the single column "tau"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "carma_hawkes/diagnostics.hpp"
#include "carma_hawkes/model.hpp"
#include "carma_hawkes/thinning.hpp"

namespace carma_hawkes {

// Throws FormatError for schema problems and InvalidSpec for bad values.
ModelSpec parse_model_spec(const nlohmann::json& doc);
ModelSpec load_model_spec(const std::filesystem::path& path);
nlohmann::json to_json(const ModelSpec& spec);

std::string hash_to_hex(std::uint64_t hash);
std::uint64_t hex_to_hash(const std::string& hex);

void write_events_csv(std::ostream& out, const EventLog& log);
// Fills times and marks; metadata is left default. Throws FormatError.
EventLog read_events_csv(std::istream& in);

nlohmann::json to_json(const RunMetadata& meta);
RunMetadata metadata_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const DiagnosticsReport& report);

void write_residuals_csv(std::ostream& out, const ResidualSeries& residuals);
// Sorted residuals next to the matching Exp(1) quantiles -log(1 - (i - 1/2)/n).
void write_qq_csv(std::ostream& out, const ResidualSeries& residuals);
// time,lambda[,lambda_2],lambda_bar
void write_trace_csv(std::ostream& out, const std::vector<IntensitySample>& samples, int components);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace carma_hawkes
