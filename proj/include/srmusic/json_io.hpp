#ifndef SRMUSIC_JSON_IO_HPP
#define SRMUSIC_JSON_IO_HPP

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "srmusic/bounds.hpp"
#include "srmusic/harness.hpp"
#include "srmusic/noise.hpp"
#include "srmusic/torus.hpp"

namespace srmusic
{

using json = nlohmann::json;

// ClumpSpec: {num_clumps, clump_sizes, alpha, beta, M, anchors (nullable), jitter (default 0)}
void to_json(json& j, const ClumpSpec& spec);
void from_json(const json& j, ClumpSpec& spec);

void to_json(json& j, const AmplitudeModel& model);
void from_json(const json& j, AmplitudeModel& model);

// ExperimentConfig carries "schema": 1; other schema values are rejected.
void to_json(json& j, const ExperimentConfig& config);
void from_json(const json& j, ExperimentConfig& config);

void to_json(json& j, const ConcentrationReport& report);
void to_json(json& j, const ScalingFit& fit);
void to_json(json& j, const PhaseTransitionSummary& summary);

json support_to_json(const SupportSet& omega);
/// Accepts {"support": [...]}, {"points": [...]} or a bare array.
SupportSet support_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Run manifest: tool version, subcommand, seed, options and resolved config.
json make_manifest(std::string_view subcommand, const json& options, const json& config, std::uint64_t seed);

/// A config document or a manifest wrapping one under "config".
ExperimentConfig config_from_document(const json& doc);

/// Per-kind campaign summary written beside the record CSV.
json summarize_campaign(const ExperimentConfig& config, std::span<const ExperimentRecord> records);

} // namespace srmusic

#endif // SRMUSIC_JSON_IO_HPP
