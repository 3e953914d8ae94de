#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "govgame/equilibria.hpp"
#include "govgame/finite.hpp"
#include "govgame/integrate.hpp"
#include "govgame/llm.hpp"

namespace govgame::io {

// Shortest decimal string that round-trips the double (to_chars).
std::string format_number(double value);

std::string iso8601_utc_now();

// Writes content to a sibling temp file, then renames over path. Either the
// old file or the complete new one exists at every instant.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

std::string read_file(const std::filesystem::path& path);

// All CSV output is UTF-8 with LF line endings and a header row.

std::string trajectory_csv(const Trajectory& trajectory);

std::string vertex_report_csv(const std::vector<VertexReport>& reports);

std::string census_csv(const EquilibriumCensus& census);

// Rows sorted by probability descending; states rendered as action labels.
std::string stationary_csv(const MonomorphicChain& chain,
                           const std::vector<double>& distribution);

std::string transition_matrix_csv(const MonomorphicChain& chain);

std::string simulation_csv(const SimulationResult& result);

std::string occupancy_csv(const SimulationResult& result);

std::string llm_aggregate_csv(const std::array<RoleAggregate, 4>& rows);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string started;   // ISO 8601 UTC
  std::string finished;  // ISO 8601 UTC
  std::vector<std::string> outputs;
  std::string engine_version;
};

std::string manifest_json(const RunManifest& manifest);

}  // namespace govgame::io
