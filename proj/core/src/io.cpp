#include "govgame/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include <nlohmann/json.hpp>

namespace govgame::io {

namespace {

std::string profile_label(const ActionProfile& profile) {
  std::string out;
  for (std::size_t i = 0; i < kAllRoles.size(); ++i) {
    if (i > 0) out += '/';
    out += action_label(kAllRoles[i], profile.get(kAllRoles[i]));
  }
  return out;
}

}  // namespace

std::string format_number(double value) {
  value += 0.0;  // normalize -0
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string iso8601_utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path temp = path;
  temp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + temp.string() +
                               "' for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(temp, ec);
      throw std::runtime_error("failed writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw std::runtime_error("failed to move temp file over '" +
                             path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,x,y,z,w\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const PopulationState& s = trajectory.states[i];
    out += format_number(trajectory.times[i]) + "," + format_number(s.x) +
           "," + format_number(s.y) + "," + format_number(s.z) + "," +
           format_number(s.w) + "\n";
  }
  return out;
}

std::string vertex_report_csv(const std::vector<VertexReport>& reports) {
  std::string out =
      "x,y,z,w,lambda_x,lambda_y,lambda_z,lambda_w,classification\n";
  for (const VertexReport& r : reports) {
    out += format_number(r.vertex.x) + "," + format_number(r.vertex.y) + "," +
           format_number(r.vertex.z) + "," + format_number(r.vertex.w);
    for (double lambda : r.eigenvalues) {
      out += "," + format_number(lambda);
    }
    out += ",";
    out += to_string(r.classification);
    out += "\n";
  }
  return out;
}

std::string census_csv(const EquilibriumCensus& census) {
  std::string out = "n_interior,count,frequency\n";
  for (const auto& [n_interior, count] : census.histogram) {
    const double freq =
        census.n_samples > 0
            ? static_cast<double>(count) /
                  static_cast<double>(census.n_samples)
            : 0.0;
    out += std::to_string(n_interior) + "," + std::to_string(count) + "," +
           format_number(freq) + "\n";
  }
  return out;
}

std::string stationary_csv(const MonomorphicChain& chain,
                           const std::vector<double>& distribution) {
  if (distribution.size() != chain.states.size()) {
    throw std::invalid_argument(
        "distribution length does not match chain states");
  }
  std::vector<std::size_t> order(chain.states.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return distribution[a] > distribution[b];
                   });
  std::string out = "commentariat,user,developer,regulator,probability\n";
  for (std::size_t i : order) {
    const ActionProfile& p = chain.states[i];
    for (std::size_t r = 0; r < kAllRoles.size(); ++r) {
      if (r > 0) out += ',';
      out += action_label(kAllRoles[r], p.get(kAllRoles[r]));
    }
    out += ",";
    out += format_number(distribution[i]);
    out += "\n";
  }
  return out;
}

std::string transition_matrix_csv(const MonomorphicChain& chain) {
  std::string out = "from";
  for (const ActionProfile& p : chain.states) {
    out += "," + profile_label(p);
  }
  out += "\n";
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    out += profile_label(chain.states[i]);
    for (std::size_t j = 0; j < chain.states.size(); ++j) {
      out += "," + format_number(chain.transition(
                       static_cast<Eigen::Index>(i),
                       static_cast<Eigen::Index>(j)));
    }
    out += "\n";
  }
  return out;
}

std::string simulation_csv(const SimulationResult& result) {
  std::string out = "step,x,y,z,w\n";
  for (std::size_t i = 0; i < result.steps.size(); ++i) {
    const PopulationState& s = result.frequencies[i];
    out += std::to_string(result.steps[i]) + "," + format_number(s.x) + "," +
           format_number(s.y) + "," + format_number(s.z) + "," +
           format_number(s.w) + "\n";
  }
  return out;
}

std::string occupancy_csv(const SimulationResult& result) {
  std::string out = "commentariat,user,developer,regulator,occupancy\n";
  for (int idx = 0; idx < 16; ++idx) {
    const ActionProfile p = ActionProfile::from_index(idx);
    for (std::size_t r = 0; r < kAllRoles.size(); ++r) {
      if (r > 0) out += ',';
      out += action_label(kAllRoles[r], p.get(kAllRoles[r]));
    }
    out += ",";
    out += format_number(
        result.monomorphic_occupancy[static_cast<std::size_t>(idx)]);
    out += "\n";
  }
  return out;
}

std::string llm_aggregate_csv(const std::array<RoleAggregate, 4>& rows) {
  std::string out = "role,coop_frequency,n_parsed,n_missing\n";
  for (const RoleAggregate& row : rows) {
    out += row.role + "," + format_number(row.coop_frequency) + "," +
           std::to_string(row.n_parsed) + "," + std::to_string(row.n_missing) +
           "\n";
  }
  return out;
}

std::string manifest_json(const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  j["config_path"] = manifest.config_path;
  j["seed"] = manifest.seed;
  j["started"] = manifest.started;
  j["finished"] = manifest.finished;
  j["outputs"] = manifest.outputs;
  j["engine_version"] = manifest.engine_version;
  return j.dump(2) + "\n";
}

}  // namespace govgame::io
