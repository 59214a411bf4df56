#pragma once

#include "ftm/diagnostics.hpp"
#include "ftm/dynamics.hpp"
#include "ftm/path.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ftm {

/// Deterministic single-line JSON emitter. Doubles carry 17 significant
/// digits so that parse(serialize(x)) reproduces x exactly.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& raw(std::string_view text);

  const std::string& str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> needs_comma_;
  bool pending_key_ = false;
};

std::string format_double(double v);  // 17 significant digits, locale-free
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::string_view bytes);

struct ProblemOptions {
  int nodes = 512;
  double tol = 1e-8;
  int max_iters = 5000;
  int restarts = 4;
  std::uint64_t seed = 0;
};

struct ProblemFile {
  int dim = 0;
  std::vector<double> masses;
  std::map<std::string, Configuration> configurations;
  ProblemOptions options;

  MassSystem system() const { return MassSystem(masses, dim); }
  const Configuration& configuration(const std::string& name) const;
};

/// Parses a problem document. Unknown keys, malformed values, and
/// non-finite coordinates are rejected with a ParseError naming the field.
ProblemFile parse_problem(const std::string& text);
std::string serialize_problem(const ProblemFile& problem);

struct PathDocument {
  int dim = 0;
  std::vector<double> masses;
  DiscretePath path;

  MassSystem system() const { return MassSystem(masses, dim); }
};

std::string serialize_path(const MassSystem& sys, const DiscretePath& path);
PathDocument parse_path(const std::string& text);

struct TrajectoryDocument {
  int dim = 0;
  std::vector<double> masses;
  Trajectory trajectory;

  MassSystem system() const { return MassSystem(masses, dim); }
};

std::string serialize_trajectory(const MassSystem& sys, const Trajectory& traj);
TrajectoryDocument parse_trajectory(const std::string& text);

std::string serialize_series(const DiagnosticsSeries& series);
DiagnosticsSeries parse_series(const std::string& text);
std::string serialize_series_csv(const DiagnosticsSeries& series);

// writer helpers used by the CLI to embed documents in run reports
void write_path_fields(JsonWriter& w, const MassSystem& sys,
                       const DiscretePath& path);
void write_trajectory_fields(JsonWriter& w, const MassSystem& sys,
                             const Trajectory& traj);
void write_series_fields(JsonWriter& w, const DiagnosticsSeries& series);
void write_configuration(JsonWriter& w, const Configuration& c);

}  // namespace ftm
