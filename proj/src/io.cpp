#include "ftm/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>

namespace ftm {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JsonWriter
// ---------------------------------------------------------------------------

void JsonWriter::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!needs_comma_.empty()) {
    if (needs_comma_.back()) out_ += ',';
    needs_comma_.back() = true;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  needs_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  needs_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += '[';
  needs_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  needs_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  separator();
  out_ += '"';
  out_ += k;
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
  separator();
  out_ += '"';
  for (char c : v) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      default: out_ += c;
    }
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::raw(std::string_view text) {
  separator();
  out_ += text;
  return *this;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::string_view bytes) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out = "fnv1a:";
  for (int shift = 60; shift >= 0; shift -= 4)
    out += hex[(h >> shift) & 0xF];
  return out;
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line/column for the diagnostic
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 <= upto && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("malformed JSON at line " + std::to_string(line) +
                     ", column " + std::to_string(col) + ": " + e.what());
  }
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok)
      throw ParseError(where + ": unknown key \"" + item.key() + "\"");
  }
}

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number())
    throw ParseError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d))
    throw ParseError(where + ": non-finite value");
  return d;
}

Configuration parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw ParseError(where + ": expected a non-empty array of rows");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  Configuration c;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.empty())
      throw ParseError(where + ": row " + std::to_string(i) +
                       " is not a non-empty array");
    if (i == 0) {
      cols = row.size();
      c.resize(static_cast<long>(rows), static_cast<long>(cols));
    } else if (row.size() != cols) {
      throw ParseError(where + ": ragged rows");
    }
    for (std::size_t j = 0; j < cols; ++j)
      c(static_cast<long>(i), static_cast<long>(j)) = finite_number(
          row[j], where + "[" + std::to_string(i) + "][" + std::to_string(j) +
                      "]");
  }
  return c;
}

std::vector<double> parse_masses(const json& obj, const std::string& where) {
  if (!obj.contains("masses"))
    throw ParseError(where + ": missing required field \"masses\"");
  const json& m = obj["masses"];
  if (!m.is_array() || m.size() < 2)
    throw ParseError(where + ".masses: expected an array of >= 2 masses");
  std::vector<double> masses;
  masses.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = finite_number(m[i], where + ".masses[" + std::to_string(i) + "]");
    if (!(v > 0.0))
      throw ParseError(where + ".masses[" + std::to_string(i) +
                       "]: masses must be positive");
    masses.push_back(v);
  }
  return masses;
}

int parse_dim(const json& obj, const std::string& where) {
  if (!obj.contains("dim"))
    throw ParseError(where + ": missing required field \"dim\"");
  const json& d = obj["dim"];
  if (!d.is_number_integer() || d.get<int>() < 1)
    throw ParseError(where + ".dim: expected an integer >= 1");
  return d.get<int>();
}

Eigen::VectorXd parse_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw ParseError(where + ": expected a non-empty array");
  Eigen::VectorXd out(static_cast<long>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<long>(i)) =
        finite_number(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

void write_vector(JsonWriter& w, const Eigen::VectorXd& v) {
  w.begin_array();
  for (long i = 0; i < v.size(); ++i) w.value(v(i));
  w.end_array();
}

void write_system_fields(JsonWriter& w, const MassSystem& sys) {
  w.key("dim").value(sys.dim());
  w.key("masses").begin_array();
  for (int i = 0; i < sys.body_count(); ++i) w.value(sys.mass(i));
  w.end_array();
}

}  // namespace

void write_configuration(JsonWriter& w, const Configuration& c) {
  w.begin_array();
  for (long i = 0; i < c.rows(); ++i) {
    w.begin_array();
    for (long j = 0; j < c.cols(); ++j) w.value(c(i, j));
    w.end_array();
  }
  w.end_array();
}

// ---------------------------------------------------------------------------
// Problem files
// ---------------------------------------------------------------------------

const Configuration& ProblemFile::configuration(const std::string& name) const {
  auto it = configurations.find(name);
  if (it == configurations.end())
    throw ParseError("problem file has no configuration named \"" + name +
                     "\"");
  return it->second;
}

ProblemFile parse_problem(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("problem: expected a JSON object");
  expect_keys(doc, "problem", {"dim", "masses", "configurations", "options"});

  ProblemFile p;
  p.dim = parse_dim(doc, "problem");
  p.masses = parse_masses(doc, "problem");

  if (doc.contains("configurations")) {
    const json& configs = doc["configurations"];
    if (!configs.is_object())
      throw ParseError("problem.configurations: expected an object");
    for (const auto& item : configs.items()) {
      Configuration c =
          parse_matrix(item.value(), "problem.configurations." + item.key());
      if (c.rows() != static_cast<long>(p.masses.size()) ||
          c.cols() != p.dim)
        throw ParseError("problem.configurations." + item.key() +
                         ": expected " + std::to_string(p.masses.size()) +
                         "x" + std::to_string(p.dim));
      p.configurations.emplace(item.key(), std::move(c));
    }
  }

  if (doc.contains("options")) {
    const json& opts = doc["options"];
    if (!opts.is_object())
      throw ParseError("problem.options: expected an object");
    expect_keys(opts, "problem.options",
                {"nodes", "tol", "max_iters", "restarts", "seed"});
    if (opts.contains("nodes")) p.options.nodes = opts["nodes"].get<int>();
    if (opts.contains("tol"))
      p.options.tol = finite_number(opts["tol"], "problem.options.tol");
    if (opts.contains("max_iters"))
      p.options.max_iters = opts["max_iters"].get<int>();
    if (opts.contains("restarts"))
      p.options.restarts = opts["restarts"].get<int>();
    if (opts.contains("seed"))
      p.options.seed = opts["seed"].get<std::uint64_t>();
  }
  return p;
}

std::string serialize_problem(const ProblemFile& p) {
  JsonWriter w;
  w.begin_object();
  w.key("dim").value(p.dim);
  w.key("masses").begin_array();
  for (double m : p.masses) w.value(m);
  w.end_array();
  w.key("configurations").begin_object();
  for (const auto& [name, config] : p.configurations) {
    w.key(name);
    write_configuration(w, config);
  }
  w.end_object();
  w.key("options").begin_object();
  w.key("nodes").value(p.options.nodes);
  w.key("tol").value(p.options.tol);
  w.key("max_iters").value(p.options.max_iters);
  w.key("restarts").value(p.options.restarts);
  w.key("seed").value(p.options.seed);
  w.end_object();
  w.end_object();
  return w.str() + "\n";
}

// ---------------------------------------------------------------------------
// Path documents
// ---------------------------------------------------------------------------

void write_path_fields(JsonWriter& w, const MassSystem& sys,
                       const DiscretePath& path) {
  write_system_fields(w, sys);
  w.key("times");
  write_vector(w, path.times);
  w.key("nodes").begin_array();
  for (const Configuration& node : path.nodes) write_configuration(w, node);
  w.end_array();
}

std::string serialize_path(const MassSystem& sys, const DiscretePath& path) {
  JsonWriter w;
  w.begin_object();
  w.key("kind").value("path");
  write_path_fields(w, sys, path);
  w.end_object();
  return w.str() + "\n";
}

PathDocument parse_path(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("path: expected a JSON object");
  expect_keys(doc, "path", {"kind", "dim", "masses", "times", "nodes"});
  if (!doc.contains("kind") || doc["kind"] != "path")
    throw ParseError("path: missing kind == \"path\"");

  PathDocument d;
  d.dim = parse_dim(doc, "path");
  d.masses = parse_masses(doc, "path");
  if (!doc.contains("times") || !doc.contains("nodes"))
    throw ParseError("path: missing \"times\" or \"nodes\"");
  d.path.times = parse_vector(doc["times"], "path.times");
  const json& nodes = doc["nodes"];
  if (!nodes.is_array())
    throw ParseError("path.nodes: expected an array");
  for (std::size_t k = 0; k < nodes.size(); ++k)
    d.path.nodes.push_back(
        parse_matrix(nodes[k], "path.nodes[" + std::to_string(k) + "]"));
  try {
    d.path.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("path: ") + e.what());
  }
  return d;
}

// ---------------------------------------------------------------------------
// Trajectory documents
// ---------------------------------------------------------------------------

void write_trajectory_fields(JsonWriter& w, const MassSystem& sys,
                             const Trajectory& traj) {
  write_system_fields(w, sys);
  w.key("times");
  write_vector(w, traj.times);
  w.key("positions").begin_array();
  for (const Configuration& x : traj.positions) write_configuration(w, x);
  w.end_array();
  w.key("velocities").begin_array();
  for (const Configuration& v : traj.velocities) write_configuration(w, v);
  w.end_array();
  w.key("energy0").value(traj.energy0);
  w.key("max_energy_drift").value(traj.max_energy_drift);
  w.key("min_separation").value(traj.min_separation);
  w.key("termination")
      .value(traj.termination == Termination::completed ? "completed"
                                                        : "collision_approach");
}

std::string serialize_trajectory(const MassSystem& sys,
                                 const Trajectory& traj) {
  JsonWriter w;
  w.begin_object();
  w.key("kind").value("trajectory");
  write_trajectory_fields(w, sys, traj);
  w.end_object();
  return w.str() + "\n";
}

TrajectoryDocument parse_trajectory(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("trajectory: expected a JSON object");
  expect_keys(doc, "trajectory",
              {"kind", "dim", "masses", "times", "positions", "velocities",
               "energy0", "max_energy_drift", "min_separation", "termination"});
  if (!doc.contains("kind") || doc["kind"] != "trajectory")
    throw ParseError("trajectory: missing kind == \"trajectory\"");

  TrajectoryDocument d;
  d.dim = parse_dim(doc, "trajectory");
  d.masses = parse_masses(doc, "trajectory");
  d.trajectory.times = parse_vector(doc["times"], "trajectory.times");
  for (std::size_t k = 0; k < doc["positions"].size(); ++k)
    d.trajectory.positions.push_back(parse_matrix(
        doc["positions"][k], "trajectory.positions[" + std::to_string(k) + "]"));
  for (std::size_t k = 0; k < doc["velocities"].size(); ++k)
    d.trajectory.velocities.push_back(
        parse_matrix(doc["velocities"][k],
                     "trajectory.velocities[" + std::to_string(k) + "]"));
  d.trajectory.energy0 =
      finite_number(doc["energy0"], "trajectory.energy0");
  d.trajectory.max_energy_drift =
      finite_number(doc["max_energy_drift"], "trajectory.max_energy_drift");
  d.trajectory.min_separation =
      finite_number(doc["min_separation"], "trajectory.min_separation");
  const std::string term = doc["termination"].get<std::string>();
  if (term == "completed")
    d.trajectory.termination = Termination::completed;
  else if (term == "collision_approach")
    d.trajectory.termination = Termination::collision_approach;
  else
    throw ParseError("trajectory.termination: unknown value \"" + term + "\"");
  return d;
}

// ---------------------------------------------------------------------------
// Diagnostic series
// ---------------------------------------------------------------------------

namespace {

struct SeriesColumn {
  const char* name;
  const char* unit;
  Eigen::VectorXd DiagnosticsSeries::*member;
};

constexpr SeriesColumn kSeriesColumns[] = {
    {"t", "tu", &DiagnosticsSeries::times},
    {"I", "mu*lu^2", &DiagnosticsSeries::I_series},
    {"U", "mu^2/lu", &DiagnosticsSeries::U_series},
    {"T", "mu*lu^2/tu^2", &DiagnosticsSeries::T_series},
    {"g", "mu^(3/4)*lu^(3/2)/tu", &DiagnosticsSeries::g_series},
    {"h", "mu*lu^2/tu^2", &DiagnosticsSeries::h_series},
    {"com", "lu", &DiagnosticsSeries::com_series},
};

}  // namespace

void write_series_fields(JsonWriter& w, const DiagnosticsSeries& series) {
  w.key("units").begin_object();
  for (const SeriesColumn& col : kSeriesColumns)
    w.key(col.name).value(col.unit);
  w.end_object();
  for (const SeriesColumn& col : kSeriesColumns) {
    w.key(col.name);
    write_vector(w, series.*col.member);
  }
}

std::string serialize_series(const DiagnosticsSeries& series) {
  JsonWriter w;
  w.begin_object();
  w.key("kind").value("series");
  write_series_fields(w, series);
  w.end_object();
  return w.str() + "\n";
}

DiagnosticsSeries parse_series(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("series: expected a JSON object");
  expect_keys(doc, "series",
              {"kind", "units", "t", "I", "U", "T", "g", "h", "com"});
  if (!doc.contains("kind") || doc["kind"] != "series")
    throw ParseError("series: missing kind == \"series\"");
  DiagnosticsSeries s;
  for (const SeriesColumn& col : kSeriesColumns) {
    if (!doc.contains(col.name))
      throw ParseError(std::string("series: missing column \"") + col.name +
                       "\"");
    s.*col.member = parse_vector(doc[col.name], std::string("series.") + col.name);
  }
  return s;
}

std::string serialize_series_csv(const DiagnosticsSeries& series) {
  std::string out;
  bool first = true;
  for (const SeriesColumn& col : kSeriesColumns) {
    if (!first) out += ',';
    first = false;
    out += col.name;
    out += '[';
    out += col.unit;
    out += ']';
  }
  out += '\n';
  for (long k = 0; k < series.times.size(); ++k) {
    first = true;
    for (const SeriesColumn& col : kSeriesColumns) {
      if (!first) out += ',';
      first = false;
      out += format_double((series.*col.member)(k));
    }
    out += '\n';
  }
  return out;
}

}  // namespace ftm
