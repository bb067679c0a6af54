#include "navflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "navflow/errors.hpp"

namespace navflow {

namespace {

using nlohmann::json;

std::string real(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_real(double v) {
  if (!std::isfinite(v)) return "null";
  return real(v);
}

std::string vector_text(const Vector& v) {
  std::string s = "[";
  for (int j = 0; j < v.size(); ++j) {
    if (j) s += ", ";
    s += json_real(v[j]);
  }
  return s + "]";
}

std::string matrix_text(const Matrix& m, const std::string& indent) {
  std::string s = "[";
  for (int i = 0; i < m.rows(); ++i) {
    s += i ? ",\n" + indent + " " : "";
    s += vector_text(m.row(i).transpose());
  }
  return s + "]";
}

[[noreturn]] void shape_error(const std::string& source, const std::string& path, const std::string& what) {
  throw ValidationError(source + ": " + path + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& source, const std::string& path) {
  if (!obj.is_object()) shape_error(source, path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) shape_error(source, path, std::string("missing field '") + key + "'");
  return *it;
}

double read_real(const json& j, const std::string& source, const std::string& path) {
  if (!j.is_number()) shape_error(source, path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) shape_error(source, path, "expected a finite number");
  return v;
}

Vector read_vector(const json& j, int n, const std::string& source, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    shape_error(source, path, "expected an array of " + std::to_string(n) + " numbers");
  }
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = read_real(j[i], source, path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix read_matrix(const json& j, int n, const std::string& source, const std::string& path) {
  if (!j.is_array()) shape_error(source, path, "expected a matrix");
  Matrix m(n, n);
  if (static_cast<int>(j.size()) == n * n && (j.empty() || j[0].is_number())) {
    for (int i = 0; i < n * n; ++i) m(i / n, i % n) = read_real(j[i], source, path + "[" + std::to_string(i) + "]");
    return m;
  }
  if (static_cast<int>(j.size()) != n) shape_error(source, path, "expected " + std::to_string(n) + " rows");
  for (int i = 0; i < n; ++i) {
    m.row(i) = read_vector(j[i], n, source, path + "[" + std::to_string(i) + "]").transpose();
  }
  return m;
}

// Wraps constructor errors with the JSON path of the offending entry.
template <class F>
auto at_path(const std::string& source, const std::string& path, F&& make) {
  try {
    return make();
  } catch (const std::invalid_argument& e) {
    shape_error(source, path, e.what());
  }
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s;
}

}  // namespace

std::string serialize_world(const World& w) {
  const int n = w.dimension();
  std::ostringstream out;
  out << "{\n  \"dimension\": " << n << ",\n";
  out << "  \"potential\": {\n    \"Q\": " << matrix_text(w.potential().q().matrix(), "         ") << ",\n";
  out << "    \"target\": " << vector_text(w.target()) << "\n  },\n";
  const Workspace& ws = w.workspace();
  out << "  \"workspace\": {\n    \"A0\": " << matrix_text(ws.a0().matrix(), "          ") << ",\n";
  out << "    \"center\": " << vector_text(ws.center()) << ",\n";
  out << "    \"r0\": " << json_real(ws.r0()) << "\n  },\n";
  out << "  \"obstacles\": [";
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    const Ellipsoid& o = w.obstacles()[i];
    out << (i ? ",\n" : "\n");
    out << "    {\n      \"A\": " << matrix_text(o.a().matrix(), "           ") << ",\n";
    out << "      \"center\": " << vector_text(o.center()) << ",\n";
    out << "      \"radius\": " << json_real(o.radius()) << "\n    }";
  }
  out << (w.obstacle_count() ? "\n  ]\n" : "]\n") << "}\n";
  return out.str();
}

World parse_world(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": malformed JSON (" + e.what() + ")");
  }
  const json& dim = field(doc, "dimension", source, "$");
  if (!dim.is_number_integer() || dim.get<long long>() < 2) {
    shape_error(source, "$.dimension", "expected an integer >= 2");
  }
  const int n = dim.get<int>();

  const json& pot = field(doc, "potential", source, "$");
  const Matrix q = read_matrix(field(pot, "Q", source, "$.potential"), n, source, "$.potential.Q");
  const Vector target = read_vector(field(pot, "target", source, "$.potential"), n, source, "$.potential.target");
  QuadraticPotential potential = at_path(source, "$.potential", [&] { return QuadraticPotential(SpdMatrix(q), target); });

  const json& wsj = field(doc, "workspace", source, "$");
  const Matrix a0 = read_matrix(field(wsj, "A0", source, "$.workspace"), n, source, "$.workspace.A0");
  const Vector c0 = read_vector(field(wsj, "center", source, "$.workspace"), n, source, "$.workspace.center");
  const double r0 = read_real(field(wsj, "r0", source, "$.workspace"), source, "$.workspace.r0");
  Workspace ws = at_path(source, "$.workspace", [&] { return Workspace(SpdMatrix(a0), c0, r0); });

  const json& obs = field(doc, "obstacles", source, "$");
  if (!obs.is_array()) shape_error(source, "$.obstacles", "expected an array");
  std::vector<Ellipsoid> obstacles;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string path = "$.obstacles[" + std::to_string(i) + "]";
    const Matrix a = read_matrix(field(obs[i], "A", source, path), n, source, path + ".A");
    const Vector c = read_vector(field(obs[i], "center", source, path), n, source, path + ".center");
    const double r = read_real(field(obs[i], "radius", source, path), source, path + ".radius");
    obstacles.push_back(at_path(source, path, [&] { return Ellipsoid(SpdMatrix(a), c, r); }));
  }
  return at_path(source, "$", [&] { return World(std::move(ws), std::move(obstacles), std::move(potential)); });
}

World load_world(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open world file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_world(buf.str(), path.string());
}

void save_world(const std::filesystem::path& path, const World& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << serialize_world(w);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  if (traj.states.empty()) return;
  const int n = static_cast<int>(traj.states.front().size());
  std::vector<std::string> header{"step"};
  for (int j = 0; j < n; ++j) header.push_back("x_" + std::to_string(j));
  header.insert(header.end(), {"V", "phi_k", "grad_norm"});
  out << csv_row(header) << '\n';
  const bool diag = traj.diagnostics.size() == traj.states.size();
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    std::vector<std::string> row{std::to_string(s)};
    for (int j = 0; j < n; ++j) row.push_back(real(traj.states[s][j]));
    if (diag) {
      const StepDiagnostics& d = traj.diagnostics[s];
      row.insert(row.end(), {real(d.lyapunov), real(d.phi), real(d.field_norm)});
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    out << csv_row(row) << '\n';
  }
}

std::string status_json(const Trajectory& traj, const RunMetadata& meta) {
  auto vec = [](const Vector& v) {
    json a = json::array();
    for (int j = 0; j < v.size(); ++j) a.push_back(v[j]);
    return a;
  };
  const SimConfig& c = meta.config;
  json j;
  j["status"] = to_string(traj.status);
  j["steps"] = traj.steps;
  j["states"] = traj.states.size();
  j["min_beta_seen"] = traj.min_beta_seen;
  j["start"] = vec(meta.start);
  if (!traj.states.empty()) j["final_state"] = vec(traj.states.back());
  j["world"] = meta.world_source;
  j["config"] = {{"flow", to_string(c.flow)},
                 {"k", c.k},
                 {"eta", c.eta},
                 {"epsilon_norm", c.epsilon_norm},
                 {"max_steps", c.max_steps},
                 {"seed", c.seed}};
  if (c.sensor_range_c) j["config"]["sensor_range_c"] = *c.sensor_range_c;
  if (!traj.discovery_log.empty()) j["discoveries"] = traj.discovery_log.size();
  return j.dump(2) + "\n";
}

void write_discovery_csv(std::ostream& out, const Trajectory& traj) {
  out << "step,obstacle_index\n";
  for (const auto& d : traj.discovery_log) out << d.step << ',' << d.obstacle << '\n';
}

TrajectoryTable read_trajectory_csv(std::istream& in) {
  TrajectoryTable table;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trajectory CSV: empty input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  int n = 0;
  while (n + 1 < static_cast<int>(table.header.size()) && table.header[n + 1] == "x_" + std::to_string(n)) ++n;
  if (n == 0) throw ValidationError("trajectory CSV: no state columns in header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    Vector x(n);
    for (int j = 0; j < n; ++j) {
      if (!std::getline(ss, cell, ',')) {
        throw ValidationError("trajectory CSV:" + std::to_string(lineno) + ": missing state column");
      }
      try {
        x[j] = std::stod(cell);
      } catch (const std::exception&) {
        throw ValidationError("trajectory CSV:" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    table.states.push_back(std::move(x));
  }
  return table;
}

}  // namespace navflow
