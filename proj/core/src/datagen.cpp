#include "ccembed/datagen.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ccembed/digest.hpp"
#include "ccembed/errors.hpp"

namespace ccembed {
namespace {

using json = nlohmann::json;

void append_vector(std::string& out, const double* data, Eigen::Index size) {
  out += '[';
  for (Eigen::Index k = 0; k < size; ++k) {
    if (k) out += ',';
    out += format_double(data[k]);
  }
  out += ']';
}

void append_rows(std::string& out, const StepMatrix& rows) {
  out += '[';
  for (Eigen::Index t = 0; t < rows.rows(); ++t) {
    if (t) out += ',';
    append_vector(out, rows.data() + t * rows.cols(), rows.cols());
  }
  out += ']';
}

std::string header_line(const char* kind, std::size_t n, std::size_t m, std::size_t horizon,
                        const char* count_key, std::size_t count, std::uint64_t seed,
                        const std::string& digest) {
  nlohmann::ordered_json h;
  h["format_version"] = kFileFormatVersion;
  h["kind"] = kind;
  if (n) h["n"] = n;
  h["m"] = m;
  h["N"] = horizon;
  h[count_key] = count;
  h["master_seed"] = seed;
  h["config_digest"] = digest;
  return h.dump();
}

struct Lines {
  std::vector<std::string> lines;

  explicit Lines(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
};

json parse_line(const std::string& line, std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw LoadError(lineno, "line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
  }
}

std::size_t header_size(const json& h, const char* key, std::size_t lineno) {
  if (!h.contains(key) || !h[key].is_number_unsigned() || h[key].get<std::size_t>() == 0) {
    throw LoadError(lineno, std::string("header field '") + key +
                                "' is missing or not a positive integer");
  }
  return h[key].get<std::size_t>();
}

json check_header(const Lines& lines, const char* kind) {
  if (lines.lines.empty()) throw LoadError(0, "file is empty");
  json h = parse_line(lines.lines.front(), 1);
  if (!h.is_object()) throw LoadError(1, "header is not a JSON object");
  if (!h.contains("format_version") || h["format_version"] != kFileFormatVersion) {
    throw LoadError(1, "unsupported format_version (expected " +
                           std::to_string(kFileFormatVersion) + ")");
  }
  if (!h.contains("kind") || h["kind"] != kind) {
    throw LoadError(1, std::string("header kind is not '") + kind + "'");
  }
  return h;
}

Vector read_vector(const json& j, std::size_t dim, std::size_t lineno, const char* what) {
  if (!j.is_array() || j.size() != dim) {
    throw LoadError(lineno, "line " + std::to_string(lineno) + ": '" + what +
                                "' must be an array of " + std::to_string(dim) + " numbers");
  }
  Vector v(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    if (!j[k].is_number()) {
      throw LoadError(lineno, "line " + std::to_string(lineno) + ": non-numeric entry in '" +
                                  what + "'");
    }
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  if (!v.allFinite()) {
    throw LoadError(lineno, "line " + std::to_string(lineno) + ": non-finite entry in '" +
                                what + "'");
  }
  return v;
}

StepMatrix read_rows(const json& j, std::size_t rows, std::size_t cols, std::size_t lineno,
                     const char* what) {
  if (!j.is_array() || j.size() != rows) {
    throw LoadError(lineno, "line " + std::to_string(lineno) + ": '" + what + "' must have " +
                                std::to_string(rows) + " steps");
  }
  StepMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t t = 0; t < rows; ++t) {
    out.row(static_cast<Eigen::Index>(t)) = read_vector(j[t], cols, lineno, what).transpose();
  }
  return out;
}

const json& field(const json& rec, const char* key, std::size_t lineno) {
  if (!rec.is_object() || !rec.contains(key)) {
    throw LoadError(lineno, "line " + std::to_string(lineno) + ": missing field '" + key + "'");
  }
  return rec[key];
}

void check_index(const json& rec, const char* key, std::size_t expected, std::size_t lineno) {
  const json& idx = field(rec, key, lineno);
  if (!idx.is_number_unsigned() || idx.get<std::size_t>() != expected) {
    throw LoadError(lineno, "line " + std::to_string(lineno) + ": record index '" + key +
                                "' should be " + std::to_string(expected));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

StepMatrix box_prefix(const DatasetGenConfig& cfg, Stream& rng) {
  const auto m = cfg.control_low.size();
  StepMatrix prefix(static_cast<Eigen::Index>(cfg.randomized_steps), m);
  for (Eigen::Index t = 0; t < prefix.rows(); ++t) {
    for (Eigen::Index k = 0; k < m; ++k) {
      prefix(t, k) = rng.uniform(cfg.control_low(k), cfg.control_high(k));
    }
  }
  return prefix;
}

}  // namespace

PointSet Dataset::initial_states() const {
  PointSet out(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(state_dim));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = samples[i].x0.transpose();
  }
  return out;
}

PointSet Dataset::flattened_controls() const {
  PointSet out(static_cast<Eigen::Index>(samples.size()),
               static_cast<Eigen::Index>(horizon * control_dim));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = samples[i].u.flattened().transpose();
  }
  return out;
}

void Dataset::validate() const {
  if (samples.empty()) throw InputError("dataset has no samples");
  if (state_dim == 0 || control_dim == 0 || horizon == 0) {
    throw InputError("dataset dimensions must be positive");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (static_cast<std::size_t>(s.x0.size()) != state_dim || s.u.horizon() != horizon ||
        s.u.control_dim() != control_dim || s.x.horizon() != horizon ||
        s.x.state_dim() != state_dim) {
      throw InputError("dataset sample " + std::to_string(i) + " has inconsistent dimensions");
    }
  }
}

PointSet ControlLibrary::flattened() const {
  PointSet out(static_cast<Eigen::Index>(sequences.size()),
               static_cast<Eigen::Index>(horizon * control_dim));
  for (std::size_t j = 0; j < sequences.size(); ++j) {
    out.row(static_cast<Eigen::Index>(j)) = sequences[j].flattened().transpose();
  }
  return out;
}

void ControlLibrary::validate() const {
  if (sequences.empty()) throw InputError("control library is empty");
  for (std::size_t j = 0; j < sequences.size(); ++j) {
    if (sequences[j].horizon() != horizon || sequences[j].control_dim() != control_dim) {
      throw InputError("library sequence " + std::to_string(j) +
                       " has inconsistent dimensions");
    }
  }
}

DatasetGenConfig DatasetGenConfig::quadrotor_default() {
  DatasetGenConfig cfg;
  cfg.x0_low = Vector(4);
  cfg.x0_low << -0.5, -0.05, -0.5, -0.05;
  cfg.x0_high = -cfg.x0_low;
  cfg.control_low = Vector::Zero(2);
  cfg.control_high = Vector::Ones(2);
  cfg.gain = pd_gain(2.0, 3.0);
  cfg.target = Vector(4);
  cfg.target << 10.0, 0.0, 10.0, 0.0;
  return cfg;
}

Matrix DatasetGenConfig::pd_gain(double kp, double kd) {
  Matrix k = Matrix::Zero(2, 4);
  k(0, 0) = -kp;
  k(0, 1) = -kd;
  k(1, 2) = -kp;
  k(1, 3) = -kd;
  return k;
}

void DatasetGenConfig::validate(std::size_t state_dim, std::size_t control_dim) const {
  const auto n = static_cast<Eigen::Index>(state_dim);
  const auto m = static_cast<Eigen::Index>(control_dim);
  if (sample_count == 0) throw InputError("dataset size M must be >= 1");
  if (horizon == 0) throw InputError("horizon N must be >= 1");
  if (randomized_steps >= horizon) {
    throw InputError("randomized steps T_r must be < N");
  }
  if (x0_low.size() != n || x0_high.size() != n) throw InputError("x0 box has wrong dimension");
  if (control_low.size() != m || control_high.size() != m) {
    throw InputError("control box has wrong dimension");
  }
  if ((x0_low.array() > x0_high.array()).any()) throw InputError("x0 box bounds are not ordered");
  if ((control_low.array() > control_high.array()).any()) {
    throw InputError("control box bounds are not ordered");
  }
  if (gain.rows() != m || gain.cols() != n) throw InputError("feedback gain must be m x n");
  if (target.size() != n) throw InputError("tracking target has wrong dimension");
}

ControlSequence closed_loop_controls(const SystemModel& model, const Vector& x0,
                                     const StepMatrix& prefix, const DatasetGenConfig& cfg,
                                     std::span<const double> theta, Stream& rng) {
  ControlSequence u;
  u.inputs.resize(static_cast<Eigen::Index>(cfg.horizon),
                  static_cast<Eigen::Index>(model.control_dim()));
  Vector x = x0;
  for (Eigen::Index t = 0; t < u.inputs.rows(); ++t) {
    Vector ut = t < prefix.rows() ? Vector(prefix.row(t).transpose())
                                  : Vector(cfg.gain * (x - cfg.target));
    const Vector w = model.sample_disturbance(rng);
    if (!ut.allFinite()) {
      throw SimulationDivergence(static_cast<std::size_t>(t),
                                 "feedback control diverged at step " + std::to_string(t));
    }
    u.inputs.row(t) = ut.transpose();
    x = model.step(x, ut, w, theta);
    if (!x.allFinite()) {
      throw SimulationDivergence(static_cast<std::size_t>(t),
                                 "closed-loop state diverged at step " + std::to_string(t));
    }
  }
  return u;
}

Dataset generate_dataset(const DatasetGenConfig& cfg, const SystemModel& model,
                         std::uint64_t master_seed) {
  cfg.validate(model.state_dim(), model.control_dim());
  Dataset ds;
  ds.state_dim = model.state_dim();
  ds.control_dim = model.control_dim();
  ds.horizon = cfg.horizon;
  ds.master_seed = master_seed;
  ds.samples.resize(cfg.sample_count);

  for (std::size_t i = 0; i < cfg.sample_count; ++i) {
    Stream rng(derive_seed(master_seed, i));
    Sample& s = ds.samples[i];
    s.x0 = Vector(cfg.x0_low.size());
    for (Eigen::Index k = 0; k < s.x0.size(); ++k) {
      s.x0(k) = rng.uniform(cfg.x0_low(k), cfg.x0_high(k));
    }
    const StepMatrix prefix = box_prefix(cfg, rng);
    try {
      const Vector theta_closed = model.sample_params(rng);
      s.u = closed_loop_controls(model, s.x0, prefix, cfg, as_span(theta_closed), rng);
      // Independent realization, so x^i ~ Q(. | x0^i, u^i) for the frozen u^i.
      s.x = rollout(model, s.x0, s.u, rng);
    } catch (const SimulationDivergence& e) {
      throw SimulationDivergence(e.step(), "dataset sample " + std::to_string(i) + ": " +
                                               e.what());
    }
  }
  return ds;
}

ControlLibrary generate_library(const DatasetGenConfig& cfg, const LibraryGenConfig& lib_cfg,
                                const SystemModel& nominal_model) {
  cfg.validate(nominal_model.state_dim(), nominal_model.control_dim());
  if (static_cast<std::size_t>(lib_cfg.x0.size()) != nominal_model.state_dim()) {
    throw InputError("library x0 has wrong dimension");
  }
  const std::size_t m = nominal_model.control_dim();
  const std::size_t coords = m * cfg.randomized_steps;

  std::size_t count = 0;
  if (lib_cfg.mode == LibraryMode::grid) {
    if (lib_cfg.grid_resolution == 0) throw ConfigError("grid resolution must be >= 1");
    count = 1;
    for (std::size_t c = 0; c < coords; ++c) {
      if (count > lib_cfg.max_sequences / lib_cfg.grid_resolution) {
        throw ConfigError("library grid size exceeds max_sequences = " +
                          std::to_string(lib_cfg.max_sequences));
      }
      count *= lib_cfg.grid_resolution;
    }
  } else {
    count = lib_cfg.count;
    if (count == 0) throw ConfigError("library count must be >= 1");
  }
  if (count > lib_cfg.max_sequences) {
    throw ConfigError("library size " + std::to_string(count) + " exceeds max_sequences = " +
                      std::to_string(lib_cfg.max_sequences));
  }

  const std::size_t g = lib_cfg.grid_resolution;
  auto grid_value = [&](std::size_t level, Eigen::Index k) {
    const double lo = cfg.control_low(k);
    const double hi = cfg.control_high(k);
    if (g == 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * static_cast<double>(level) / static_cast<double>(g - 1);
  };

  ControlLibrary lib;
  lib.control_dim = m;
  lib.horizon = cfg.horizon;
  lib.master_seed = lib_cfg.seed;
  lib.sequences.reserve(count);
  Stream sampler(lib_cfg.seed);
  for (std::size_t j = 0; j < count; ++j) {
    StepMatrix prefix(static_cast<Eigen::Index>(cfg.randomized_steps),
                      static_cast<Eigen::Index>(m));
    if (lib_cfg.mode == LibraryMode::grid) {
      // First coordinate varies slowest.
      std::size_t rem = j;
      for (std::size_t c = coords; c-- > 0;) {
        const auto t = static_cast<Eigen::Index>(c / m);
        const auto k = static_cast<Eigen::Index>(c % m);
        prefix(t, k) = grid_value(rem % g, k);
        rem /= g;
      }
    } else {
      prefix = box_prefix(cfg, sampler);
    }
    Stream nominal_rng(0);
    const Vector theta = nominal_model.sample_params(nominal_rng);
    try {
      lib.sequences.push_back(closed_loop_controls(nominal_model, lib_cfg.x0, prefix, cfg,
                                                   as_span(theta), nominal_rng));
    } catch (const SimulationDivergence& e) {
      throw SimulationDivergence(e.step(), "library sequence " + std::to_string(j) + ": " +
                                               e.what());
    }
  }
  return lib;
}

ControlLibrary generate_library(const DatasetGenConfig& cfg, const LibraryGenConfig& lib_cfg,
                                const QuadrotorParams& nominal, double dt) {
  const QuadrotorModel model(dt, nominal, DisturbanceSpec::zero(4));
  return generate_library(cfg, lib_cfg, model);
}

std::string serialize_dataset(const Dataset& ds) {
  ds.validate();
  std::string out = header_line("dataset", ds.state_dim, ds.control_dim, ds.horizon, "M",
                                ds.size(), ds.master_seed, ds.config_digest);
  out += '\n';
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    out += "{\"i\":" + std::to_string(i) + ",\"x0\":";
    append_vector(out, s.x0.data(), s.x0.size());
    out += ",\"u\":";
    append_rows(out, s.u.inputs);
    out += ",\"x\":";
    append_rows(out, s.x.states);
    out += "}\n";
  }
  return out;
}

std::string serialize_library(const ControlLibrary& lib) {
  lib.validate();
  std::string out = header_line("library", 0, lib.control_dim, lib.horizon, "P", lib.size(),
                                lib.master_seed, lib.config_digest);
  out += '\n';
  for (std::size_t j = 0; j < lib.sequences.size(); ++j) {
    out += "{\"j\":" + std::to_string(j) + ",\"u\":";
    append_rows(out, lib.sequences[j].inputs);
    out += "}\n";
  }
  return out;
}

Dataset parse_dataset(const std::string& text) {
  const Lines lines(text);
  const json h = check_header(lines, "dataset");
  Dataset ds;
  ds.state_dim = header_size(h, "n", 1);
  ds.control_dim = header_size(h, "m", 1);
  ds.horizon = header_size(h, "N", 1);
  const std::size_t count = header_size(h, "M", 1);
  if (h.contains("master_seed") && h["master_seed"].is_number_unsigned()) {
    ds.master_seed = h["master_seed"].get<std::uint64_t>();
  }
  if (h.contains("config_digest") && h["config_digest"].is_string()) {
    ds.config_digest = h["config_digest"].get<std::string>();
  }
  if (lines.lines.size() - 1 != count) {
    throw LoadError(lines.lines.size(), "header declares M = " + std::to_string(count) +
                                            " records but file has " +
                                            std::to_string(lines.lines.size() - 1));
  }
  ds.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t lineno = i + 2;
    const json rec = parse_line(lines.lines[i + 1], lineno);
    check_index(rec, "i", i, lineno);
    Sample& s = ds.samples[i];
    s.x0 = read_vector(field(rec, "x0", lineno), ds.state_dim, lineno, "x0");
    s.u.inputs = read_rows(field(rec, "u", lineno), ds.horizon, ds.control_dim, lineno, "u");
    s.x.states = read_rows(field(rec, "x", lineno), ds.horizon, ds.state_dim, lineno, "x");
  }
  return ds;
}

ControlLibrary parse_library(const std::string& text) {
  const Lines lines(text);
  const json h = check_header(lines, "library");
  ControlLibrary lib;
  lib.control_dim = header_size(h, "m", 1);
  lib.horizon = header_size(h, "N", 1);
  const std::size_t count = header_size(h, "P", 1);
  if (h.contains("master_seed") && h["master_seed"].is_number_unsigned()) {
    lib.master_seed = h["master_seed"].get<std::uint64_t>();
  }
  if (h.contains("config_digest") && h["config_digest"].is_string()) {
    lib.config_digest = h["config_digest"].get<std::string>();
  }
  if (lines.lines.size() - 1 != count) {
    throw LoadError(lines.lines.size(), "header declares P = " + std::to_string(count) +
                                            " records but file has " +
                                            std::to_string(lines.lines.size() - 1));
  }
  lib.sequences.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t lineno = j + 2;
    const json rec = parse_line(lines.lines[j + 1], lineno);
    check_index(rec, "j", j, lineno);
    lib.sequences[j].inputs =
        read_rows(field(rec, "u", lineno), lib.horizon, lib.control_dim, lineno, "u");
  }
  return lib;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  write_file(path, serialize_dataset(ds));
}

Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

void save_library(const ControlLibrary& lib, const std::filesystem::path& path) {
  write_file(path, serialize_library(lib));
}

ControlLibrary load_library(const std::filesystem::path& path) {
  return parse_library(read_file(path));
}

std::string library_digest(const ControlLibrary& lib) {
  std::string body;
  for (const ControlSequence& u : lib.sequences) {
    append_rows(body, u.inputs);
    body += '\n';
  }
  return digest_hex(body);
}

}  // namespace ccembed
