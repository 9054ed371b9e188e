#pragma once

// Experiment plumbing shared by the command-line driver: configuration,
// code files, result CSV rows and fit reports.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "qhier/analysis.hpp"
#include "qhier/codes.hpp"
#include "qhier/io.hpp"
#include "qhier/lookup.hpp"
#include "qhier/sim.hpp"

namespace qhier {

using nlohmann::json;

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Artifact present but unusable (schema violation, insufficient data).
class DataError : public ArtifactError {
 public:
  using ArtifactError::ArtifactError;
};

struct ExperimentConfig {
  LdpcSpec ldpc{3, 4, 2};
  std::vector<std::size_t> s_list{2};
  std::size_t samples = 1000;
  std::size_t L = 5;
  std::vector<double> p_list{0.05, 0.08, 0.10};
  std::uint64_t shots = 10000;
  std::vector<DecodeMode> modes{DecodeMode::soft};
  DecoderConfig decoder{};
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0: one per hardware thread

  std::string codes_dir = "artifacts/codes";
  std::string tables_dir = "artifacts/tables";
  std::string results_csv = "artifacts/results.csv";
  std::string fit_report = "artifacts/fit_report.json";
  std::string crossover_csv = "artifacts/crossover.csv";

  FitConstants constants{};
  std::vector<double> crossover_p{1e-4, 1e-3, 1e-2};
  double crossover_d = 25;
  std::vector<long> crossover_L1{3, 5};
  std::size_t min_failures = 100;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); };
  try {
    c.ldpc.validate();
  } catch (const std::invalid_argument& e) {
    fail("ldpc", e.what());
  }
  if (c.s_list.empty()) fail("s_list", "must not be empty");
  for (auto s : c.s_list) {
    if (s < 1) fail("s_list", "sizes must be >= 1");
  }
  if (c.samples < 1) fail("samples", "must be >= 1");
  if (c.L != 1 && c.L != 3 && c.L != 5) fail("L", "must be 1, 3 or 5");
  if (c.p_list.empty()) fail("p_list", "must not be empty");
  for (double p : c.p_list) {
    if (!(p >= 0.0 && p < 0.75)) fail("p_list", "entries must satisfy 0 <= p < 0.75");
  }
  if (c.shots < 1) fail("shots", "must be >= 1");
  if (c.modes.empty()) fail("modes", "must not be empty");
  try {
    c.decoder.validate();
  } catch (const std::invalid_argument& e) {
    fail("decoder", e.what());
  }
  const auto& k = c.constants;
  if (!(k.b > 0 && k.c > 0 && k.b_h > 0 && k.c_h > 0)) fail("constants", "b, c, b_h, c_h must be positive");
  if (!(k.pth_c > 0 && k.pth_c < 1 && k.pth_s > 0 && k.pth_s < 1)) fail("constants", "thresholds must lie in (0, 1)");
  for (double p : c.crossover_p) {
    if (!(p > 0 && p < 1)) fail("crossover_p", "entries must lie in (0, 1)");
  }
  if (!(c.crossover_d >= 1)) fail("crossover_d", "must be >= 1");
  for (long L1 : c.crossover_L1) {
    if (L1 < 1 || L1 % 2 == 0) fail("crossover_L1", "entries must be positive odd integers");
  }
}

inline json to_json(const ExperimentConfig& c) {
  json modes = json::array();
  for (auto m : c.modes) modes.push_back(to_string(m));
  return json{
      {"ldpc", {{"col_weight", c.ldpc.col_weight}, {"row_weight", c.ldpc.row_weight}}},
      {"s_list", c.s_list},
      {"samples", c.samples},
      {"L", c.L},
      {"p_list", c.p_list},
      {"shots", c.shots},
      {"modes", modes},
      {"decoder",
       {{"max_iterations", c.decoder.max_iterations}, {"osd_depth", c.decoder.osd_depth}, {"llr_clip", c.decoder.llr_clip}}},
      {"seed", c.seed},
      {"workers", c.workers},
      {"paths",
       {{"codes_dir", c.codes_dir},
        {"tables_dir", c.tables_dir},
        {"results_csv", c.results_csv},
        {"fit_report", c.fit_report},
        {"crossover_csv", c.crossover_csv}}},
      {"constants",
       {{"b", c.constants.b},
        {"c", c.constants.c},
        {"b_h", c.constants.b_h},
        {"c_h", c.constants.c_h},
        {"pth_c", c.constants.pth_c},
        {"pth_s", c.constants.pth_s}}},
      {"crossover", {{"p_list", c.crossover_p}, {"d", c.crossover_d}, {"L1", c.crossover_L1}}},
      {"min_failures", c.min_failures},
  };
}

namespace detail {

template <class T>
void read_field(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + key + ": wrong type");
  }
}

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(path + key + ": unknown field");
    }
  }
}

}  // namespace detail

/// Missing fields keep their defaults; unknown fields are rejected.
inline ExperimentConfig config_from_json(const json& j) {
  using detail::check_keys;
  using detail::read_field;
  ExperimentConfig c;
  check_keys(j, {"ldpc", "s_list", "samples", "L", "p_list", "shots", "modes", "decoder", "seed", "workers", "paths",
                 "constants", "crossover", "min_failures"},
             "");
  if (j.contains("ldpc")) {
    const auto& l = j["ldpc"];
    check_keys(l, {"col_weight", "row_weight"}, "ldpc.");
    read_field(l, "col_weight", c.ldpc.col_weight, "ldpc.");
    read_field(l, "row_weight", c.ldpc.row_weight, "ldpc.");
  }
  read_field(j, "s_list", c.s_list, "");
  read_field(j, "samples", c.samples, "");
  read_field(j, "L", c.L, "");
  read_field(j, "p_list", c.p_list, "");
  read_field(j, "shots", c.shots, "");
  if (j.contains("modes")) {
    std::vector<std::string> names;
    read_field(j, "modes", names, "");
    c.modes.clear();
    for (const auto& n : names) {
      try {
        c.modes.push_back(parse_mode(n));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("modes: ") + e.what());
      }
    }
  }
  if (j.contains("decoder")) {
    const auto& d = j["decoder"];
    check_keys(d, {"max_iterations", "osd_depth", "llr_clip"}, "decoder.");
    read_field(d, "max_iterations", c.decoder.max_iterations, "decoder.");
    read_field(d, "osd_depth", c.decoder.osd_depth, "decoder.");
    read_field(d, "llr_clip", c.decoder.llr_clip, "decoder.");
  }
  read_field(j, "seed", c.seed, "");
  read_field(j, "workers", c.workers, "");
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    check_keys(p, {"codes_dir", "tables_dir", "results_csv", "fit_report", "crossover_csv"}, "paths.");
    read_field(p, "codes_dir", c.codes_dir, "paths.");
    read_field(p, "tables_dir", c.tables_dir, "paths.");
    read_field(p, "results_csv", c.results_csv, "paths.");
    read_field(p, "fit_report", c.fit_report, "paths.");
    read_field(p, "crossover_csv", c.crossover_csv, "paths.");
  }
  if (j.contains("constants")) {
    const auto& k = j["constants"];
    check_keys(k, {"b", "c", "b_h", "c_h", "pth_c", "pth_s"}, "constants.");
    read_field(k, "b", c.constants.b, "constants.");
    read_field(k, "c", c.constants.c, "constants.");
    read_field(k, "b_h", c.constants.b_h, "constants.");
    read_field(k, "c_h", c.constants.c_h, "constants.");
    read_field(k, "pth_c", c.constants.pth_c, "constants.");
    read_field(k, "pth_s", c.constants.pth_s, "constants.");
  }
  if (j.contains("crossover")) {
    const auto& x = j["crossover"];
    check_keys(x, {"p_list", "d", "L1"}, "crossover.");
    read_field(x, "p_list", c.crossover_p, "crossover.");
    read_field(x, "d", c.crossover_d, "crossover.");
    read_field(x, "L1", c.crossover_L1, "crossover.");
  }
  read_field(j, "min_failures", c.min_failures, "");
  return c;
}

inline std::string render_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

inline ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Code files

namespace detail {

inline json rows_to_json(const BitMatrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(m.row(i).to_string());
  return a;
}

inline json vectors_to_json(const std::vector<BitVector>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(v.to_string());
  return a;
}

inline std::vector<BitVector> vectors_from_json(const json& a, std::size_t len, const char* field) {
  std::vector<BitVector> out;
  for (const auto& s : a) {
    auto v = BitVector::from_string(s.get<std::string>());
    if (v.size() != len) throw DataError(std::string("code file: ") + field + " entry has wrong length");
    out.push_back(std::move(v));
  }
  return out;
}

inline BitMatrix matrix_from_json(const json& a, std::size_t cols, const char* field) {
  return BitMatrix::from_row_vectors(cols, vectors_from_json(a, cols, field));
}

inline json distance_to_json(const Distance& d) {
  if (d.is_finite()) return d.value();
  return d.to_string();
}

inline Distance distance_from_json(const json& j) {
  if (j.is_number_unsigned()) return Distance::finite(j.get<std::size_t>());
  const auto s = j.get<std::string>();
  if (s == "inf") return Distance::infinite();
  if (s == "unknown") return Distance::unknown();
  throw DataError("code file: bad distance '" + s + "'");
}

}  // namespace detail

/// Upper-layer code together with the classical code it was built from.
struct CodeRecord {
  CssCode code;
  ClassicalCode classical;
  LdpcSpec spec;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

inline json code_to_json(const CodeRecord& r) {
  return json{
      {"label", r.code.label},
      {"n", r.code.n},
      {"k", r.code.k},
      {"distance", detail::distance_to_json(r.code.distance)},
      {"h_x", detail::rows_to_json(r.code.hx)},
      {"h_z", detail::rows_to_json(r.code.hz)},
      {"logical_x", detail::vectors_to_json(r.code.logical_x)},
      {"logical_z", detail::vectors_to_json(r.code.logical_z)},
      {"ldpc_spec", {{"col_weight", r.spec.col_weight}, {"row_weight", r.spec.row_weight}, {"s", r.spec.size}}},
      {"seed", r.seed},
      {"classical",
       {{"h", detail::rows_to_json(r.classical.h)},
        {"k", r.classical.k},
        {"k_transpose", r.classical.k_transpose},
        {"distance", detail::distance_to_json(r.classical.distance)},
        {"samples", r.samples},
        {"sample_index", r.classical.sample_index}}},
  };
}

inline CodeRecord code_from_json(const json& j) {
  try {
    CodeRecord r;
    r.code.label = j.at("label").get<std::string>();
    r.code.n = j.at("n").get<std::size_t>();
    r.code.k = j.at("k").get<std::size_t>();
    r.code.distance = detail::distance_from_json(j.at("distance"));
    r.code.hx = detail::matrix_from_json(j.at("h_x"), r.code.n, "h_x");
    r.code.hz = detail::matrix_from_json(j.at("h_z"), r.code.n, "h_z");
    r.code.logical_x = detail::vectors_from_json(j.at("logical_x"), r.code.n, "logical_x");
    r.code.logical_z = detail::vectors_from_json(j.at("logical_z"), r.code.n, "logical_z");
    const auto& spec = j.at("ldpc_spec");
    r.spec = {spec.at("col_weight").get<std::size_t>(), spec.at("row_weight").get<std::size_t>(),
              spec.at("s").get<std::size_t>()};
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("classical")) {
      const auto& c = j["classical"];
      r.classical.h = detail::matrix_from_json(c.at("h"), r.spec.cols(), "classical.h");
      r.classical.n_bits = r.spec.cols();
      r.classical.k = c.at("k").get<std::size_t>();
      r.classical.k_transpose = c.at("k_transpose").get<std::size_t>();
      r.classical.distance = detail::distance_from_json(c.at("distance"));
      r.samples = c.at("samples").get<std::size_t>();
      r.classical.sample_index = c.at("sample_index").get<std::size_t>();
    }
    if (r.code.logical_x.size() != r.code.k || r.code.logical_z.size() != r.code.k) {
      throw DataError("code file: logical count differs from k");
    }
    if (!is_valid_css(r.code)) throw DataError("code file: checks or logicals fail the CSS conditions");
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("code file: ") + e.what());
  }
}

inline std::filesystem::path code_path(const ExperimentConfig& c, std::size_t s) {
  return std::filesystem::path(c.codes_dir) / ("hgp_s" + std::to_string(s) + ".json");
}

inline std::filesystem::path table_path(const ExperimentConfig& c, std::size_t L, Sector sector) {
  return std::filesystem::path(c.tables_dir) / ("surface_L" + std::to_string(L) + "_" + to_string(sector) + ".qhlt");
}

inline void save_code(const CodeRecord& r, const std::filesystem::path& path) {
  write_file_atomic(path, code_to_json(r).dump(1) + "\n");
}

inline CodeRecord load_code(const std::filesystem::path& path) {
  const auto text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return code_from_json(j);
}

/// Short stable identifier: label plus a hash of the check matrices.
inline std::string code_id(const CssCode& code) {
  std::string bytes = to_text(code.hx) + "|" + to_text(code.hz);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return code.label + "-" + std::string(buf, 8);
}

// ---------------------------------------------------------------------------
// Result rows

struct ResultRecord {
  std::size_t s = 0;
  std::size_t L = 5;
  DecodeMode mode = DecodeMode::soft;
  double p = 0.0;
  std::uint64_t shots = 0;
  std::uint64_t failures_any = 0;
  double mean_rate = 0.0;
  double std_error = 0.0;
  double bp_nonconv_fraction = 0.0;
  double osd_fraction = 0.0;
  std::uint64_t seed = 0;
  std::string code_id;
  std::string timestamp;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

inline constexpr std::string_view kResultHeader =
    "s,L,mode,p,shots,failures_any,mean_rate,std_error,bp_nonconv_fraction,osd_fraction,seed,code_id,timestamp";

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline ResultRecord make_record(const ErrorRateEstimate& e, std::size_t s, std::size_t L, const std::string& id,
                                std::string timestamp) {
  ResultRecord r;
  r.s = s;
  r.L = L;
  r.mode = e.mode;
  r.p = e.p;
  r.shots = e.shots;
  r.failures_any = e.failures_any;
  r.mean_rate = e.mean_rate;
  r.std_error = e.std_error;
  r.bp_nonconv_fraction = e.bp_nonconv_fraction();
  r.osd_fraction = e.osd_fraction();
  r.seed = e.seed;
  r.code_id = id;
  r.timestamp = std::move(timestamp);
  return r;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(std::string_view field, std::string_view name) {
  T v{};
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw DataError("result row: field '" + std::string(name) + "' is not a valid number: '" + std::string(field) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw DataError("result row: field '" + std::string(name) + "' is not finite");
  }
  return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline std::string format_row(const ResultRecord& r) {
  using detail::format_double;
  std::ostringstream os;
  os << r.s << ',' << r.L << ',' << to_string(r.mode) << ',' << format_double(r.p) << ',' << r.shots << ','
     << r.failures_any << ',' << format_double(r.mean_rate) << ',' << format_double(r.std_error) << ','
     << format_double(r.bp_nonconv_fraction) << ',' << format_double(r.osd_fraction) << ',' << r.seed << ','
     << r.code_id << ',' << r.timestamp;
  return os.str();
}

inline ResultRecord parse_row(std::string_view line) {
  using detail::parse_number;
  const auto f = detail::split_csv(line);
  if (f.size() != 13) throw DataError("result row: expected 13 fields, got " + std::to_string(f.size()));
  ResultRecord r;
  r.s = parse_number<std::size_t>(f[0], "s");
  r.L = parse_number<std::size_t>(f[1], "L");
  if (f[2] == "soft") {
    r.mode = DecodeMode::soft;
  } else if (f[2] == "hard") {
    r.mode = DecodeMode::hard;
  } else {
    throw DataError("result row: field 'mode' must be soft or hard");
  }
  r.p = parse_number<double>(f[3], "p");
  r.shots = parse_number<std::uint64_t>(f[4], "shots");
  r.failures_any = parse_number<std::uint64_t>(f[5], "failures_any");
  r.mean_rate = parse_number<double>(f[6], "mean_rate");
  r.std_error = parse_number<double>(f[7], "std_error");
  r.bp_nonconv_fraction = parse_number<double>(f[8], "bp_nonconv_fraction");
  r.osd_fraction = parse_number<double>(f[9], "osd_fraction");
  r.seed = parse_number<std::uint64_t>(f[10], "seed");
  r.code_id = std::string(f[11]);
  r.timestamp = std::string(f[12]);
  if (r.shots < 1) throw DataError("result row: shots must be >= 1");
  if (r.failures_any > r.shots) throw DataError("result row: failures_any exceeds shots");
  auto unit = [](double v, const char* name) {
    if (v < 0.0 || v > 1.0) throw DataError(std::string("result row: field '") + name + "' outside [0, 1]");
  };
  unit(r.p, "p");
  unit(r.mean_rate, "mean_rate");
  unit(r.bp_nonconv_fraction, "bp_nonconv_fraction");
  unit(r.osd_fraction, "osd_fraction");
  if (r.std_error < 0) throw DataError("result row: field 'std_error' is negative");
  if (r.code_id.empty()) throw DataError("result row: field 'code_id' is empty");
  return r;
}

/// Parses a results CSV; throws DataError naming the first bad line.
inline std::vector<ResultRecord> parse_results_csv(std::string_view text) {
  std::vector<ResultRecord> rows;
  if (text.find('\r') != std::string_view::npos) throw DataError("results csv: CR characters present (LF line endings required)");
  std::size_t pos = 0, line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) throw DataError("results csv: last line lacks a terminating LF");
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!header_seen) {
      if (line != kResultHeader) throw DataError("results csv: line 1 is not the expected header");
      header_seen = true;
      continue;
    }
    try {
      rows.push_back(parse_row(line));
    } catch (const DataError& e) {
      throw DataError("results csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) throw DataError("results csv: missing header");
  return rows;
}

inline std::string render_results_csv(const std::vector<ResultRecord>& rows) {
  std::string out(kResultHeader);
  out += '\n';
  for (const auto& r : rows) out += format_row(r) + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Fit report

struct GroupFit {
  std::size_t s = 0;
  DecodeMode mode = DecodeMode::soft;
  WindowedFit fit;
  std::size_t points = 0;
};

struct FitReport {
  std::vector<GroupFit> groups;
  std::map<DecodeMode, PowerLawFit> alpha_fits;  // α = b·s^c per mode, when ≥ 2 sizes
};

/// Per-(s, mode) scaling fits followed by α-versus-s power laws.
inline FitReport fit_results(const std::vector<ResultRecord>& rows, std::size_t min_failures = 100) {
  std::map<std::pair<DecodeMode, std::size_t>, std::vector<RatePoint>> groups;
  for (const auto& r : rows) {
    groups[{r.mode, r.s}].push_back({r.p, r.mean_rate, r.failures_any, r.shots});
  }
  FitReport rep;
  std::map<DecodeMode, std::vector<std::pair<double, double>>> alphas;
  for (const auto& [key, pts] : groups) {
    const auto& [mode, s] = key;
    std::size_t usable = 0;
    for (const auto& pt : pts) usable += pt.rate > 0 && pt.p > 0;
    const std::string name = "group s=" + std::to_string(s) + " mode=" + to_string(mode);
    if (usable < 2) throw DataError(name + ": needs at least two points with nonzero rate, has " + std::to_string(usable));
    GroupFit g;
    g.s = s;
    g.mode = mode;
    g.points = pts.size();
    try {
      g.fit = fit_error_scaling_windowed(pts, min_failures);
    } catch (const FitError& e) {
      throw DataError(name + ": " + e.what());
    }
    alphas[mode].push_back({static_cast<double>(s), g.fit.fit.alpha});
    rep.groups.push_back(g);
  }
  for (const auto& [mode, pts] : alphas) {
    if (pts.size() >= 2) rep.alpha_fits[mode] = fit_power_law(pts);
  }
  return rep;
}

inline json to_json(const FitReport& rep) {
  json groups = json::array();
  for (const auto& g : rep.groups) {
    groups.push_back({
        {"s", g.s},
        {"mode", to_string(g.mode)},
        {"alpha", g.fit.fit.alpha},
        {"p_th", g.fit.fit.p_th},
        {"points_used", g.fit.fit.points_used},
        {"residual", g.fit.fit.residual},
        {"low_confidence", g.fit.fit.low_confidence},
        {"window", {{"p_max", g.fit.window_p_max}, {"min_failures", g.fit.min_failures}, {"fell_back", g.fit.fell_back}}},
    });
  }
  json fits = json::object();
  for (const auto& [mode, f] : rep.alpha_fits) fits[to_string(mode)] = {{"b", f.b}, {"c", f.c}, {"residual", f.residual}};
  return {{"groups", groups}, {"alpha_vs_s", fits}};
}

}  // namespace qhier
