// qhier: command-line driver for concatenated HGP / surface-code experiments.
//
//   qhier gen-codes   --config cfg.json [--s 2,3] [--seed N] [--out DIR]
//   qhier build-table [--L 5] [--out DIR]
//   qhier simulate    [--s 2] [--p 0.05,0.1] [--shots N] [--mode soft|hard|both] [--out results.csv]
//   qhier fit         [--csv results.csv] [--out report.json]
//   qhier crossover   [--p 1e-2] [--d 25] [--out crossover.csv]
//   qhier check       [--csv results.csv]
//
// Exit codes: 0 success, 2 configuration error, 3 missing artifact, 4 data error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qhier/analysis.hpp"
#include "qhier/codes.hpp"
#include "qhier/experiment.hpp"
#include "qhier/io.hpp"
#include "qhier/lookup.hpp"
#include "qhier/sim.hpp"

namespace {

using namespace qhier;

constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitData = 4;

struct Overrides {
  std::string config_path;
  std::vector<std::size_t> s;
  std::vector<double> p;
  std::optional<std::uint64_t> shots;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> L;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> workers;
  std::optional<double> d;
  std::vector<long> L1;
  std::optional<std::string> csv;
};

ExperimentConfig load_config(const Overrides& o) {
  ExperimentConfig c;
  if (!o.config_path.empty()) {
    try {
      c = parse_config(read_file(o.config_path));
    } catch (const MissingArtifact&) {
      throw ConfigError("--config: file not found: " + o.config_path);
    }
  }
  if (!o.s.empty()) c.s_list = o.s;
  if (!o.p.empty()) {
    c.p_list = o.p;
    c.crossover_p = o.p;
  }
  if (o.shots) c.shots = *o.shots;
  if (o.mode) {
    if (*o.mode == "both") {
      c.modes = {DecodeMode::soft, DecodeMode::hard};
    } else {
      try {
        c.modes = {parse_mode(*o.mode)};
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--mode: ") + e.what());
      }
    }
  }
  if (o.seed) c.seed = *o.seed;
  if (o.L) c.L = *o.L;
  if (o.samples) c.samples = *o.samples;
  if (o.workers) c.workers = *o.workers;
  if (o.d) c.crossover_d = *o.d;
  if (!o.L1.empty()) c.crossover_L1 = o.L1;
  validate(c);
  return c;
}

std::string out_or(const Overrides& o, const std::string& fallback) { return o.out ? *o.out : fallback; }

// --- gen-codes ---------------------------------------------------------------

int cmd_gen_codes(const ExperimentConfig& c, const Overrides& o) {
  auto cfg = c;
  cfg.codes_dir = out_or(o, c.codes_dir);
  std::ostringstream summary;
  summary << "s,d_s,k_c,k_c_T,seed,samples\n";
  std::cout << "s  d_s  k_c  k_c_T  n      k\n";
  for (auto s : cfg.s_list) {
    const LdpcSpec spec{cfg.ldpc.col_weight, cfg.ldpc.row_weight, s};
    const std::uint64_t seed = derive_seed(cfg.seed, s);
    Rng rng(seed);
    const auto classical = search_best_code(spec, cfg.samples, rng);
    CodeRecord rec{hgp(classical.h, classical.h, "hgp_s" + std::to_string(s)), classical, spec, seed, cfg.samples};
    save_code(rec, code_path(cfg, s));
    summary << s << ',' << classical.distance.to_string() << ',' << classical.k << ',' << classical.k_transpose << ','
            << seed << ',' << cfg.samples << '\n';
    std::printf("%-2zu %-4s %-4zu %-6zu %-6zu %zu\n", s, classical.distance.to_string().c_str(), classical.k,
                classical.k_transpose, rec.code.n, rec.code.k);
  }
  write_file_atomic(std::filesystem::path(cfg.codes_dir) / "summary.csv", summary.str());
  return 0;
}

// --- build-table -------------------------------------------------------------

int cmd_build_table(const ExperimentConfig& c, const Overrides& o) {
  auto cfg = c;
  cfg.tables_dir = out_or(o, c.tables_dir);
  const auto code = rotated_surface(cfg.L);
  for (auto sector : {Sector::x_errors, Sector::z_errors}) {
    const auto table = build_syndrome_table(code, sector);
    save_table(table, table_path(cfg, cfg.L, sector));
    std::uint64_t total = 0;
    for (std::uint32_t syn = 0; syn < table.num_syndromes(); ++syn) {
      for (int par = 0; par < 2; ++par) {
        for (auto n : table.counts(syn, par)) total += n;
      }
    }
    std::printf("L=%zu sector=%s syndromes=%zu classified=%llu checksum=%016llx\n", cfg.L, to_string(sector),
                static_cast<std::size_t>(table.num_syndromes()), static_cast<unsigned long long>(total),
                static_cast<unsigned long long>(table_checksum(table)));
  }
  return 0;
}

// --- simulate ----------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& c, const Overrides& o) {
  auto cfg = c;
  cfg.results_csv = out_or(o, c.results_csv);
  auto tx = load_table(table_path(cfg, cfg.L, Sector::x_errors));
  auto tz = load_table(table_path(cfg, cfg.L, Sector::z_errors));

  std::vector<ResultRecord> rows;
  if (std::filesystem::exists(cfg.results_csv)) rows = parse_results_csv(read_file(cfg.results_csv));

  for (auto s : cfg.s_list) {
    auto rec = load_code(code_path(cfg, s));
    const auto id = code_id(rec.code);
    const auto hier = make_hierarchical(std::move(rec.code), tx, tz, s);
    for (double p : cfg.p_list) {
      for (auto mode : cfg.modes) {
        const auto est = estimate_logical_error_rate(hier, p, cfg.shots, cfg.seed, mode, cfg.decoder, cfg.workers);
        rows.push_back(make_record(est, s, cfg.L, id, utc_timestamp()));
        std::printf("s=%zu mode=%s p=%g shots=%llu mean_rate=%.6g any=%.6g +- %.2g osd=%.3f\n", s, to_string(mode), p,
                    static_cast<unsigned long long>(est.shots), est.mean_rate, est.any_rate(), est.std_error,
                    est.osd_fraction());
        std::fflush(stdout);
      }
    }
  }
  write_file_atomic(cfg.results_csv, render_results_csv(rows));
  return 0;
}

// --- fit ---------------------------------------------------------------------

int cmd_fit(const ExperimentConfig& c, const Overrides& o) {
  const std::string in = o.csv ? *o.csv : c.results_csv;
  const std::string out = out_or(o, c.fit_report);
  const auto rows = parse_results_csv(read_file(in));
  const auto report = fit_results(rows, c.min_failures);
  write_file_atomic(out, to_json(report).dump(2) + "\n");
  for (const auto& g : report.groups) {
    std::printf("s=%zu mode=%s alpha=%.4f p_th=%.4f points=%zu%s\n", g.s, to_string(g.mode), g.fit.fit.alpha,
                g.fit.fit.p_th, g.fit.fit.points_used, g.fit.fit.low_confidence ? " (low confidence)" : "");
  }
  for (const auto& [mode, f] : report.alpha_fits) {
    std::printf("alpha = %.4f * s^%.4f (%s)\n", f.b, f.c, to_string(mode));
  }
  return 0;
}

// --- crossover ---------------------------------------------------------------

std::optional<DistanceTable> read_distance_summary(const ExperimentConfig& c) {
  const auto path = std::filesystem::path(c.codes_dir) / "summary.csv";
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);  // header
  DistanceTable t;
  while (std::getline(in, line)) {
    long s = 0, d = 0;
    if (std::sscanf(line.c_str(), "%ld,%ld", &s, &d) == 2) t[s] = d;
  }
  return t;
}

int cmd_crossover(const ExperimentConfig& c, const Overrides& o) {
  const std::string out = out_or(o, c.crossover_csv);
  const auto& k = c.constants;
  for (double p : c.crossover_p) {
    if (p >= std::min(k.pth_c, k.pth_s)) {
      throw ConfigError("crossover p_list: p = " + std::to_string(p) + " is not below both thresholds");
    }
  }
  std::ostringstream csv;
  csv << "p,d,s_rs,s_min,s_approx\n";
  const double sa = s_approx(c.crossover_d, k.b, k.c);
  std::printf("s_approx(d=%g) = %.4f\n", c.crossover_d, sa);
  for (double p : c.crossover_p) {
    const auto r = crossover_size(p, c.crossover_d, k);
    csv << detail::format_double(p) << ',' << detail::format_double(c.crossover_d) << ','
        << detail::format_double(r.s_rs) << ',' << r.s_min << ',' << detail::format_double(sa) << '\n';
    std::printf("soft: p=%g d=%g s_rs=%.4f s_min=%ld\n", p, c.crossover_d, r.s_rs, r.s_min);
  }
  const auto table = read_distance_summary(c);
  for (long L1 : c.crossover_L1) {
    const auto soft = outperformance_conditions(DecodeMode::soft, L1, k, c.crossover_p.back());
    const auto hard = outperformance_conditions(DecodeMode::hard, L1, k, c.crossover_p.back(), table ? &*table : nullptr);
    std::printf("L1=%ld soft: d >= %ld, s >= %ld (p=%g)\n", L1, soft.d_min, *soft.s_min, c.crossover_p.back());
    if (hard.s_min) {
      std::printf("L1=%ld hard: d_s >= %ld, s >= %ld (from %s)\n", L1, *hard.d_s_min, *hard.s_min, hard.s_source.c_str());
    } else {
      std::printf("L1=%ld hard: d_s >= %ld, no tabulated s reaches it (from %s)\n", L1, *hard.d_s_min,
                  hard.s_source.c_str());
    }
  }
  write_file_atomic(out, csv.str());
  return 0;
}

// --- check -------------------------------------------------------------------

int cmd_check(const ExperimentConfig& c, const Overrides& o) {
  const std::string in = o.csv ? *o.csv : c.results_csv;
  const auto rows = parse_results_csv(read_file(in));
  std::printf("%s: %zu rows OK\n", in.c_str(), rows.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concatenated HGP / rotated-surface code experiments"};
  app.require_subcommand(1);
  Overrides o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON configuration file");
    sub->add_option("--out", o.out, "Output path (directory or file, depending on the command)");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  };

  auto* gen = app.add_subcommand("gen-codes", "Search (a,b)-regular classical codes and write their HGP codes");
  common(gen);
  gen->add_option("--s", o.s, "Size parameters")->delimiter(',');
  gen->add_option("--samples", o.samples, "Random instances per size");

  auto* build = app.add_subcommand("build-table", "Build lookup tables for the rotated surface code");
  common(build);
  build->add_option("--L", o.L, "Surface code distance (1, 3 or 5)");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo logical error rates; appends rows to the results CSV");
  common(sim);
  sim->add_option("--s", o.s, "Size parameters")->delimiter(',');
  sim->add_option("--p", o.p, "Physical error rates")->delimiter(',');
  sim->add_option("--shots", o.shots, "Shots per point");
  sim->add_option("--mode", o.mode, "soft, hard or both");
  sim->add_option("--L", o.L, "Lower-layer surface code distance");

  auto* fit = app.add_subcommand("fit", "Fit error scaling per (s, mode) and alpha versus s");
  common(fit);
  fit->add_option("--csv", o.csv, "Results CSV");

  auto* cross = app.add_subcommand("crossover", "Size conditions for outperforming the surface code");
  common(cross);
  cross->add_option("--p", o.p, "Physical error rates")->delimiter(',');
  cross->add_option("--d", o.d, "Surface code distance to match");
  cross->add_option("--L1", o.L1, "Lower-layer distances for the hard-decision bound")->delimiter(',');

  auto* check = app.add_subcommand("check", "Validate a results CSV against the schema");
  common(check);
  check->add_option("--csv", o.csv, "Results CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const auto cfg = load_config(o);
    if (gen->parsed()) return cmd_gen_codes(cfg, o);
    if (build->parsed()) return cmd_build_table(cfg, o);
    if (sim->parsed()) return cmd_simulate(cfg, o);
    if (fit->parsed()) return cmd_fit(cfg, o);
    if (cross->parsed()) return cmd_crossover(cfg, o);
    if (check->parsed()) return cmd_check(cfg, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << '\n';
    return kExitMissing;
  } catch (const ArtifactError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const GenerationError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
