// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance [workers]   (0 or absent: one worker per hardware thread)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qhier/analysis.hpp"
#include "qhier/bp_osd.hpp"
#include "qhier/codes.hpp"
#include "qhier/experiment.hpp"
#include "qhier/lookup.hpp"
#include "qhier/random.hpp"
#include "qhier/sim.hpp"

using namespace qhier;

namespace {

constexpr std::uint64_t kMaster = 1;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::size_t g_workers = 0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Minimum weight of a vector in ker(checks) outside rowspace(stabilizers), by
// walking all 2^n patterns. Zero means no such vector.
std::size_t sector_distance(const BitMatrix& checks, const BitMatrix& stabilizers) {
  const std::size_t n = checks.cols();
  std::size_t best = 0;
  for (std::uint64_t x = 1; x < (std::uint64_t{1} << n); ++x) {
    const auto w = static_cast<std::size_t>(std::popcount(x));
    if (best && w >= best) continue;
    BitVector v(n);
    for (std::size_t q = 0; q < n; ++q) v.set(q, (x >> q) & 1u);
    if (!matvec(checks, v).none()) continue;
    if (stabilizers.rows() > 0 && in_rowspace(stabilizers, v)) continue;
    best = w;
  }
  return best;
}

std::size_t css_distance(const CssCode& c) { return std::min(sector_distance(c.hz, c.hx), sector_distance(c.hx, c.hz)); }

const BitMatrix& sector_checks(const CssCode& c, Sector s) { return s == Sector::x_errors ? c.hz : c.hx; }
const BitMatrix& sector_stabilizers(const CssCode& c, Sector s) { return s == Sector::x_errors ? c.hx : c.hz; }
const BitVector& sector_logical(const CssCode& c, Sector s) {
  return s == Sector::x_errors ? c.logical_z[0] : c.logical_x[0];
}

BitVector bits(std::size_t n, std::uint64_t x) {
  BitVector v(n);
  for (std::size_t q = 0; q < n; ++q) v.set(q, (x >> q) & 1u);
  return v;
}

ClassicalCode best_code(std::size_t s) {
  Rng rng(derive_seed(kMaster, s));
  return search_best_code(LdpcSpec{3, 4, s}, 1000, rng);
}

// Best-of-1000 distances d_s for s = 2..8, computed once.
const DistanceTable& searched_distances() {
  static const DistanceTable table = [] {
    DistanceTable t;
    for (std::size_t s = 2; s <= 8; ++s) t[static_cast<long>(s)] = static_cast<long>(best_code(s).distance.value());
    return t;
  }();
  return table;
}

HierarchicalCode concatenated(std::size_t s, const SyndromeTable& tx, const SyndromeTable& tz) {
  const auto c = best_code(s);
  return make_hierarchical(hgp(c.h, c.h, "hgp_s" + std::to_string(s)), tx, tz, s);
}

// ---------------------------------------------------------------------------

Verdict css_validity() {
  std::size_t checked = 0, full_rank = 0;
  for (std::size_t s : {2, 3, 4}) {
    for (std::uint64_t i = 0; i < 50; ++i) {
      Rng rng(derive_seed(derive_seed(kMaster, 100 + s), i));
      const auto cc = make_classical_code(sample_regular_ldpc(LdpcSpec{3, 4, s}, rng), false);
      const auto q = hgp(cc.h, cc.h);
      if (!matmul(q.hx, q.hz.transpose()).is_zero()) return {false, fmt("s=%zu sample %llu: H_X H_Z^T != 0", s, (unsigned long long)i)};
      // Independent count: k = n - rank H_X - rank H_Z, against k_c^2 + (k_c^T)^2.
      const std::size_t k = q.n - rank(q.hx) - rank(q.hz);
      if (k != q.k || k != cc.k * cc.k + cc.k_transpose * cc.k_transpose) {
        return {false, fmt("s=%zu sample %llu: k=%zu, k_c=%zu, k_c^T=%zu", s, (unsigned long long)i, k, cc.k, cc.k_transpose)};
      }
      if (cc.k == s && cc.k_transpose == 0) {
        ++full_rank;
        if (k != s * s) return {false, fmt("s=%zu: k=%zu != s^2", s, k)};
      }
      ++checked;
    }
  }
  return {true, fmt("%zu codes commute; %zu with k_c=s, k_c^T=0 have k=s^2", checked, full_rank)};
}

Verdict construction_oracle() {
  const auto five = hgp(BitMatrix::from_rows({"11"}), BitMatrix::from_rows({"11"}));
  const auto chain = BitMatrix::from_rows({"110", "011"});
  const auto thirteen = hgp(chain, chain);
  const auto surf = rotated_surface(3);
  const std::size_t d5 = css_distance(five), d13 = css_distance(thirteen), ds = css_distance(surf);
  const bool ok = five.n == 5 && five.k == 1 && d5 == 2 && thirteen.n == 13 && thirteen.k == 1 && d13 == 3 &&
                  surf.n == 9 && surf.k == 1 && ds == 3;
  return {ok, fmt("[[%zu,%zu,%zu]], [[%zu,%zu,%zu]], rotated L=3 [[%zu,%zu,%zu]]", five.n, five.k, d5, thirteen.n,
                  thirteen.k, d13, surf.n, surf.k, ds)};
}

Verdict lookup_l3() {
  const auto code = rotated_surface(3);
  std::string worst;
  double max_rel = 0.0;
  for (auto sector : {Sector::x_errors, Sector::z_errors}) {
    const auto t = build_syndrome_table(code, sector);
    const auto& h = sector_checks(code, sector);
    const auto& logical = sector_logical(code, sector);
    // Re-derive the V_e / V_c weight enumerators from the definition.
    std::map<std::uint32_t, std::vector<std::uint64_t>> ve, vc;
    for (std::uint64_t x = 0; x < 512; ++x) {
      const auto e = bits(9, x);
      const auto syn = t.syndrome_to_mask(matvec(h, e));
      auto& bucket = logical.dot(e ^ t.correction(syn)) ? ve[syn] : vc[syn];
      bucket.resize(10, 0);
      bucket[e.weight()]++;
    }
    std::uint64_t total = 0;
    for (std::uint32_t syn = 0; syn < t.num_syndromes(); ++syn) {
      const auto te = t.error_counts(syn), tc = t.correct_counts(syn);
      ve[syn].resize(10, 0);
      vc[syn].resize(10, 0);
      for (std::size_t w = 0; w < 10; ++w) {
        if (te[w] != ve[syn][w] || tc[w] != vc[syn][w]) return {false, fmt("sector %s syndrome %u weight %zu", to_string(sector), syn, w)};
        total += te[w] + tc[w];
      }
    }
    if (total != 512) return {false, fmt("sector %s: counts sum to %llu", to_string(sector), (unsigned long long)total)};
    for (std::uint32_t syn : {0u, 1u, 5u, 10u, 15u}) {
      for (long double p : {0.01L, 0.1L}) {
        long double pe = 0, pv = 0;
        for (std::uint64_t x = 0; x < 512; ++x) {
          const auto e = bits(9, x);
          if (t.syndrome_to_mask(matvec(h, e)) != syn) continue;
          const auto w = static_cast<long double>(e.weight());
          const long double pr = std::pow(p, w) * std::pow(1.0L - p, 9.0L - w);
          pv += pr;
          if (logical.dot(e ^ t.correction(syn))) pe += pr;
        }
        const long double oracle = pe / pv;
        const long double got = conditional_logical_prob(t, syn, static_cast<double>(p)).value;
        const double rel = static_cast<double>(std::fabs(got - oracle) / oracle);
        if (rel > max_rel) {
          max_rel = rel;
          worst = fmt("sector %s syn %u p %.2f", to_string(sector), syn, static_cast<double>(p));
        }
      }
    }
  }
  return {max_rel < 1e-12, fmt("enumerators match, 512 per sector; max P_L rel. error %.2e (%s)", max_rel, worst.c_str())};
}

Verdict lookup_l5() {
  const auto code = rotated_surface(5);
  double seconds = 0;
  for (auto sector : {Sector::x_errors, Sector::z_errors}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto t = build_syndrome_table(code, sector);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::uint64_t total = 0;
    for (std::uint32_t syn = 0; syn < t.num_syndromes(); ++syn) {
      for (auto c : t.error_counts(syn)) total += c;
      for (auto c : t.correct_counts(syn)) total += c;
    }
    if (total != (std::uint64_t{1} << 25)) return {false, fmt("sector %s: counts sum to %llu", to_string(sector), (unsigned long long)total)};
    const auto& h = sector_checks(code, sector);
    const auto& stab = sector_stabilizers(code, sector);
    for (std::size_t a = 0; a <= 25; ++a) {
      for (std::size_t b = a; b <= 25; ++b) {
        BitVector e(25);
        if (a < 25) e.set(a, true);
        if (b < 25 && b != a) e.set(b, true);
        const auto residual = e ^ lookup_decode(t, matvec(h, e));
        if (!(residual.none() || in_rowspace(stab, residual))) {
          return {false, fmt("sector %s: weight-%zu error at (%zu,%zu) leaves a logical", to_string(sector), e.weight(), a, b)};
        }
      }
    }
  }
  return {seconds < 300, fmt("2 x 2^25 patterns in %.1f s; all weight <= 2 errors corrected", seconds)};
}

Verdict decoder_contract() {
  const auto c = best_code(2);
  const auto q = hgp(c.h, c.h);
  Rng rng(derive_seed(kMaster, 500));
  std::size_t trials = 0, satisfied = 0;
  for (const BitMatrix* h : {&q.hx, &q.hz}) {
    const BpOsdDecoder dec(*h, {});
    const std::vector<double> prior(q.n, 0.05);
    for (int t = 0; t < 5000; ++t) {
      BitVector e(q.n);
      for (std::size_t j = 0; j < q.n; ++j) e.set(j, uniform01(rng) < 0.5);
      const auto syn = matvec(*h, e);
      satisfied += matvec(*h, dec.decode(syn, prior).correction) == syn;
      ++trials;
    }
  }
  std::size_t singles = 0, good = 0;
  for (int sector = 0; sector < 2; ++sector) {
    const auto& h = sector == 0 ? q.hz : q.hx;
    const auto& stab = sector == 0 ? q.hx : q.hz;
    const BpOsdDecoder dec(h, {});
    const std::vector<double> prior(q.n, 0.05);
    for (std::size_t j = 0; j < q.n; ++j) {
      BitVector e(q.n);
      e.set(j, true);
      const auto r = e ^ dec.decode(matvec(h, e), prior).correction;
      good += r.none() || in_rowspace(stab, r);
      ++singles;
    }
  }
  return {satisfied == trials && good == singles,
          fmt("%zu/%zu syndromes satisfied; %zu/%zu single errors harmless", satisfied, trials, good, singles)};
}

Verdict pseudo_threshold_s2(const SyndromeTable& tx, const SyndromeTable& tz) {
  const auto code = concatenated(2, tx, tz);
  const std::vector<double> grid{0.06, 0.08, 0.10, 0.12, 0.15, 0.18};
  std::vector<std::pair<double, double>> curve;
  std::vector<double> se;
  std::string rates;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto est = estimate_logical_error_rate(code, grid[i], 100000, derive_seed(kMaster, 600 + i), DecodeMode::soft,
                                                 {}, g_workers);
    curve.emplace_back(grid[i], est.mean_rate);
    se.push_back(est.rate_std_error);
    rates += fmt(" %.3g", est.mean_rate);
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const double gap = curve[i + 1].second - curve[i].second;
    if (!(gap > 3.0 * std::hypot(se[i], se[i + 1]))) monotone = false;
  }
  const auto cross = pseudo_threshold(curve);
  const bool ok = cross && *cross >= 0.12 && *cross <= 0.19 && monotone;
  return {ok, fmt("crossing %s, strictly increasing at 3 sigma: %s; rates%s", cross ? fmt("%.4f", *cross).c_str() : "none",
                  monotone ? "yes" : "no", rates.c_str())};
}

Verdict soft_beats_hard(const SyndromeTable& tx, const SyndromeTable& tz) {
  const auto code = concatenated(3, tx, tz);
  const auto soft = estimate_logical_error_rate(code, 0.08, 100000, derive_seed(kMaster, 700), DecodeMode::soft, {}, g_workers);
  const auto hard = estimate_logical_error_rate(code, 0.08, 100000, derive_seed(kMaster, 700), DecodeMode::hard, {}, g_workers);
  const double sigma = std::hypot(soft.rate_std_error, hard.rate_std_error);
  const bool ok = hard.mean_rate - soft.mean_rate >= 3.0 * sigma;
  return {ok, fmt("soft %.3e, hard %.3e, gap %.1f sigma", soft.mean_rate, hard.mean_rate,
                  sigma > 0 ? (hard.mean_rate - soft.mean_rate) / sigma : 0.0)};
}

Verdict fit_round_trip() {
  std::vector<ResultRecord> rows;
  const std::uint64_t trials = 100000000000000000ULL;
  for (std::size_t s = 2; s <= 6; ++s) {
    const double alpha = 5.481 * std::pow(static_cast<double>(s), 0.667);
    for (double p : {0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.1, 0.13}) {
      ResultRecord r;
      r.s = s;
      r.mode = DecodeMode::soft;
      r.p = p;
      r.mean_rate = std::pow(p / 0.157, alpha);
      r.shots = trials;
      r.failures_any = static_cast<std::uint64_t>(r.mean_rate * static_cast<double>(trials));
      r.code_id = "synthetic";
      r.timestamp = "-";
      rows.push_back(r);
    }
  }
  const auto rep = fit_results(parse_results_csv(render_results_csv(rows)));
  double worst = 0;
  for (const auto& g : rep.groups) {
    const double alpha = 5.481 * std::pow(static_cast<double>(g.s), 0.667);
    worst = std::max(worst, std::fabs(g.fit.fit.alpha / alpha - 1.0));
  }
  const auto& law = rep.alpha_fits.at(DecodeMode::soft);
  const double eb = std::fabs(law.b / 5.481 - 1.0), ec = std::fabs(law.c / 0.667 - 1.0);
  return {worst <= 0.02 && eb <= 0.02 && ec <= 0.02,
          fmt("worst alpha error %.2e; b=%.4f c=%.4f", worst, law.b, law.c)};
}

Verdict crossover_numbers() {
  const double sa = s_approx(25, 5.481, 0.667);
  const auto soft = outperformance_conditions(DecodeMode::soft, 5, {}, 1e-2);
  const auto& distances = searched_distances();
  const auto h5 = outperformance_conditions(DecodeMode::hard, 5, {}, 1e-2, &distances);
  const auto h3 = outperformance_conditions(DecodeMode::hard, 3, {}, 1e-2, &distances);
  const bool ok = std::fabs(sa - 3.65) <= 0.01 && soft.s_min == 4 && soft.d_min == 25 && h5.d_s_min == 10 &&
                  h5.s_min == 7 && h3.d_s_min == 8 && h3.s_min == 4;
  auto opt = [](const std::optional<long>& v) { return v ? std::to_string(*v) : std::string("none"); };
  return {ok, fmt("s_approx=%.4f; soft s>=%s d>=%ld; hard L1=5 d_s>=%s s>=%s; L1=3 d_s>=%s s>=%s", sa,
                  opt(soft.s_min).c_str(), soft.d_min, opt(h5.d_s_min).c_str(), opt(h5.s_min).c_str(),
                  opt(h3.d_s_min).c_str(), opt(h3.s_min).c_str())};
}

Verdict distance_fit() {
  const auto& distances = searched_distances();
  std::vector<std::pair<double, double>> pts;
  std::string ds;
  for (long s : {2L, 3L, 4L}) {
    pts.emplace_back(static_cast<double>(s), static_cast<double>(distances.at(s)));
    ds += fmt(" d_%ld=%ld", s, distances.at(s));
  }
  const auto f = fit_power_law(pts);
  return {f.c >= 0.45 && f.c <= 0.85, fmt("exponent %.3f (b=%.3f) from%s", f.c, f.b, ds.c_str())};
}

Verdict uniform_limit(const SyndromeTable& tx, const SyndromeTable& tz) {
  const auto code = concatenated(2, tx, tz);
  const auto est = estimate_logical_error_rate(code, 0.5, 10000, derive_seed(kMaster, 1100), DecodeMode::soft, {}, g_workers);
  const double z = (est.mean_rate - 0.75) / est.rate_std_error;
  return {std::fabs(z) <= 5.0, fmt("rate %.5f +- %.5f (%.2f sigma from 3/4)", est.mean_rate, est.rate_std_error, z)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_workers = std::strtoul(argv[1], nullptr, 10);
  const auto surface = rotated_surface(5);
  const auto tx = build_syndrome_table(surface, Sector::x_errors);
  const auto tz = build_syndrome_table(surface, Sector::z_errors);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"CSS validity and parameters", css_validity},
      {"construction oracle", construction_oracle},
      {"lookup table exactness at L=3", lookup_l3},
      {"lookup table at L=5", lookup_l5},
      {"decoder contract", decoder_contract},
      {"pseudo-threshold of s=2", [&] { return pseudo_threshold_s2(tx, tz); }},
      {"soft beats hard at s=3", [&] { return soft_beats_hard(tx, tz); }},
      {"fit pipeline round trip", fit_round_trip},
      {"crossover numbers", crossover_numbers},
      {"distance fit exponent", distance_fit},
      {"uniform-noise limit", [&] { return uniform_limit(tx, tz); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%zu] %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
