#pragma once

// Code-capacity Monte Carlo for the two-level scheme: depolarizing noise on
// every lower-layer block, lookup decoding per block, then BP-OSD on the
// upper-layer code with either syndrome-conditioned (soft) or flat (hard)
// priors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qhier/bp_osd.hpp"
#include "qhier/codes.hpp"
#include "qhier/lookup.hpp"
#include "qhier/random.hpp"

namespace qhier {

enum class DecodeMode { soft, hard };

inline const char* to_string(DecodeMode m) { return m == DecodeMode::soft ? "soft" : "hard"; }

inline DecodeMode parse_mode(const std::string& s) {
  if (s == "soft") return DecodeMode::soft;
  if (s == "hard") return DecodeMode::hard;
  throw std::invalid_argument("unknown decode mode '" + s + "' (expected soft or hard)");
}

/// Per-sector marginal flip probability under depolarizing noise of strength p.
inline double sector_error_rate(double p) { return 2.0 * p / 3.0; }

struct PauliPattern {
  BitVector x_bits;
  BitVector z_bits;
};

namespace detail {
// One uniform draw per qubit; u < p selects X, Y, Z by the thirds of [0, p).
inline void sample_pauli(double u, double p, bool& x, bool& z) {
  x = z = false;
  if (u >= p) return;
  const double t = 3.0 * u / p;
  if (t < 1.0) {
    x = true;
  } else if (t < 2.0) {
    x = z = true;
  } else {
    z = true;
  }
}

inline void sample_block(Rng& rng, std::size_t n, double p, std::uint32_t& x_mask, std::uint32_t& z_mask) {
  x_mask = z_mask = 0;
  for (std::size_t q = 0; q < n; ++q) {
    bool x = false, z = false;
    sample_pauli(uniform01(rng), p, x, z);
    x_mask |= static_cast<std::uint32_t>(x) << q;
    z_mask |= static_cast<std::uint32_t>(z) << q;
  }
}
}  // namespace detail

/// i.i.d. depolarizing errors: identity w.p. 1 − p, otherwise X, Y or Z uniformly.
inline PauliPattern sample_depolarizing(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_depolarizing: p must be in [0, 1]");
  PauliPattern e{BitVector(n), BitVector(n)};
  for (std::size_t q = 0; q < n; ++q) {
    bool x = false, z = false;
    // p = 1 must never leave a qubit untouched; uniform01 < 1 guarantees it.
    detail::sample_pauli(uniform01(rng), p, x, z);
    e.x_bits.set(q, x);
    e.z_bits.set(q, z);
  }
  return e;
}

struct BlockOutcome {
  bool residual_x = false;  // block carries a logical X after lookup correction
  bool residual_z = false;
  double p_l_x = 0.0;  // P_L(2p/3 | observed X-error syndrome)
  double p_l_z = 0.0;
};

/// Lookup decoding of lower-layer blocks at a fixed physical error rate, with
/// P_L(p_eff | s) tabulated for every syndrome of both sectors.
class LowerLayer {
 public:
  LowerLayer(const SyndromeTable& x_table, const SyndromeTable& z_table, double p)
      : x_(&x_table), z_(&z_table), p_(p), p_eff_(sector_error_rate(p)) {
    if (x_table.sector() != Sector::x_errors || z_table.sector() != Sector::z_errors) {
      throw std::invalid_argument("lower layer: tables must be (x_errors, z_errors)");
    }
    if (x_table.n() != z_table.n()) throw std::invalid_argument("lower layer: table sizes differ");
    if (!(p >= 0.0 && p_eff_ < 0.5)) throw std::invalid_argument("lower layer: p must satisfy 0 <= 2p/3 < 1/2");
    px_.resize(x_table.num_syndromes());
    pz_.resize(z_table.num_syndromes());
    for (std::uint32_t s = 0; s < px_.size(); ++s) px_[s] = conditional_logical_prob(x_table, s, p_eff_).value;
    for (std::uint32_t s = 0; s < pz_.size(); ++s) pz_[s] = conditional_logical_prob(z_table, s, p_eff_).value;
    flat_x_ = average_logical_error_rate(x_table, p_eff_);
    flat_z_ = average_logical_error_rate(z_table, p_eff_);
  }

  [[nodiscard]] std::size_t block_size() const { return x_->n(); }
  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] double p_eff() const { return p_eff_; }
  /// Syndrome-averaged block logical error rates (hard-decision priors).
  [[nodiscard]] double flat_prior_x() const { return flat_x_; }
  [[nodiscard]] double flat_prior_z() const { return flat_z_; }
  [[nodiscard]] const SyndromeTable& x_table() const { return *x_; }
  [[nodiscard]] const SyndromeTable& z_table() const { return *z_; }

  [[nodiscard]] BlockOutcome decode(std::uint32_t x_mask, std::uint32_t z_mask) const {
    BlockOutcome out;
    const auto sx = x_->syndrome_of(x_mask);
    const auto sz = z_->syndrome_of(z_mask);
    out.residual_x = x_->logical_parity(x_mask ^ x_->correction_mask(sx));
    out.residual_z = z_->logical_parity(z_mask ^ z_->correction_mask(sz));
    out.p_l_x = px_[sx];
    out.p_l_z = pz_[sz];
    return out;
  }

 private:
  const SyndromeTable* x_;
  const SyndromeTable* z_;
  double p_;
  double p_eff_;
  std::vector<double> px_;
  std::vector<double> pz_;
  double flat_x_ = 0.0;
  double flat_z_ = 0.0;
};

/// Decodes one block error; probabilities use p_eff = 2p/3.
inline BlockOutcome decode_block(const SyndromeTable& x_table, const SyndromeTable& z_table, const PauliPattern& e,
                                 double p) {
  if (e.x_bits.size() != x_table.n() || e.z_bits.size() != z_table.n()) {
    throw std::invalid_argument("decode_block: block length mismatch");
  }
  BlockOutcome out;
  const double p_eff = sector_error_rate(p);
  const auto xm = x_table.vector_to_mask(e.x_bits);
  const auto zm = z_table.vector_to_mask(e.z_bits);
  const auto sx = x_table.syndrome_of(xm);
  const auto sz = z_table.syndrome_of(zm);
  out.residual_x = x_table.logical_parity(xm ^ x_table.correction_mask(sx));
  out.residual_z = z_table.logical_parity(zm ^ z_table.correction_mask(sz));
  out.p_l_x = conditional_logical_prob(x_table, sx, p_eff).value;
  out.p_l_z = conditional_logical_prob(z_table, sz, p_eff).value;
  return out;
}

/// Upper code on top of rotated-surface blocks: [[n_up·L², k_up, L·d_up]].
struct HierarchicalCode {
  CssCode upper;
  SyndromeTable x_table;
  SyndromeTable z_table;
  std::size_t s = 0;

  [[nodiscard]] std::size_t lower_n() const { return x_table.n(); }
  [[nodiscard]] std::size_t n() const { return upper.n * lower_n(); }
  [[nodiscard]] std::size_t k() const { return upper.k; }
  [[nodiscard]] Distance declared_distance() const {
    if (!upper.distance.is_finite()) return upper.distance;
    return Distance::finite(upper.distance.value() * x_table.distance());
  }
};

inline HierarchicalCode make_hierarchical(CssCode upper, SyndromeTable x_table, SyndromeTable z_table,
                                          std::size_t s) {
  if (x_table.sector() != Sector::x_errors || z_table.sector() != Sector::z_errors) {
    throw std::invalid_argument("hierarchical code: tables must be (x_errors, z_errors)");
  }
  if (x_table.n() != z_table.n()) throw std::invalid_argument("hierarchical code: table sizes differ");
  if (upper.k == 0) throw std::invalid_argument("hierarchical code: upper code encodes no qubits");
  return {std::move(upper), std::move(x_table), std::move(z_table), s};
}

struct ShotOutcome {
  std::vector<std::uint8_t> x_flipped;
  std::vector<std::uint8_t> z_flipped;
  std::size_t bp_nonconverged = 0;  // out of two upper-layer decodes
  std::size_t osd_used = 0;

  [[nodiscard]] std::size_t failed_qubits() const {
    std::size_t f = 0;
    for (std::size_t j = 0; j < x_flipped.size(); ++j) f += (x_flipped[j] | z_flipped[j]);
    return f;
  }
};

/// Shared decoding machinery for one (code, p, mode). Immutable after
/// construction; run_shot may be called concurrently.
class HierarchicalSimulator {
 public:
  HierarchicalSimulator(const HierarchicalCode& code, double p, DecodeMode mode, DecoderConfig cfg = {})
      : code_(&code),
        lower_(code.x_table, code.z_table, p),
        mode_(mode),
        x_decoder_(code.upper.hz, cfg),
        z_decoder_(code.upper.hx, cfg) {}

  [[nodiscard]] const LowerLayer& lower() const { return lower_; }
  [[nodiscard]] DecodeMode mode() const { return mode_; }

  /// Upper-layer decoding of per-block residual logicals with given priors.
  [[nodiscard]] ShotOutcome decode_upper(const BitVector& residual_x, const BitVector& residual_z,
                                         std::span<const double> prior_x, std::span<const double> prior_z) const {
    const auto& up = code_->upper;
    ShotOutcome out;
    out.x_flipped.assign(up.k, 0);
    out.z_flipped.assign(up.k, 0);

    const auto rx = x_decoder_.decode(matvec(up.hz, residual_x), prior_x);
    const auto rz = z_decoder_.decode(matvec(up.hx, residual_z), prior_z);
    const BitVector final_x = residual_x ^ rx.correction;
    const BitVector final_z = residual_z ^ rz.correction;
    for (std::size_t j = 0; j < up.k; ++j) {
      out.x_flipped[j] = up.logical_z[j].dot(final_x);
      out.z_flipped[j] = up.logical_x[j].dot(final_z);
    }
    out.bp_nonconverged = static_cast<std::size_t>(!rx.bp_converged) + static_cast<std::size_t>(!rz.bp_converged);
    out.osd_used = static_cast<std::size_t>(rx.used_osd) + static_cast<std::size_t>(rz.used_osd);
    return out;
  }

  /// Samples block errors and returns the residuals and priors that feed the upper layer.
  void sample_residuals(Rng& rng, BitVector& residual_x, BitVector& residual_z, std::vector<double>& prior_x,
                        std::vector<double>& prior_z) const {
    const std::size_t blocks = code_->upper.n;
    residual_x = BitVector(blocks);
    residual_z = BitVector(blocks);
    prior_x.resize(blocks);
    prior_z.resize(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      std::uint32_t xm = 0, zm = 0;
      detail::sample_block(rng, lower_.block_size(), lower_.p(), xm, zm);
      const auto o = lower_.decode(xm, zm);
      residual_x.set(b, o.residual_x);
      residual_z.set(b, o.residual_z);
      if (mode_ == DecodeMode::soft) {
        prior_x[b] = o.p_l_x;
        prior_z[b] = o.p_l_z;
      } else {
        prior_x[b] = lower_.flat_prior_x();
        prior_z[b] = lower_.flat_prior_z();
      }
    }
  }

  [[nodiscard]] ShotOutcome run_shot(Rng& rng) const {
    BitVector rx, rz;
    std::vector<double> px, pz;
    sample_residuals(rng, rx, rz, px, pz);
    return decode_upper(rx, rz, px, pz);
  }

 private:
  const HierarchicalCode* code_;
  LowerLayer lower_;
  DecodeMode mode_;
  BpOsdDecoder x_decoder_;  // X residuals against H_Z
  BpOsdDecoder z_decoder_;  // Z residuals against H_X
};

inline ShotOutcome run_shot(const HierarchicalCode& code, double p, Rng& rng, DecodeMode mode,
                            const DecoderConfig& cfg = {}) {
  return HierarchicalSimulator(code, p, mode, cfg).run_shot(rng);
}

struct ErrorRateEstimate {
  double p = 0.0;
  std::uint64_t shots = 0;
  std::vector<std::uint64_t> failures;  // per logical qubit: X or Z flipped
  std::uint64_t failures_any = 0;       // shots with at least one failed logical qubit
  double mean_rate = 0.0;               // Σ failures / (k · shots)
  double std_error = 0.0;               // binomial error of failures_any / shots
  double rate_std_error = 0.0;          // sample standard error of the per-shot failed fraction
  std::uint64_t seed = 0;
  DecodeMode mode = DecodeMode::soft;
  std::uint64_t bp_nonconverged = 0;  // upper-layer decodes (two per shot)
  std::uint64_t osd_used = 0;

  [[nodiscard]] double any_rate() const { return shots ? static_cast<double>(failures_any) / static_cast<double>(shots) : 0.0; }
  [[nodiscard]] double bp_nonconv_fraction() const {
    return shots ? static_cast<double>(bp_nonconverged) / (2.0 * static_cast<double>(shots)) : 0.0;
  }
  [[nodiscard]] double osd_fraction() const {
    return shots ? static_cast<double>(osd_used) / (2.0 * static_cast<double>(shots)) : 0.0;
  }
};

namespace detail {

struct ShotTally {
  std::vector<std::uint64_t> failures;
  std::uint64_t any = 0;
  double frac_sum = 0.0;
  double frac_sq_sum = 0.0;
  std::uint64_t bp_nonconverged = 0;
  std::uint64_t osd_used = 0;

  void add(const ShotOutcome& o) {
    const std::size_t k = o.x_flipped.size();
    if (failures.empty()) failures.assign(k, 0);
    std::size_t f = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const bool fail = o.x_flipped[j] | o.z_flipped[j];
      failures[j] += fail;
      f += fail;
    }
    any += f > 0;
    const double frac = static_cast<double>(f) / static_cast<double>(k);
    frac_sum += frac;
    frac_sq_sum += frac * frac;
    bp_nonconverged += o.bp_nonconverged;
    osd_used += o.osd_used;
  }
  void merge(const ShotTally& other) {
    if (failures.empty()) failures.assign(other.failures.size(), 0);
    for (std::size_t j = 0; j < other.failures.size(); ++j) failures[j] += other.failures[j];
    any += other.any;
    frac_sum += other.frac_sum;
    frac_sq_sum += other.frac_sq_sum;
    bp_nonconverged += other.bp_nonconverged;
    osd_used += other.osd_used;
  }
};

// Runs shot(i, rng) for i in [0, shots) with the stream of shot i derived from
// (seed, i), split over `workers` threads. Chunk tallies are merged in chunk
// order, so integer results do not depend on the worker count.
template <class ShotFn>
ShotTally run_shots(std::uint64_t shots, std::uint64_t seed, std::size_t workers, std::size_t k, ShotFn shot) {
  if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = static_cast<std::size_t>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(shots, 1)));
  std::vector<ShotTally> tallies(workers);
  for (auto& t : tallies) t.failures.assign(k, 0);
  auto body = [&](std::size_t w) {
    const std::uint64_t begin = shots * w / workers;
    const std::uint64_t end = shots * (w + 1) / workers;
    for (std::uint64_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(seed, i));
      tallies[w].add(shot(rng));
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }
  ShotTally total;
  total.failures.assign(k, 0);
  for (const auto& t : tallies) total.merge(t);
  return total;
}

inline ErrorRateEstimate finish_estimate(const ShotTally& t, double p, std::uint64_t shots, std::uint64_t seed,
                                         DecodeMode mode) {
  ErrorRateEstimate est;
  est.p = p;
  est.shots = shots;
  est.failures = t.failures;
  est.failures_any = t.any;
  est.seed = seed;
  est.mode = mode;
  est.bp_nonconverged = t.bp_nonconverged;
  est.osd_used = t.osd_used;
  const double n = static_cast<double>(shots);
  const double k = static_cast<double>(t.failures.size());
  std::uint64_t total = 0;
  for (auto f : t.failures) total += f;
  est.mean_rate = static_cast<double>(total) / (k * n);
  const double q = static_cast<double>(t.any) / n;
  est.std_error = std::sqrt(q * (1.0 - q) / n);
  const double mean = t.frac_sum / n;
  const double var = shots > 1 ? std::max(0.0, (t.frac_sq_sum - n * mean * mean) / (n - 1.0)) : 0.0;
  est.rate_std_error = std::sqrt(var / n);
  return est;
}

}  // namespace detail

inline ErrorRateEstimate estimate_logical_error_rate(const HierarchicalCode& code, double p, std::uint64_t shots,
                                                     std::uint64_t seed, DecodeMode mode,
                                                     const DecoderConfig& cfg = {}, std::size_t workers = 0) {
  if (shots < 1) throw std::invalid_argument("estimate_logical_error_rate: shots must be >= 1");
  const HierarchicalSimulator sim(code, p, mode, cfg);
  const auto tally = detail::run_shots(shots, seed, workers, code.k(), [&](Rng& rng) { return sim.run_shot(rng); });
  return detail::finish_estimate(tally, p, shots, seed, mode);
}

/// Single-layer baseline: lookup decoding of one rotated surface block.
inline ErrorRateEstimate simulate_surface_only(const SyndromeTable& x_table, const SyndromeTable& z_table, double p,
                                               std::uint64_t shots, std::uint64_t seed, std::size_t workers = 0) {
  if (shots < 1) throw std::invalid_argument("simulate_surface_only: shots must be >= 1");
  const LowerLayer lower(x_table, z_table, p);
  const auto tally = detail::run_shots(shots, seed, workers, 1, [&](Rng& rng) {
    std::uint32_t xm = 0, zm = 0;
    detail::sample_block(rng, lower.block_size(), p, xm, zm);
    const auto o = lower.decode(xm, zm);
    ShotOutcome s;
    s.x_flipped = {static_cast<std::uint8_t>(o.residual_x)};
    s.z_flipped = {static_cast<std::uint8_t>(o.residual_z)};
    return s;
  });
  return detail::finish_estimate(tally, p, shots, seed, DecodeMode::hard);
}

inline ErrorRateEstimate simulate_surface_only(std::size_t L, double p, std::uint64_t shots, std::uint64_t seed,
                                               std::size_t workers = 0) {
  if (L > 5) throw std::invalid_argument("simulate_surface_only: no lookup table beyond L = 5");
  const auto code = rotated_surface(L);
  const auto tx = build_syndrome_table(code, Sector::x_errors);
  const auto tz = build_syndrome_table(code, Sector::z_errors);
  return simulate_surface_only(tx, tz, p, shots, seed, workers);
}

}  // namespace qhier
