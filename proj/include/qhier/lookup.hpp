#pragma once

// Exhaustive lookup-table decoder for small k = 1 CSS codes (rotated surface
// codes up to L = 5), with exact syndrome-conditioned logical error
// probabilities.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qhier/codes.hpp"
#include "qhier/gf2.hpp"
#include "qhier/io.hpp"

namespace qhier {

/// Which Pauli component is being decoded. X errors are detected by the Z
/// checks and flip logical Z; Z errors by the X checks and flip logical X.
enum class Sector : std::uint8_t { x_errors = 0, z_errors = 1 };

inline const char* to_string(Sector s) { return s == Sector::x_errors ? "x" : "z"; }

constexpr std::size_t kMaxTableQubits = 25;

struct ConditionalErrorProb {
  double p_eff = 0.0;
  double value = 0.0;
};

class SyndromeTable {
 public:
  using Mask = std::uint32_t;

  [[nodiscard]] std::size_t distance() const { return L_; }
  [[nodiscard]] Sector sector() const { return sector_; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t n_checks() const { return n_checks_; }
  [[nodiscard]] std::size_t num_syndromes() const { return std::size_t{1} << n_checks_; }

  /// Syndrome (bit j = check j) produced by the error pattern `mask` (bit q = qubit q).
  [[nodiscard]] Mask syndrome_of(Mask mask) const {
    Mask s = 0;
    while (mask) {
      s ^= column_syndromes_[static_cast<std::size_t>(std::countr_zero(mask))];
      mask &= mask - 1;
    }
    return s;
  }
  /// Parity of `mask` against the opposite-type logical operator.
  [[nodiscard]] bool logical_parity(Mask mask) const { return std::popcount(mask & logical_mask_) & 1; }

  [[nodiscard]] Mask correction_mask(Mask syndrome) const { return correction_[syndrome]; }
  [[nodiscard]] bool correction_parity(Mask syndrome) const { return correction_parity_[syndrome] != 0; }
  [[nodiscard]] BitVector correction(Mask syndrome) const { return mask_to_vector(correction_[syndrome]); }

  /// counts(s, parity)[w]: patterns with syndrome s, raw logical parity `parity`, weight w.
  [[nodiscard]] std::span<const std::uint64_t> counts(Mask syndrome, bool parity) const {
    return {counts_.data() + (static_cast<std::size_t>(syndrome) * 2 + parity) * (n_ + 1), n_ + 1};
  }
  /// Weight enumerator of V_e(s): patterns whose residual after correction is a logical.
  [[nodiscard]] std::span<const std::uint64_t> error_counts(Mask syndrome) const {
    return counts(syndrome, !correction_parity(syndrome));
  }
  /// Weight enumerator of V_c(s).
  [[nodiscard]] std::span<const std::uint64_t> correct_counts(Mask syndrome) const {
    return counts(syndrome, correction_parity(syndrome));
  }

  [[nodiscard]] const std::vector<Mask>& column_syndromes() const { return column_syndromes_; }
  [[nodiscard]] Mask logical_mask() const { return logical_mask_; }

  [[nodiscard]] BitVector mask_to_vector(Mask m) const {
    BitVector v(n_);
    for (std::size_t q = 0; q < n_; ++q) {
      if ((m >> q) & 1U) v.set(q, true);
    }
    return v;
  }
  [[nodiscard]] Mask vector_to_mask(const BitVector& v) const {
    if (v.size() != n_) throw std::invalid_argument("pattern length mismatch");
    return static_cast<Mask>(v.words().empty() ? 0 : v.words()[0]);
  }
  [[nodiscard]] Mask syndrome_to_mask(const BitVector& s) const {
    if (s.size() != n_checks_) throw std::invalid_argument("syndrome length mismatch");
    return static_cast<Mask>(s.words().empty() ? 0 : s.words()[0]);
  }

  friend bool operator==(const SyndromeTable&, const SyndromeTable&) = default;

 private:
  friend SyndromeTable build_syndrome_table(const CssCode&, Sector);
  friend SyndromeTable deserialize_table(std::string_view);
  friend void attach_checks(SyndromeTable&, const CssCode&);

  std::size_t L_ = 0;
  Sector sector_ = Sector::x_errors;
  std::size_t n_ = 0;
  std::size_t n_checks_ = 0;
  std::vector<Mask> column_syndromes_;
  Mask logical_mask_ = 0;
  std::vector<Mask> correction_;
  std::vector<std::uint8_t> correction_parity_;
  std::vector<std::uint64_t> counts_;
};

namespace detail {

inline std::size_t square_side(std::size_t n) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? r : 0;
}

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

inline void attach_checks(SyndromeTable& t, const CssCode& code) {
  const BitMatrix& checks = t.sector_ == Sector::x_errors ? code.hz : code.hx;
  const BitVector& logical = t.sector_ == Sector::x_errors ? code.logical_z.at(0) : code.logical_x.at(0);
  t.column_syndromes_.assign(code.n, 0);
  for (std::size_t q = 0; q < code.n; ++q) {
    for (std::size_t r = 0; r < checks.rows(); ++r) {
      if (checks.get(r, q)) t.column_syndromes_[q] |= SyndromeTable::Mask{1} << r;
    }
  }
  t.logical_mask_ = 0;
  for (std::size_t q = 0; q < code.n; ++q) {
    if (logical.get(q)) t.logical_mask_ |= SyndromeTable::Mask{1} << q;
  }
}

/// Classifies all 2^n error patterns of one sector by syndrome, raw logical
/// parity and weight, and picks the minimum-weight representative of each
/// syndrome (lexicographically smallest bit string among ties).
inline SyndromeTable build_syndrome_table(const CssCode& code, Sector sector) {
  if (code.k != 1) throw std::invalid_argument("build_syndrome_table: code must encode exactly one qubit");
  if (code.n > kMaxTableQubits) throw std::invalid_argument("build_syndrome_table: n too large to enumerate");
  const BitMatrix& checks = sector == Sector::x_errors ? code.hz : code.hx;
  if (rank(checks) != checks.rows()) {
    throw std::invalid_argument("build_syndrome_table: check matrix must have independent rows");
  }

  SyndromeTable t;
  t.L_ = detail::square_side(code.n);
  t.sector_ = sector;
  t.n_ = code.n;
  t.n_checks_ = checks.rows();
  attach_checks(t, code);

  const std::size_t n = t.n_;
  const std::size_t stride = n + 1;
  const std::size_t syndromes = t.num_syndromes();
  t.counts_.assign(syndromes * 2 * stride, 0);
  std::vector<std::uint8_t> min_weight(syndromes, std::numeric_limits<std::uint8_t>::max());
  std::vector<std::uint32_t> best_key(syndromes, 0);
  t.correction_.assign(syndromes, 0);

  const auto* colsyn = t.column_syndromes_.data();
  auto* counts = t.counts_.data();
  std::uint32_t mask = 0;
  std::uint32_t key = 0;
  std::uint32_t syn = 0;
  std::uint32_t par = 0;
  std::size_t w = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 0;;) {
    counts[(static_cast<std::size_t>(syn) * 2 + par) * stride + w] += 1;
    if (w <= min_weight[syn] && (w < min_weight[syn] || key < best_key[syn])) {
      min_weight[syn] = static_cast<std::uint8_t>(w);
      best_key[syn] = key;
      t.correction_[syn] = mask;
    }
    if (++i == total) break;
    const auto bit = static_cast<unsigned>(std::countr_zero(i));
    mask ^= std::uint32_t{1} << bit;
    key ^= std::uint32_t{1} << (n - 1 - bit);
    syn ^= colsyn[bit];
    par ^= (t.logical_mask_ >> bit) & 1U;
    w = (mask >> bit) & 1U ? w + 1 : w - 1;
  }

  t.correction_parity_.resize(syndromes);
  for (std::size_t s = 0; s < syndromes; ++s) {
    t.correction_parity_[s] = t.logical_parity(t.correction_[s]) ? 1 : 0;
  }
  return t;
}

/// Minimum-weight correction for a syndrome.
inline BitVector lookup_decode(const SyndromeTable& table, const BitVector& syndrome) {
  return table.correction(table.syndrome_to_mask(syndrome));
}

/// P_L(p|s) = P_e / (P_e + P_c), each class weighted by p^w (1-p)^(n-w).
/// Evaluated as a ratio of polynomials in r = p/(1-p), normalised by the
/// lowest occupied weight so the p → 0 limit is exact.
inline ConditionalErrorProb conditional_logical_prob(const SyndromeTable& table, std::uint32_t syndrome,
                                                     double p_eff) {
  if (!(p_eff >= 0.0 && p_eff < 0.5)) throw std::invalid_argument("conditional_logical_prob: p_eff must be in [0, 1/2)");
  if (syndrome >= table.num_syndromes()) throw std::invalid_argument("conditional_logical_prob: syndrome out of range");
  const auto err = table.error_counts(syndrome);
  const auto cor = table.correct_counts(syndrome);
  std::size_t lowest = 0;
  while (lowest < err.size() && err[lowest] == 0 && cor[lowest] == 0) ++lowest;
  const long double r = static_cast<long double>(p_eff) / (1.0L - static_cast<long double>(p_eff));
  long double num = 0.0L;
  long double den = 0.0L;
  for (std::size_t w = err.size(); w-- > lowest;) {
    num = num * r + static_cast<long double>(err[w]);
    den = den * r + static_cast<long double>(err[w] + cor[w]);
  }
  return {p_eff, static_cast<double>(num / den)};
}

inline ConditionalErrorProb conditional_logical_prob(const SyndromeTable& table, const BitVector& syndrome,
                                                     double p_eff) {
  return conditional_logical_prob(table, table.syndrome_to_mask(syndrome), p_eff);
}

/// Probability of observing syndrome s when each qubit flips with p_eff.
inline double syndrome_probability(const SyndromeTable& table, std::uint32_t syndrome, double p_eff) {
  long double total = 0.0L;
  const long double p = p_eff;
  for (int parity = 0; parity < 2; ++parity) {
    const auto c = table.counts(syndrome, parity != 0);
    for (std::size_t w = 0; w < c.size(); ++w) {
      if (c[w] == 0) continue;
      total += static_cast<long double>(c[w]) * std::pow(p, static_cast<long double>(w)) *
               std::pow(1.0L - p, static_cast<long double>(table.n() - w));
    }
  }
  return static_cast<double>(total);
}

/// Unconditioned logical failure rate of the lookup decoder: Σ_s Pr(s)·P_L(p|s).
inline double average_logical_error_rate(const SyndromeTable& table, double p_eff) {
  long double total = 0.0L;
  const long double p = p_eff;
  for (std::uint32_t s = 0; s < table.num_syndromes(); ++s) {
    const auto err = table.error_counts(s);
    for (std::size_t w = 0; w < err.size(); ++w) {
      if (err[w] == 0) continue;
      total += static_cast<long double>(err[w]) * std::pow(p, static_cast<long double>(w)) *
               std::pow(1.0L - p, static_cast<long double>(table.n() - w));
    }
  }
  return static_cast<double>(total);
}

/// Checks the table invariants; returns an empty string when they all hold.
inline std::string table_invariant_violation(const SyndromeTable& t) {
  long double grand = 0;
  for (std::uint32_t s = 0; s < t.num_syndromes(); ++s) {
    if (t.syndrome_of(t.correction_mask(s)) != s) return "correction does not reproduce syndrome " + std::to_string(s);
    if (t.logical_parity(t.correction_mask(s)) != t.correction_parity(s)) return "correction parity mismatch";
    std::size_t min_cor = t.n() + 1, min_err = t.n() + 1;
    for (std::size_t w = 0; w <= t.n(); ++w) {
      const auto c = t.correct_counts(s)[w];
      const auto e = t.error_counts(s)[w];
      if (c + e > detail::binomial(t.n(), w)) return "count exceeds binomial bound";
      if (c && min_cor > t.n()) min_cor = w;
      if (e && min_err > t.n()) min_err = w;
      grand += static_cast<long double>(c + e);
    }
    if (min_cor > min_err) return "correction is not minimum weight for syndrome " + std::to_string(s);
    if (static_cast<std::size_t>(std::popcount(t.correction_mask(s))) != min_cor) {
      return "correction weight disagrees with weight enumerator";
    }
  }
  if (grand != std::ldexp(1.0L, static_cast<int>(t.n()))) return "counts do not sum to 2^n";
  return {};
}

// Binary cache layout (little-endian):
//   "QHLT" | u16 version | u8 L | u8 sector | u16 n | u16 n_checks
//   per syndrome, ascending: e_p in ceil(n/8) bytes (qubit i -> byte i/8, bit 7 - i%8),
//                            u8 e_p parity, 2·(n+1) u64 counts (parity 0 then 1)
//   u64 FNV-1a checksum of every preceding byte.
constexpr std::uint16_t kTableFormatVersion = 1;

namespace detail {
inline void put_le(std::string& out, std::uint64_t v, std::size_t bytes) {
  for (std::size_t i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint64_t get_le(std::string_view in, std::size_t& pos, std::size_t bytes) {
  if (pos + bytes > in.size()) throw ArtifactError("table file truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += bytes;
  return v;
}
}  // namespace detail

inline std::string serialize_table(const SyndromeTable& t) {
  std::string out = "QHLT";
  detail::put_le(out, kTableFormatVersion, 2);
  detail::put_le(out, t.distance(), 1);
  detail::put_le(out, static_cast<std::uint8_t>(t.sector()), 1);
  detail::put_le(out, t.n(), 2);
  detail::put_le(out, t.n_checks(), 2);
  const std::size_t mask_bytes = (t.n() + 7) / 8;
  for (std::uint32_t s = 0; s < t.num_syndromes(); ++s) {
    std::string packed(mask_bytes, '\0');
    const auto m = t.correction_mask(s);
    for (std::size_t q = 0; q < t.n(); ++q) {
      if ((m >> q) & 1U) packed[q / 8] = static_cast<char>(packed[q / 8] | (1 << (7 - q % 8)));
    }
    out += packed;
    detail::put_le(out, t.correction_parity(s) ? 1 : 0, 1);
    for (int parity = 0; parity < 2; ++parity) {
      for (auto c : t.counts(s, parity != 0)) detail::put_le(out, c, 8);
    }
  }
  detail::put_le(out, fnv1a64(out), 8);
  return out;
}

inline std::uint64_t table_checksum(const SyndromeTable& t) {
  const auto bytes = serialize_table(t);
  std::size_t pos = bytes.size() - 8;
  return detail::get_le(bytes, pos, 8);
}

/// Parses and validates a cached table. The check matrices are rebuilt from
/// rotated_surface(L), so only rotated-surface tables can be cached.
inline SyndromeTable deserialize_table(std::string_view bytes) {
  if (bytes.size() < 12 + 8) throw ArtifactError("table file truncated");
  if (bytes.substr(0, 4) != "QHLT") throw ArtifactError("table file: bad magic");
  std::size_t pos = 4;
  const auto version = detail::get_le(bytes, pos, 2);
  if (version != kTableFormatVersion) throw ArtifactError("table file: unsupported version " + std::to_string(version));
  SyndromeTable t;
  t.L_ = detail::get_le(bytes, pos, 1);
  const auto sector = detail::get_le(bytes, pos, 1);
  if (sector > 1) throw ArtifactError("table file: bad sector");
  t.sector_ = static_cast<Sector>(sector);
  t.n_ = detail::get_le(bytes, pos, 2);
  t.n_checks_ = detail::get_le(bytes, pos, 2);
  if (t.L_ == 0 || t.L_ % 2 == 0 || t.n_ != t.L_ * t.L_ || t.n_ > kMaxTableQubits || t.n_checks_ != (t.n_ - 1) / 2) {
    throw ArtifactError("table file: header fields inconsistent with a rotated surface code");
  }
  const std::size_t mask_bytes = (t.n_ + 7) / 8;
  const std::size_t record = mask_bytes + 1 + 2 * (t.n_ + 1) * 8;
  const std::size_t expected = 12 + t.num_syndromes() * record + 8;
  if (bytes.size() != expected) {
    throw ArtifactError("table file: payload length " + std::to_string(bytes.size()) + " does not match header (expected " +
                        std::to_string(expected) + ")");
  }
  std::size_t cpos = expected - 8;
  if (detail::get_le(bytes, cpos, 8) != fnv1a64(bytes.substr(0, expected - 8))) {
    throw ArtifactError("table file: checksum mismatch");
  }
  const auto syndromes = t.num_syndromes();
  t.correction_.resize(syndromes);
  t.correction_parity_.resize(syndromes);
  t.counts_.resize(syndromes * 2 * (t.n_ + 1));
  for (std::size_t s = 0; s < syndromes; ++s) {
    SyndromeTable::Mask m = 0;
    for (std::size_t q = 0; q < t.n_; ++q) {
      if ((static_cast<unsigned char>(bytes[pos + q / 8]) >> (7 - q % 8)) & 1U) m |= SyndromeTable::Mask{1} << q;
    }
    pos += mask_bytes;
    t.correction_[s] = m;
    t.correction_parity_[s] = static_cast<std::uint8_t>(detail::get_le(bytes, pos, 1));
    for (std::size_t c = 0; c < 2 * (t.n_ + 1); ++c) t.counts_[s * 2 * (t.n_ + 1) + c] = detail::get_le(bytes, pos, 8);
  }
  attach_checks(t, rotated_surface(t.L_));
  if (auto why = table_invariant_violation(t); !why.empty()) throw ArtifactError("table file: " + why);
  return t;
}

inline void save_table(const SyndromeTable& t, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_table(t));
}

inline SyndromeTable load_table(const std::filesystem::path& path) { return deserialize_table(read_file(path)); }

}  // namespace qhier
