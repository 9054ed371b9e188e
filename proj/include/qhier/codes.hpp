#pragma once

// Classical regular LDPC sampling, hypergraph-product and rotated-surface CSS
// codes, logical operator bases and small-instance distances.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qhier/gf2.hpp"
#include "qhier/random.hpp"

namespace qhier {

/// Code distance, possibly formally infinite (empty kernel) or not computed.
class Distance {
 public:
  enum class Kind { finite, infinite, unknown };

  Distance() = default;
  static Distance finite(std::size_t d) { return Distance(Kind::finite, d); }
  static Distance infinite() { return Distance(Kind::infinite, 0); }
  static Distance unknown() { return Distance(Kind::unknown, 0); }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_finite() const { return kind_ == Kind::finite; }
  [[nodiscard]] bool is_infinite() const { return kind_ == Kind::infinite; }
  [[nodiscard]] bool is_known() const { return kind_ != Kind::unknown; }
  [[nodiscard]] std::size_t value() const {
    if (kind_ != Kind::finite) throw std::logic_error("distance is not finite");
    return value_;
  }

  friend bool operator==(const Distance&, const Distance&) = default;

  /// Minimum under the ordering finite < infinite; unknown is absorbing.
  friend Distance min(const Distance& a, const Distance& b) {
    if (!a.is_known() || !b.is_known()) return unknown();
    if (a.is_infinite()) return b;
    if (b.is_infinite()) return a;
    return finite(std::min(a.value_, b.value_));
  }

  [[nodiscard]] std::string to_string() const {
    switch (kind_) {
      case Kind::finite: return std::to_string(value_);
      case Kind::infinite: return "inf";
      default: return "unknown";
    }
  }

 private:
  Distance(Kind k, std::size_t v) : kind_(k), value_(v) {}
  Kind kind_ = Kind::unknown;
  std::size_t value_ = 0;
};

struct LdpcSpec {
  std::size_t col_weight = 3;
  std::size_t row_weight = 4;
  std::size_t size = 1;

  [[nodiscard]] std::size_t rows() const { return col_weight * size; }
  [[nodiscard]] std::size_t cols() const { return row_weight * size; }

  void validate() const {
    if (col_weight < 2) throw std::invalid_argument("ldpc spec: col_weight must be >= 2");
    if (row_weight <= col_weight) throw std::invalid_argument("ldpc spec: row_weight must exceed col_weight");
    if (size < 1) throw std::invalid_argument("ldpc spec: size must be >= 1");
  }
  friend bool operator==(const LdpcSpec&, const LdpcSpec&) = default;
};

struct ClassicalCode {
  BitMatrix h;
  std::size_t n_bits = 0;
  std::size_t k = 0;            // dim ker H
  std::size_t k_transpose = 0;  // dim ker H^T
  Distance distance;
  std::size_t sample_index = 0;  // position within the search that produced it
};

struct CssCode {
  std::size_t n = 0;
  std::size_t k = 0;
  BitMatrix hx;
  BitMatrix hz;
  std::vector<BitVector> logical_x;
  std::vector<BitVector> logical_z;
  Distance distance;
  std::string label;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kSamplerRetryLimit = 10000;
constexpr std::size_t kMaxEnumerationDim = 24;

/// Configuration-model sample of an (a·s)×(b·s) matrix with exact column weight
/// a and row weight b. The whole matching is redrawn whenever it contains a
/// repeated (row, column) incidence.
inline BitMatrix sample_regular_ldpc(const LdpcSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t rows = spec.rows();
  const std::size_t cols = spec.cols();
  const std::size_t edges = cols * spec.col_weight;
  std::vector<std::size_t> row_stubs(edges);
  for (std::size_t e = 0; e < edges; ++e) row_stubs[e] = e / spec.row_weight;

  for (std::size_t attempt = 0; attempt < kSamplerRetryLimit; ++attempt) {
    std::vector<std::size_t> perm = row_stubs;
    for (std::size_t i = edges; i > 1; --i) {
      std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
    }
    BitMatrix h(rows, cols);
    bool simple = true;
    for (std::size_t e = 0; e < edges && simple; ++e) {
      const std::size_t col = e / spec.col_weight;
      if (h.get(perm[e], col)) {
        simple = false;
      } else {
        h.set(perm[e], col, true);
      }
    }
    if (simple) return h;
  }
  throw GenerationError("regular LDPC sampler exceeded its retry limit");
}

/// Minimum weight over the nonzero elements of a span, by Gray-code enumeration.
inline Distance min_weight_of_span(const std::vector<BitVector>& basis) {
  if (basis.empty()) return Distance::infinite();
  if (basis.size() > kMaxEnumerationDim) {
    throw std::invalid_argument("distance enumeration bound exceeded (dimension " +
                                std::to_string(basis.size()) + ")");
  }
  BitVector acc(basis.front().size());
  std::size_t best = std::numeric_limits<std::size_t>::max();
  const std::uint64_t total = std::uint64_t{1} << basis.size();
  for (std::uint64_t i = 1; i < total; ++i) {
    acc ^= basis[static_cast<std::size_t>(std::countr_zero(i))];
    best = std::min(best, acc.weight());
  }
  return Distance::finite(best);
}

inline Distance classical_distance(const BitMatrix& h) { return min_weight_of_span(kernel_basis(h)); }

inline ClassicalCode make_classical_code(BitMatrix h, bool with_distance = true) {
  ClassicalCode code;
  const std::size_t r = rank(h);
  code.n_bits = h.cols();
  code.k = h.cols() - r;
  code.k_transpose = h.rows() - r;
  code.distance = with_distance ? classical_distance(h) : Distance::unknown();
  code.h = std::move(h);
  return code;
}

/// Best of `samples` random regular codes by classical distance. Among samples
/// sharing the maximum distance, a full-rank H (k^T = 0) is preferred, then
/// the first occurrence.
inline ClassicalCode search_best_code(const LdpcSpec& spec, std::size_t samples, Rng& rng) {
  spec.validate();
  if (samples < 1) throw std::invalid_argument("search_best_code: samples must be >= 1");
  std::optional<ClassicalCode> best;
  for (std::size_t i = 0; i < samples; ++i) {
    auto code = make_classical_code(sample_regular_ldpc(spec, rng));
    code.sample_index = i;
    if (!best) {
      best = std::move(code);
      continue;
    }
    const auto& bd = best->distance;
    const auto& cd = code.distance;
    const bool same = cd == bd;
    const bool better = (cd.is_infinite() && !bd.is_infinite()) ||
                        (cd.is_finite() && bd.is_finite() && cd.value() > bd.value()) ||
                        (same && code.k_transpose < best->k_transpose);
    if (better) best = std::move(code);
  }
  return std::move(*best);
}

/// Logical operator bases of a CSS code: X logicals span ker(H_Z) modulo the
/// rowspace of H_X (and symmetrically for Z), paired so that
/// logical_x[i]·logical_z[j] = δ_ij.
inline std::pair<std::vector<BitVector>, std::vector<BitVector>> logical_basis(const BitMatrix& hx,
                                                                               const BitMatrix& hz) {
  if (hx.cols() != hz.cols()) throw std::invalid_argument("logical_basis: H_X and H_Z widths differ");
  const std::size_t n = hx.cols();

  // Vectors from ker(other) that are independent of rowspace(same).
  auto quotient = [n](const BitMatrix& same, const BitMatrix& other) {
    IncrementalBasis span(n);
    for (std::size_t i = 0; i < same.rows(); ++i) span.insert(same.row(i));
    std::vector<BitVector> out;
    for (auto& v : kernel_basis(other)) {
      if (span.insert(v)) out.push_back(std::move(v));
    }
    return out;
  };
  auto xs = quotient(hx, hz);
  auto zs = quotient(hz, hx);
  if (xs.size() != zs.size()) throw std::logic_error("logical_basis: sector dimensions differ");

  const std::size_t k = xs.size();
  for (std::size_t i = 0; i < k; ++i) {
    bool found = false;
    for (std::size_t a = i; a < k && !found; ++a) {
      for (std::size_t b = i; b < k && !found; ++b) {
        if (xs[a].dot(zs[b])) {
          std::swap(xs[i], xs[a]);
          std::swap(zs[i], zs[b]);
          found = true;
        }
      }
    }
    if (!found) throw std::logic_error("logical_basis: degenerate symplectic form");
    for (std::size_t j = i + 1; j < k; ++j) {
      if (xs[j].dot(zs[i])) xs[j] ^= xs[i];
      if (xs[i].dot(zs[j])) zs[j] ^= zs[i];
    }
  }
  return {std::move(xs), std::move(zs)};
}

inline CssCode make_css_code(BitMatrix hx, BitMatrix hz, std::string label) {
  if (hx.cols() != hz.cols()) throw std::invalid_argument("CSS code: H_X and H_Z widths differ");
  if (!matmul(hx, hz.transpose()).is_zero()) throw std::invalid_argument("CSS code: H_X·H_Z^T != 0");
  CssCode code;
  code.n = hx.cols();
  code.k = code.n - rank(hx) - rank(hz);
  auto [lx, lz] = logical_basis(hx, hz);
  code.logical_x = std::move(lx);
  code.logical_z = std::move(lz);
  code.hx = std::move(hx);
  code.hz = std::move(hz);
  code.label = std::move(label);
  return code;
}

/// Hypergraph product:
///   H_X = [H1 ⊗ I_n2 | I_m1 ⊗ H2^T],  H_Z = [I_n1 ⊗ H2 | H1^T ⊗ I_m2].
/// The distance is filled from min(d1, d2, d1^T, d2^T) when every classical
/// kernel is small enough to enumerate.
inline CssCode hgp(const BitMatrix& h1, const BitMatrix& h2, std::string label = "hgp") {
  const std::size_t m1 = h1.rows(), n1 = h1.cols();
  const std::size_t m2 = h2.rows(), n2 = h2.cols();
  auto hx = hstack(kron(h1, BitMatrix::identity(n2)), kron(BitMatrix::identity(m1), h2.transpose()));
  auto hz = hstack(kron(BitMatrix::identity(n1), h2), kron(h1.transpose(), BitMatrix::identity(m2)));
  auto code = make_css_code(std::move(hx), std::move(hz), std::move(label));

  const std::vector<const BitMatrix*> parts{&h1, &h2};
  Distance d = Distance::infinite();
  bool enumerable = true;
  for (const auto* h : parts) {
    const std::size_t r = rank(*h);
    if (h->cols() - r > kMaxEnumerationDim || h->rows() - r > kMaxEnumerationDim) enumerable = false;
  }
  if (enumerable) {
    d = min(min(classical_distance(h1), classical_distance(h2)),
            min(classical_distance(h1.transpose()), classical_distance(h2.transpose())));
    code.distance = code.k == 0 ? Distance::infinite() : d;
  } else {
    code.distance = Distance::unknown();
  }
  return code;
}

/// Rotated surface code [[L², 1, L]]. Data qubit (r, c) has index r·L + c.
/// Plaquette (i, j), 0 ≤ i, j ≤ L, covers data qubits (i−1..i, j−1..j) that
/// exist; it is X-type when i + j is even. Bulk plaquettes are all kept;
/// weight-2 boundary plaquettes are kept on the left/right edges when X-type
/// and on the top/bottom edges when Z-type. Logical Z is the left column,
/// logical X the top row.
inline CssCode rotated_surface(std::size_t distance) {
  const std::size_t L = distance;
  if (L < 1 || L % 2 == 0) throw std::invalid_argument("rotated_surface: L must be odd and >= 1");
  const std::size_t n = L * L;
  std::vector<BitVector> xs, zs;
  for (std::size_t i = 0; i <= L; ++i) {
    for (std::size_t j = 0; j <= L; ++j) {
      const bool x_type = (i + j) % 2 == 0;
      const bool top_bottom = (i == 0 || i == L);
      const bool left_right = (j == 0 || j == L);
      if (top_bottom && left_right) continue;
      if (top_bottom && x_type) continue;
      if (left_right && !x_type) continue;
      BitVector check(n);
      for (std::size_t r = (i == 0 ? 0 : i - 1); r <= std::min(i, L - 1); ++r) {
        for (std::size_t c = (j == 0 ? 0 : j - 1); c <= std::min(j, L - 1); ++c) check.set(r * L + c, true);
      }
      (x_type ? xs : zs).push_back(std::move(check));
    }
  }
  CssCode code;
  code.n = n;
  code.k = 1;
  code.hx = BitMatrix::from_row_vectors(n, xs);
  code.hz = BitMatrix::from_row_vectors(n, zs);
  BitVector lz(n), lx(n);
  for (std::size_t r = 0; r < L; ++r) lz.set(r * L, true);
  for (std::size_t c = 0; c < L; ++c) lx.set(c, true);
  code.logical_x = {lx};
  code.logical_z = {lz};
  code.distance = Distance::finite(L);
  code.label = "rotated_surface_L" + std::to_string(L);
  return code;
}

/// Result of a bounded minimum-weight logical search. When `exact` is false,
/// no logical operator of weight ≤ w_max exists and `value` = w_max + 1 is a
/// lower bound.
struct DistanceSearch {
  std::size_t value = 0;
  bool exact = false;
  friend bool operator==(const DistanceSearch&, const DistanceSearch&) = default;
};

namespace detail {

// Packs each column of `checks` plus its parities against `logicals` into one
// bit vector so that a single XOR accumulates both syndrome and logical action.
inline std::vector<BitVector> column_signatures(const BitMatrix& checks, const std::vector<BitVector>& logicals) {
  const std::size_t width = checks.rows() + logicals.size();
  std::vector<BitVector> out(checks.cols(), BitVector(width));
  for (std::size_t q = 0; q < checks.cols(); ++q) {
    for (std::size_t r = 0; r < checks.rows(); ++r) {
      if (checks.get(r, q)) out[q].set(r, true);
    }
    for (std::size_t l = 0; l < logicals.size(); ++l) {
      if (logicals[l].get(q)) out[q].set(checks.rows() + l, true);
    }
  }
  return out;
}

// True if some weight-w subset of columns has zero syndrome and nonzero logical action.
inline bool has_logical_of_weight(const std::vector<BitVector>& sig, std::size_t n_checks, std::size_t w) {
  if (sig.empty() || w == 0) return false;
  const std::size_t n = sig.size();
  const std::size_t stride = sig.front().words().size();
  std::vector<std::uint64_t> acc((w + 1) * stride, 0);
  // Mask selecting the syndrome part of each word.
  std::vector<std::uint64_t> syn_mask(stride, 0);
  for (std::size_t b = 0; b < n_checks; ++b) syn_mask[b / 64] |= std::uint64_t{1} << (b % 64);

  std::vector<std::size_t> idx(w + 1, 0);
  std::size_t depth = 0;
  idx[0] = 0;
  while (true) {
    if (idx[depth] + (w - depth) > n) {
      if (depth == 0) return false;
      --depth;
      ++idx[depth];
      continue;
    }
    const auto src = sig[idx[depth]].words();
    const std::uint64_t* prev = acc.data() + depth * stride;
    std::uint64_t* cur = acc.data() + (depth + 1) * stride;
    for (std::size_t k = 0; k < stride; ++k) cur[k] = prev[k] ^ src[k];
    if (depth + 1 == w) {
      bool syndrome_zero = true;
      bool logical = false;
      for (std::size_t k = 0; k < stride; ++k) {
        if (cur[k] & syn_mask[k]) syndrome_zero = false;
        if (cur[k] & ~syn_mask[k]) logical = true;
      }
      if (syndrome_zero && logical) return true;
      ++idx[depth];
    } else {
      idx[depth + 1] = idx[depth] + 1;
      ++depth;
    }
  }
}

}  // namespace detail

/// Minimum weight of a Pauli that commutes with every check but acts
/// nontrivially on some logical qubit, searched over both sectors up to w_max.
inline DistanceSearch quantum_distance_bruteforce(const CssCode& code, std::size_t w_max) {
  if (code.n > 30 && w_max > 4) {
    throw std::invalid_argument("quantum_distance_bruteforce: instance too large for the requested bound");
  }
  if (code.k == 0) return {w_max + 1, false};
  const auto x_sig = detail::column_signatures(code.hz, code.logical_z);  // X-type operators
  const auto z_sig = detail::column_signatures(code.hx, code.logical_x);  // Z-type operators
  for (std::size_t w = 1; w <= std::min(w_max, code.n); ++w) {
    if (detail::has_logical_of_weight(x_sig, code.hz.rows(), w) ||
        detail::has_logical_of_weight(z_sig, code.hx.rows(), w)) {
      return {w, true};
    }
  }
  return {w_max + 1, false};
}

inline bool is_valid_css(const CssCode& code) {
  if (!matmul(code.hx, code.hz.transpose()).is_zero()) return false;
  if (code.k != code.n - rank(code.hx) - rank(code.hz)) return false;
  if (code.logical_x.size() != code.k || code.logical_z.size() != code.k) return false;
  for (std::size_t i = 0; i < code.k; ++i) {
    for (std::size_t j = 0; j < code.k; ++j) {
      if (code.logical_x[i].dot(code.logical_z[j]) != (i == j)) return false;
    }
    if (matvec(code.hz, code.logical_x[i]).any()) return false;
    if (matvec(code.hx, code.logical_z[i]).any()) return false;
  }
  return true;
}

}  // namespace qhier
