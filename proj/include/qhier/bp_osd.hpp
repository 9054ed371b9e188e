#pragma once

// Sum-product belief propagation with syndrome-adjusted checks, followed by
// combination-sweep ordered-statistics post-processing when BP does not
// reproduce the syndrome.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "qhier/gf2.hpp"

namespace qhier {

struct DecoderConfig {
  std::size_t max_iterations = 32;
  std::size_t osd_depth = 10;  // λ
  double llr_clip = 30.0;

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("decoder config: max_iterations must be >= 1");
    if (!(llr_clip > 0.0)) throw std::invalid_argument("decoder config: llr_clip must be > 0");
  }
  friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

/// Probabilities handed to the decoder are clamped to [floor, 1 - floor].
constexpr double kPriorFloor = 1e-9;

inline double clamp_probability(double p) { return std::clamp(p, kPriorFloor, 1.0 - kPriorFloor); }

/// Bipartite graph of a parity-check matrix. Edges are numbered check-major.
class TannerGraph {
 public:
  TannerGraph() = default;
  explicit TannerGraph(const BitMatrix& h) : num_vars_(h.cols()), num_checks_(h.rows()) {
    check_offsets_.push_back(0);
    std::vector<std::size_t> var_degree(num_vars_, 0);
    for (std::size_t c = 0; c < num_checks_; ++c) {
      for (std::size_t v = 0; v < num_vars_; ++v) {
        if (h.get(c, v)) {
          edge_var_.push_back(static_cast<std::uint32_t>(v));
          edge_check_.push_back(static_cast<std::uint32_t>(c));
          ++var_degree[v];
        }
      }
      check_offsets_.push_back(edge_var_.size());
    }
    var_offsets_.assign(num_vars_ + 1, 0);
    for (std::size_t v = 0; v < num_vars_; ++v) var_offsets_[v + 1] = var_offsets_[v] + var_degree[v];
    var_edges_.resize(edge_var_.size());
    std::vector<std::size_t> fill(var_offsets_.begin(), var_offsets_.end() - 1);
    for (std::size_t e = 0; e < edge_var_.size(); ++e) var_edges_[fill[edge_var_[e]]++] = static_cast<std::uint32_t>(e);
  }

  [[nodiscard]] std::size_t num_vars() const { return num_vars_; }
  [[nodiscard]] std::size_t num_checks() const { return num_checks_; }
  [[nodiscard]] std::size_t num_edges() const { return edge_var_.size(); }

  [[nodiscard]] std::size_t check_degree(std::size_t c) const { return check_offsets_[c + 1] - check_offsets_[c]; }
  [[nodiscard]] std::size_t var_degree(std::size_t v) const { return var_offsets_[v + 1] - var_offsets_[v]; }
  [[nodiscard]] std::size_t check_edge_begin(std::size_t c) const { return check_offsets_[c]; }
  [[nodiscard]] std::size_t check_edge_end(std::size_t c) const { return check_offsets_[c + 1]; }
  [[nodiscard]] std::size_t edge_var(std::size_t e) const { return edge_var_[e]; }
  [[nodiscard]] std::size_t edge_check(std::size_t e) const { return edge_check_[e]; }
  /// Edge ids incident to variable v.
  [[nodiscard]] std::span<const std::uint32_t> var_edges(std::size_t v) const {
    return {var_edges_.data() + var_offsets_[v], var_degree(v)};
  }

  [[nodiscard]] bool satisfies(const BitVector& x, const BitVector& syndrome) const {
    for (std::size_t c = 0; c < num_checks_; ++c) {
      bool parity = false;
      for (std::size_t e = check_offsets_[c]; e < check_offsets_[c + 1]; ++e) parity ^= x.get(edge_var_[e]);
      if (parity != syndrome.get(c)) return false;
    }
    return true;
  }

 private:
  std::size_t num_vars_ = 0;
  std::size_t num_checks_ = 0;
  std::vector<std::size_t> check_offsets_;
  std::vector<std::uint32_t> edge_var_;
  std::vector<std::uint32_t> edge_check_;
  std::vector<std::size_t> var_offsets_;
  std::vector<std::uint32_t> var_edges_;
};

struct BpResult {
  std::vector<double> posteriors;  // probability each variable is flipped
  BitVector hard_decision;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Flooding-schedule sum-product in LLR form. Stops as soon as the hard
/// decision reproduces the syndrome.
inline BpResult bp_decode(const TannerGraph& g, const BitVector& syndrome, std::span<const double> priors,
                          const DecoderConfig& cfg) {
  if (syndrome.size() != g.num_checks()) throw std::invalid_argument("bp_decode: syndrome length mismatch");
  if (priors.size() != g.num_vars()) throw std::invalid_argument("bp_decode: prior length mismatch");
  const double clip = cfg.llr_clip;
  auto clamp_llr = [clip](double x) { return std::clamp(x, -clip, clip); };

  const std::size_t n = g.num_vars();
  std::vector<double> prior_llr(n);
  for (std::size_t v = 0; v < n; ++v) {
    const double p = clamp_probability(priors[v]);
    prior_llr[v] = clamp_llr(std::log((1.0 - p) / p));
  }
  std::vector<double> v2c(g.num_edges());
  std::vector<double> c2v(g.num_edges(), 0.0);
  std::vector<double> t(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) v2c[e] = prior_llr[g.edge_var(e)];

  BpResult out;
  out.posteriors.assign(n, 0.0);
  out.hard_decision = BitVector(n);
  std::vector<double> total(n);
  constexpr double kMaxTanh = 1.0 - 1e-15;

  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    for (std::size_t c = 0; c < g.num_checks(); ++c) {
      const std::size_t b = g.check_edge_begin(c);
      const std::size_t end = g.check_edge_end(c);
      if (b == end) continue;
      for (std::size_t e = b; e < end; ++e) t[e] = std::tanh(0.5 * v2c[e]);
      // Leave-one-out products via a forward pass and a backward pass.
      double prefix = 1.0;
      for (std::size_t e = b; e < end; ++e) {
        c2v[e] = prefix;
        prefix *= t[e];
      }
      const double sign = syndrome.get(c) ? -1.0 : 1.0;
      double suffix = 1.0;
      for (std::size_t e = end; e-- > b;) {
        const double prod = std::clamp(c2v[e] * suffix, -kMaxTanh, kMaxTanh);
        c2v[e] = clamp_llr(sign * 2.0 * std::atanh(prod));
        suffix *= t[e];
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      double sum = prior_llr[v];
      for (auto e : g.var_edges(v)) sum += c2v[e];
      total[v] = sum;
      for (auto e : g.var_edges(v)) v2c[e] = clamp_llr(sum - c2v[e]);
      out.hard_decision.set(v, sum < 0.0);
    }
    out.iterations = it;
    if (g.satisfies(out.hard_decision, syndrome)) {
      out.converged = true;
      break;
    }
  }
  for (std::size_t v = 0; v < n; ++v) out.posteriors[v] = 1.0 / (1.0 + std::exp(total[v]));
  return out;
}

namespace detail {

inline std::vector<double> bit_costs(std::span<const double> probs) {
  std::vector<double> w(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_probability(probs[i]);
    w[i] = -std::log(p / (1.0 - p));
  }
  return w;
}

// OSD over explicit column supports (check indices of each variable).
inline BitVector osd_solve(std::size_t num_checks, const std::vector<std::vector<std::uint32_t>>& column_support,
                           const BitVector& syndrome, std::span<const double> reliabilities, std::size_t depth,
                           std::span<const double> cost_probs) {
  const std::size_t n = column_support.size();
  if (syndrome.size() != num_checks) throw std::invalid_argument("osd: syndrome length mismatch");
  if (reliabilities.size() != n) throw std::invalid_argument("osd: reliability length mismatch");
  if (cost_probs.empty()) cost_probs = reliabilities;
  if (cost_probs.size() != n) throw std::invalid_argument("osd: cost length mismatch");

  // Most likely flipped first; ties by ascending column index.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reliabilities[a] > reliabilities[b]; });

  BitMatrix a(num_checks, n + 1);
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (auto c : column_support[order[pos]]) a.set(c, pos, true);
  }
  for (std::size_t c = 0; c < num_checks; ++c) {
    if (syndrome.get(c)) a.set(c, n, true);
  }
  const auto ech = row_reduce(std::move(a), n);
  const std::size_t r = ech.rank();
  for (std::size_t row = r; row < num_checks; ++row) {
    if (ech.reduced.get(row, n)) throw std::invalid_argument("osd: syndrome is not in the column space of H");
  }

  const auto cost = bit_costs(cost_probs);
  std::vector<bool> is_pivot(n, false);
  for (auto p : ech.pivots) is_pivot[p] = true;
  std::vector<std::size_t> candidates;
  for (std::size_t pos = 0; pos < n && candidates.size() < depth; ++pos) {
    if (!is_pivot[pos]) candidates.push_back(pos);
  }

  // Pivot-part vectors over the r pivot rows.
  auto column_over_pivots = [&](std::size_t col) {
    BitVector v(r);
    for (std::size_t row = 0; row < r; ++row) {
      if (ech.reduced.get(row, col)) v.set(row, true);
    }
    return v;
  };
  const BitVector base = column_over_pivots(n);
  std::vector<BitVector> cand_cols;
  cand_cols.reserve(candidates.size());
  for (auto pos : candidates) cand_cols.push_back(column_over_pivots(pos));

  auto pivot_cost = [&](const BitVector& v) {
    double s = 0.0;
    for (auto row : v.support()) s += cost[order[ech.pivots[row]]];
    return s;
  };

  double best_cost = pivot_cost(base);
  std::size_t best_i = candidates.size();  // sentinel: OSD-0
  std::size_t best_j = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const BitVector vi = base ^ cand_cols[i];
    const double ci = pivot_cost(vi) + cost[order[candidates[i]]];
    if (ci < best_cost) {
      best_cost = ci;
      best_i = i;
      best_j = candidates.size();
    }
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const BitVector vi = base ^ cand_cols[i];
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      const BitVector vij = vi ^ cand_cols[j];
      const double cij = pivot_cost(vij) + cost[order[candidates[i]]] + cost[order[candidates[j]]];
      if (cij < best_cost) {
        best_cost = cij;
        best_i = i;
        best_j = j;
      }
    }
  }

  BitVector pivot_bits = base;
  BitVector x(n);
  if (best_i < candidates.size()) {
    pivot_bits ^= cand_cols[best_i];
    x.set(order[candidates[best_i]], true);
  }
  if (best_j < candidates.size()) {
    pivot_bits ^= cand_cols[best_j];
    x.set(order[candidates[best_j]], true);
  }
  for (auto row : pivot_bits.support()) x.set(order[ech.pivots[row]], true);
  return x;
}

inline std::vector<std::vector<std::uint32_t>> column_supports(const BitMatrix& h) {
  std::vector<std::vector<std::uint32_t>> cols(h.cols());
  for (std::size_t c = 0; c < h.rows(); ++c) {
    for (std::size_t v = 0; v < h.cols(); ++v) {
      if (h.get(c, v)) cols[v].push_back(static_cast<std::uint32_t>(c));
    }
  }
  return cols;
}

}  // namespace detail

/// Combination-sweep OSD. Columns are ranked by `reliabilities` (probability
/// of being flipped, highest first); the first rank(H) independent columns
/// form the information set. Candidates are OSD-0 plus every single and pair
/// flip among the first `depth` non-pivot columns; the one with the smallest
/// Σ -log(q/(1-q)) cost over `cost_probs` (default: reliabilities) wins.
inline BitVector osd_postprocess(const BitMatrix& h, const BitVector& syndrome, std::span<const double> reliabilities,
                                 std::size_t depth, std::span<const double> cost_probs = {}) {
  return detail::osd_solve(h.rows(), detail::column_supports(h), syndrome, reliabilities, depth, cost_probs);
}

struct SoftDecodeResult {
  BitVector correction;
  std::vector<double> posteriors;
  bool bp_converged = false;
  bool used_osd = false;
  std::size_t bp_iterations = 0;
};

/// BP followed by OSD on the BP posteriors when BP fails to match the
/// syndrome. Holds only immutable structure, so one instance can serve
/// concurrent decode calls.
class BpOsdDecoder {
 public:
  BpOsdDecoder(BitMatrix h, DecoderConfig cfg)
      : h_(std::move(h)), graph_(h_), columns_(detail::column_supports(h_)), cfg_(cfg) {
    cfg_.validate();
  }

  [[nodiscard]] const BitMatrix& matrix() const { return h_; }
  [[nodiscard]] const TannerGraph& graph() const { return graph_; }
  [[nodiscard]] const DecoderConfig& config() const { return cfg_; }

  [[nodiscard]] SoftDecodeResult decode(const BitVector& syndrome, std::span<const double> priors) const {
    auto bp = bp_decode(graph_, syndrome, priors, cfg_);
    SoftDecodeResult out;
    out.bp_converged = bp.converged;
    out.bp_iterations = bp.iterations;
    if (bp.converged) {
      out.correction = std::move(bp.hard_decision);
    } else {
      std::vector<double> clamped(priors.begin(), priors.end());
      for (auto& p : clamped) p = clamp_probability(p);
      out.correction = detail::osd_solve(h_.rows(), columns_, syndrome, bp.posteriors, cfg_.osd_depth, clamped);
      out.used_osd = true;
    }
    out.posteriors = std::move(bp.posteriors);
    return out;
  }

 private:
  BitMatrix h_;
  TannerGraph graph_;
  std::vector<std::vector<std::uint32_t>> columns_;
  DecoderConfig cfg_;
};

inline SoftDecodeResult bp_osd_decode(const BitMatrix& h, const BitVector& syndrome, std::span<const double> priors,
                                      const DecoderConfig& cfg) {
  return BpOsdDecoder(h, cfg).decode(syndrome, priors);
}

}  // namespace qhier
