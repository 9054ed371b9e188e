#pragma once

// Dense bit-packed linear algebra over GF(2).

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qhier {

namespace detail {
constexpr std::size_t word_bits = 64;
constexpr std::size_t words_for(std::size_t bits) { return (bits + word_bits - 1) / word_bits; }
}  // namespace detail

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t len) : len_(len), words_(detail::words_for(len), 0) {}

  /// Parses a '0'/'1' string; character i is entry i.
  static BitVector from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        v.set(i, true);
      } else if (bits[i] != '0') {
        throw std::invalid_argument("bit string contains a character other than 0/1");
      }
    }
    return v;
  }

  static BitVector from_indices(std::size_t len, std::span<const std::size_t> ones) {
    BitVector v(len);
    for (auto i : ones) v.set(i, true);
    return v;
  }

  [[nodiscard]] std::size_t size() const { return len_; }
  [[nodiscard]] bool empty() const { return len_ == 0; }

  [[nodiscard]] bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i % 64);
    if (v) {
      words_[i / 64] |= m;
    } else {
      words_[i / 64] &= ~m;
    }
  }
  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }
  bool operator[](std::size_t i) const { return get(i); }

  [[nodiscard]] std::size_t weight() const {
    std::size_t w = 0;
    for (auto x : words_) w += static_cast<std::size_t>(std::popcount(x));
    return w;
  }
  [[nodiscard]] bool any() const {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t x) { return x != 0; });
  }
  [[nodiscard]] bool none() const { return !any(); }

  /// Inner product mod 2.
  [[nodiscard]] bool dot(const BitVector& other) const {
    check_same(other);
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
    return std::popcount(acc) & 1;
  }

  BitVector& operator^=(const BitVector& other) {
    check_same(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
  }
  friend BitVector operator^(BitVector a, const BitVector& b) {
    a ^= b;
    return a;
  }
  friend bool operator==(const BitVector& a, const BitVector& b) {
    return a.len_ == b.len_ && a.words_ == b.words_;
  }

  [[nodiscard]] std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t x = words_[w];
      while (x) {
        out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(x)));
        x &= x - 1;
      }
    }
    return out;
  }

  [[nodiscard]] std::string to_string() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i) {
      if (get(i)) s[i] = '1';
    }
    return s;
  }

  [[nodiscard]] std::span<const std::uint64_t> words() const { return words_; }
  [[nodiscard]] std::span<std::uint64_t> words() { return words_; }

 private:
  void check_same(const BitVector& other) const {
    if (other.len_ != len_) throw std::invalid_argument("bit vector length mismatch");
  }

  std::size_t len_ = 0;
  std::vector<std::uint64_t> words_;
};

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(detail::words_for(cols)), data_(rows * stride_, 0) {}

  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  /// Rows given as '0'/'1' strings of equal length.
  static BitMatrix from_rows(const std::vector<std::string>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    BitMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw std::invalid_argument("ragged matrix rows");
      m.set_row(i, BitVector::from_string(rows[i]));
    }
    return m;
  }

  static BitMatrix from_row_vectors(std::size_t cols, const std::vector<BitVector>& rows) {
    BitMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) m.set_row(i, rows[i]);
    return m;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  [[nodiscard]] bool get(std::size_t i, std::size_t j) const {
    return (data_[i * stride_ + j / 64] >> (j % 64)) & 1U;
  }
  void set(std::size_t i, std::size_t j, bool v) {
    auto& w = data_[i * stride_ + j / 64];
    const std::uint64_t m = std::uint64_t{1} << (j % 64);
    w = v ? (w | m) : (w & ~m);
  }
  void flip(std::size_t i, std::size_t j) { data_[i * stride_ + j / 64] ^= std::uint64_t{1} << (j % 64); }

  [[nodiscard]] std::span<const std::uint64_t> row_words(std::size_t i) const {
    return {data_.data() + i * stride_, stride_};
  }
  [[nodiscard]] std::span<std::uint64_t> row_words(std::size_t i) { return {data_.data() + i * stride_, stride_}; }

  [[nodiscard]] BitVector row(std::size_t i) const {
    BitVector v(cols_);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(i * stride_), stride_, v.words().begin());
    return v;
  }
  void set_row(std::size_t i, const BitVector& v) {
    if (v.size() != cols_) throw std::invalid_argument("row length mismatch");
    std::copy(v.words().begin(), v.words().end(), data_.begin() + static_cast<std::ptrdiff_t>(i * stride_));
  }
  [[nodiscard]] BitVector column(std::size_t j) const {
    BitVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (get(i, j)) v.set(i, true);
    }
    return v;
  }

  void xor_row_into(std::size_t src, std::size_t dst) {
    const auto* s = data_.data() + src * stride_;
    auto* d = data_.data() + dst * stride_;
    for (std::size_t w = 0; w < stride_; ++w) d[w] ^= s[w];
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                     data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * stride_),
                     data_.begin() + static_cast<std::ptrdiff_t>(b * stride_));
  }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint64_t x) { return x == 0; });
  }
  [[nodiscard]] std::size_t row_weight(std::size_t i) const {
    std::size_t w = 0;
    for (auto x : row_words(i)) w += static_cast<std::size_t>(std::popcount(x));
    return w;
  }
  [[nodiscard]] std::size_t column_weight(std::size_t j) const {
    std::size_t w = 0;
    for (std::size_t i = 0; i < rows_; ++i) w += get(i, j);
    return w;
  }

  [[nodiscard]] BitMatrix transpose() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        if (get(i, j)) t.set(j, i, true);
      }
    }
    return t;
  }

  friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Reduced row echelon form. `pivots[r]` is the pivot column of row r.
struct RowEchelon {
  BitMatrix reduced;
  std::vector<std::size_t> pivots;
  [[nodiscard]] std::size_t rank() const { return pivots.size(); }
};

/// Full Gauss-Jordan reduction, scanning columns left to right and taking the
/// first row at or below the current position with a set bit as pivot.
/// Only the first `pivot_cols` columns are eligible as pivots (all if npos).
inline RowEchelon row_reduce(BitMatrix m, std::size_t pivot_cols = static_cast<std::size_t>(-1)) {
  RowEchelon out;
  const std::size_t limit = std::min(pivot_cols, m.cols());
  std::size_t r = 0;
  for (std::size_t c = 0; c < limit && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && !m.get(piv, c)) ++piv;
    if (piv == m.rows()) continue;
    m.swap_rows(piv, r);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i != r && m.get(i, c)) m.xor_row_into(r, i);
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = std::move(m);
  return out;
}

inline std::size_t rank(const BitMatrix& m) { return row_reduce(m).rank(); }

inline std::vector<BitVector> kernel_basis(const BitMatrix& m) {
  const auto ech = row_reduce(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : ech.pivots) is_pivot[c] = true;
  std::vector<BitVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    BitVector v(m.cols());
    v.set(f, true);
    for (std::size_t r = 0; r < ech.rank(); ++r) {
      if (ech.reduced.get(r, f)) v.set(ech.pivots[r], true);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

inline BitVector matvec(const BitMatrix& m, const BitVector& v) {
  if (v.size() != m.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  BitVector out(m.rows());
  const auto vw = v.words();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto rw = m.row_words(i);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < rw.size(); ++w) acc ^= rw[w] & vw[w];
    if (std::popcount(acc) & 1) out.set(i, true);
  }
  return out;
}

inline BitMatrix matmul(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  BitMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row_words(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (!a.get(i, k)) continue;
      const auto src = b.row_words(k);
      for (std::size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
    }
  }
  return out;
}

/// Some x with m·x = y, or nullopt when y is outside the column space.
inline std::optional<BitVector> solve_particular(const BitMatrix& m, const BitVector& y) {
  if (y.size() != m.rows()) throw std::invalid_argument("solve_particular: dimension mismatch");
  BitMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m.get(i, j)) aug.set(i, j, true);
    }
    if (y.get(i)) aug.set(i, m.cols(), true);
  }
  const auto ech = row_reduce(std::move(aug), m.cols());
  for (std::size_t r = ech.rank(); r < m.rows(); ++r) {
    if (ech.reduced.get(r, m.cols())) return std::nullopt;
  }
  BitVector x(m.cols());
  for (std::size_t r = 0; r < ech.rank(); ++r) {
    if (ech.reduced.get(r, m.cols())) x.set(ech.pivots[r], true);
  }
  return x;
}

inline BitMatrix hstack(const BitMatrix& a, const BitMatrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row count mismatch");
  BitMatrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a.get(i, j)) out.set(i, j, true);
    }
    for (std::size_t j = 0; j < b.cols(); ++j) {
      if (b.get(i, j)) out.set(i, a.cols() + j, true);
    }
  }
  return out;
}

inline BitMatrix vstack(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("vstack: column count mismatch");
  BitMatrix out(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) out.set_row(i, a.row(i));
  for (std::size_t i = 0; i < b.rows(); ++i) out.set_row(a.rows() + i, b.row(i));
  return out;
}

/// Kronecker product.
inline BitMatrix kron(const BitMatrix& a, const BitMatrix& b) {
  BitMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (!a.get(i, j)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t l = 0; l < b.cols(); ++l) {
          if (b.get(k, l)) out.set(i * b.rows() + k, j * b.cols() + l, true);
        }
      }
    }
  }
  return out;
}

/// Span accumulator: reports whether a new vector is independent of those
/// already inserted.
class IncrementalBasis {
 public:
  explicit IncrementalBasis(std::size_t len) : len_(len) {}

  /// Reduces v against the stored rows; returns the remainder.
  [[nodiscard]] BitVector reduce(BitVector v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (v.get(pivots_[i])) v ^= rows_[i];
    }
    return v;
  }

  /// Inserts v; returns false (and stores nothing) when v is already in the span.
  bool insert(const BitVector& v) {
    auto r = reduce(v);
    const auto sup = r.support();
    if (sup.empty()) return false;
    pivots_.push_back(sup.front());
    rows_.push_back(std::move(r));
    return true;
  }

  [[nodiscard]] bool contains(const BitVector& v) const { return reduce(v).none(); }
  [[nodiscard]] std::size_t rank() const { return rows_.size(); }
  [[nodiscard]] std::size_t length() const { return len_; }

 private:
  std::size_t len_;
  std::vector<BitVector> rows_;
  std::vector<std::size_t> pivots_;
};

inline bool in_rowspace(const BitMatrix& m, const BitVector& v) {
  return solve_particular(m.transpose(), v).has_value();
}

// Text fixture format: "rows cols" header, then one 0/1 string per row.

inline void write_matrix_text(std::ostream& os, const BitMatrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) os << m.row(i).to_string() << '\n';
}

inline BitMatrix read_matrix_text(std::istream& is) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(is >> rows >> cols)) throw std::runtime_error("matrix text: missing 'rows cols' header");
  BitMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::string line;
    if (!(is >> line)) throw std::runtime_error("matrix text: missing row " + std::to_string(i));
    if (line.size() != cols) throw std::runtime_error("matrix text: row " + std::to_string(i) + " has wrong length");
    m.set_row(i, BitVector::from_string(line));
  }
  return m;
}

inline std::string to_text(const BitMatrix& m) {
  std::ostringstream os;
  write_matrix_text(os, m);
  return os.str();
}

}  // namespace qhier
