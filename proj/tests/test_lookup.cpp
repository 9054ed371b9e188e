#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>

#include "qhier/codes.hpp"
#include "qhier/lookup.hpp"

using namespace qhier;

namespace {

const CssCode& surface(std::size_t L) {
  static std::map<std::size_t, CssCode> cache;
  auto it = cache.find(L);
  if (it == cache.end()) it = cache.emplace(L, rotated_surface(L)).first;
  return it->second;
}

const SyndromeTable& table(std::size_t L, Sector sector) {
  static std::map<std::pair<std::size_t, Sector>, SyndromeTable> cache;
  auto key = std::make_pair(L, sector);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_syndrome_table(surface(L), sector)).first;
  return it->second;
}

// Checks and opposite-type logical for one sector, read straight from the code.
const BitMatrix& sector_checks(const CssCode& c, Sector s) { return s == Sector::x_errors ? c.hz : c.hx; }
const BitVector& sector_logical(const CssCode& c, Sector s) {
  return s == Sector::x_errors ? c.logical_z[0] : c.logical_x[0];
}

BitVector pattern(std::size_t n, std::uint64_t bits) {
  BitVector v(n);
  for (std::size_t q = 0; q < n; ++q) v.set(q, (bits >> q) & 1u);
  return v;
}

// P_L by summing Pr(e) over all 2^n patterns with the given syndrome.
long double enumerated_conditional(const CssCode& c, Sector sector, const SyndromeTable& t, std::uint32_t syn,
                                   long double p) {
  const auto& h = sector_checks(c, sector);
  const auto& logical = sector_logical(c, sector);
  const auto ep = t.correction(syn);
  long double pe = 0, pv = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << c.n); ++x) {
    const auto e = pattern(c.n, x);
    if (t.syndrome_to_mask(matvec(h, e)) != syn) continue;
    const auto w = e.weight();
    const long double pr = std::pow(p, (long double)w) * std::pow(1.0L - p, (long double)(c.n - w));
    pv += pr;
    if (logical.dot(e ^ ep)) pe += pr;
  }
  return pe / pv;
}

// Next integer with the same popcount (Gosper's hack).
std::uint32_t next_same_weight(std::uint32_t v) {
  const std::uint32_t c = v & -v, r = v + c;
  return (((r ^ v) >> 2) / c) | r;
}

}  // namespace

TEST(SyndromeTable, ThreeZeroSyndromeCoset) {
  const auto& t = table(3, Sector::z_errors);
  EXPECT_EQ(t.num_syndromes(), 16u);
  std::uint64_t even = 0, odd = 0;
  for (auto c : t.counts(0, false)) even += c;
  for (auto c : t.counts(0, true)) odd += c;
  EXPECT_EQ(even + odd, 32u);
  EXPECT_EQ(even, 16u);
  EXPECT_EQ(odd, 16u);
  EXPECT_EQ(t.correction_mask(0), 0u);
}

TEST(SyndromeTable, InvariantsHold) {
  for (std::size_t L : {1, 3, 5}) {
    for (auto s : {Sector::x_errors, Sector::z_errors}) {
      const auto& t = table(L, s);
      EXPECT_EQ(table_invariant_violation(t), "") << "L=" << L;
      std::uint64_t total = 0;
      for (std::uint32_t syn = 0; syn < t.num_syndromes(); ++syn)
        for (int parity = 0; parity < 2; ++parity)
          for (auto c : t.counts(syn, parity != 0)) total += c;
      EXPECT_EQ(total, std::uint64_t{1} << t.n());
    }
  }
}

TEST(SyndromeTable, FiveHas4096Syndromes) {
  EXPECT_EQ(table(5, Sector::x_errors).num_syndromes(), 4096u);
  EXPECT_EQ(table(5, Sector::z_errors).n_checks(), 12u);
}

TEST(SyndromeTable, CorrectionsReproduceSyndromeAgainstCode) {
  for (auto s : {Sector::x_errors, Sector::z_errors}) {
    const auto& t = table(5, s);
    const auto& h = sector_checks(surface(5), s);
    for (std::uint32_t syn = 0; syn < t.num_syndromes(); ++syn) {
      EXPECT_EQ(t.syndrome_to_mask(matvec(h, t.correction(syn))), syn);
    }
  }
}

TEST(SyndromeTable, ExhaustiveClassificationAtThree) {
  for (auto s : {Sector::x_errors, Sector::z_errors}) {
    const auto& c = surface(3);
    const auto& t = table(3, s);
    const auto& h = sector_checks(c, s);
    const auto& logical = sector_logical(c, s);
    // Replay: count each pattern into V_e or V_c straight from the definition.
    std::map<std::uint32_t, std::vector<std::uint64_t>> err, cor;
    for (std::uint64_t x = 0; x < 512; ++x) {
      const auto e = pattern(9, x);
      const auto syn = t.syndrome_to_mask(matvec(h, e));
      auto& bucket = logical.dot(e ^ t.correction(syn)) ? err[syn] : cor[syn];
      bucket.resize(10, 0);
      ++bucket[e.weight()];
    }
    for (std::uint32_t syn = 0; syn < t.num_syndromes(); ++syn) {
      err[syn].resize(10, 0);
      cor[syn].resize(10, 0);
      const auto te = t.error_counts(syn), tc = t.correct_counts(syn);
      EXPECT_EQ(std::vector<std::uint64_t>(te.begin(), te.end()), err[syn]);
      EXPECT_EQ(std::vector<std::uint64_t>(tc.begin(), tc.end()), cor[syn]);
    }
  }
}

TEST(SyndromeTable, LowWeightErrorsCorrected) {
  for (std::size_t L : {3, 5}) {
    const std::size_t t_max = (L - 1) / 2;
    for (auto s : {Sector::x_errors, Sector::z_errors}) {
      const auto& t = table(L, s);
      const std::size_t n = L * L;
      for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = a; b < n; ++b) {
          if (t_max < 2 && b != a) continue;
          const std::uint32_t e = (1u << a) | (1u << b);
          EXPECT_FALSE(t.logical_parity(e ^ t.correction_mask(t.syndrome_of(e)))) << "L=" << L << " " << a << "," << b;
        }
      }
    }
  }
}

TEST(LookupDecode, ZeroSyndrome) {
  const auto& t = table(5, Sector::x_errors);
  EXPECT_TRUE(lookup_decode(t, BitVector(12)).none());
}

TEST(LookupDecode, SingleErrorResidualIsStabilizer) {
  const auto& c = surface(5);
  const auto& t = table(5, Sector::x_errors);
  for (std::size_t q = 0; q < 25; ++q) {
    BitVector e(25);
    e.set(q, true);
    const auto corr = lookup_decode(t, matvec(c.hz, e));
    const auto residual = corr ^ e;
    EXPECT_TRUE(residual.none() || in_rowspace(c.hx, residual)) << q;
  }
}

TEST(LookupDecode, LengthMismatchThrows) {
  EXPECT_THROW(lookup_decode(table(3, Sector::x_errors), BitVector(5)), std::invalid_argument);
}

TEST(LookupDecode, SomeWeightThreeErrorsMiscorrect) {
  // Distance 5 guarantees weight <= 2; at weight 3 a lighter completion can close a logical.
  const auto& t = table(5, Sector::x_errors);
  std::size_t failures = 0;
  for (std::uint32_t e = 0b111; e < (1u << 25); e = next_same_weight(e)) {
    const auto corr = t.correction_mask(t.syndrome_of(e));
    EXPECT_LE(std::popcount(corr), 3);
    failures += t.logical_parity(e ^ corr);
  }
  EXPECT_GT(failures, 0u);
}

TEST(ConditionalProb, ZeroRateIsZero) {
  const auto& t = table(5, Sector::z_errors);
  for (std::uint32_t syn = 0; syn < t.num_syndromes(); syn += 37) {
    EXPECT_EQ(conditional_logical_prob(t, syn, 0.0).value, 0.0);
  }
}

TEST(ConditionalProb, UniformLimit) {
  const auto& t = table(3, Sector::x_errors);
  for (std::uint32_t syn = 0; syn < t.num_syndromes(); ++syn) {
    double e = 0, all = 0;
    for (auto c : t.error_counts(syn)) e += c;
    for (auto c : t.correct_counts(syn)) all += c;
    all += e;
    EXPECT_NEAR(conditional_logical_prob(t, syn, 0.5 - 1e-9).value, e / all, 1e-7);
  }
}

TEST(ConditionalProb, MatchesEnumerationAtThree) {
  for (auto s : {Sector::x_errors, Sector::z_errors}) {
    const auto& t = table(3, s);
    for (double p : {0.01, 0.1, 0.3}) {
      for (std::uint32_t syn = 0; syn < t.num_syndromes(); ++syn) {
        const long double oracle = enumerated_conditional(surface(3), s, t, syn, p);
        const double got = conditional_logical_prob(t, syn, p).value;
        EXPECT_NEAR(got, static_cast<double>(oracle), 1e-12 * static_cast<double>(oracle)) << syn << " p=" << p;
      }
    }
  }
}

TEST(ConditionalProb, StaysInUnitInterval) {
  const auto& t = table(5, Sector::x_errors);
  for (std::uint32_t syn = 0; syn < t.num_syndromes(); syn += 13) {
    for (double p = 0.0; p < 0.5; p += 0.02) {
      const double v = conditional_logical_prob(t, syn, p).value;
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

// Individual syndromes need not be monotone (some overshoot 1/2), the trivial one is.
TEST(ConditionalProb, TrivialSyndromeMonotone) {
  for (int L : {3, 5}) {
    const auto& t = table(L, Sector::x_errors);
    double prev = 0.0;
    for (double p = 0.0; p < 0.5; p += 0.02) {
      const double v = conditional_logical_prob(t, 0, p).value;
      EXPECT_GE(v, prev - 1e-15) << p;
      prev = v;
    }
  }
}

TEST(ConditionalProb, RejectsOutOfRange) {
  const auto& t = table(3, Sector::x_errors);
  EXPECT_THROW(conditional_logical_prob(t, 0u, 0.5), std::invalid_argument);
  EXPECT_THROW(conditional_logical_prob(t, 0u, -0.1), std::invalid_argument);
}

TEST(ConditionalProb, SizeOneIsBareRate) {
  const auto& t = table(1, Sector::x_errors);
  EXPECT_DOUBLE_EQ(conditional_logical_prob(t, 0u, 0.01).value, 0.01);
}

TEST(AverageRate, AgreesWithDirectEnumeration) {
  // Two independent routes to the L=3 lookup failure rate.
  const auto& c = surface(3);
  for (auto s : {Sector::x_errors, Sector::z_errors}) {
    const auto& t = table(3, s);
    const auto& h = sector_checks(c, s);
    const auto& logical = sector_logical(c, s);
    for (long double p : {0.01L, 0.07L}) {
      long double direct = 0;
      for (std::uint64_t x = 0; x < 512; ++x) {
        const auto e = pattern(9, x);
        if (!logical.dot(e ^ lookup_decode(t, matvec(h, e)))) continue;
        const auto w = e.weight();
        direct += std::pow(p, (long double)w) * std::pow(1.0L - p, (long double)(9 - w));
      }
      long double via_syndromes = 0;
      for (std::uint32_t syn = 0; syn < t.num_syndromes(); ++syn) {
        via_syndromes += syndrome_probability(t, syn, (double)p) * conditional_logical_prob(t, syn, (double)p).value;
      }
      EXPECT_NEAR((double)average_logical_error_rate(t, (double)p), (double)direct, 1e-14);
      EXPECT_NEAR((double)via_syndromes, (double)direct, 1e-13);
    }
  }
}

TEST(TableBuild, RejectsUnsupportedCodes) {
  EXPECT_THROW(build_syndrome_table(rotated_surface(7), Sector::x_errors), std::invalid_argument);
  const auto two_logicals = hgp(BitMatrix::from_rows({"11"}), BitMatrix::from_rows({"1111", "1111"}));
  ASSERT_NE(two_logicals.k, 1u);
  EXPECT_THROW(build_syndrome_table(two_logicals, Sector::x_errors), std::invalid_argument);
}

TEST(TableCache, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "qhier_test_lookup";
  for (std::size_t L : {1, 3}) {
    for (auto s : {Sector::x_errors, Sector::z_errors}) {
      const auto path = dir / ("t" + std::to_string(L) + to_string(s) + ".qhlt");
      save_table(table(L, s), path);
      EXPECT_EQ(load_table(path), table(L, s));
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(TableCache, ChecksumStable) {
  EXPECT_EQ(table_checksum(table(3, Sector::x_errors)), table_checksum(build_syndrome_table(surface(3), Sector::x_errors)));
  EXPECT_NE(table_checksum(table(3, Sector::x_errors)), table_checksum(table(3, Sector::z_errors)));
}

TEST(TableCache, TruncatedRejected) {
  auto bytes = serialize_table(table(3, Sector::x_errors));
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(deserialize_table(bytes), ArtifactError);
  EXPECT_THROW(deserialize_table(bytes.substr(0, 10)), ArtifactError);
}

TEST(TableCache, HeaderPayloadMismatchRejected) {
  auto bytes = serialize_table(table(3, Sector::x_errors));
  bytes[6] = 5;  // L
  bytes[8] = 25;  // n
  bytes[10] = 12;  // n_checks
  EXPECT_THROW(deserialize_table(bytes), ArtifactError);
}

TEST(TableCache, CorruptionAndVersionRejected) {
  auto bytes = serialize_table(table(3, Sector::z_errors));
  auto flipped = bytes;
  flipped[20] ^= 1;
  EXPECT_THROW(deserialize_table(flipped), ArtifactError);
  auto versioned = bytes;
  versioned[4] = 2;
  EXPECT_THROW(deserialize_table(versioned), ArtifactError);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(deserialize_table(magic), ArtifactError);
}

TEST(TableCache, MissingFile) {
  EXPECT_THROW(load_table("/nonexistent/qhier/table.qhlt"), MissingArtifact);
}
