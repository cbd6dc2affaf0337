#include "oscidisc/analysis.hpp"
#include "oscidisc/io.hpp"
#include "oscidisc/rng.hpp"
#include "oscidisc/trajectory.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <set>

using namespace oscidisc;
using testing_support::TempDir;

namespace {

Trajectory small_trajectory() {
  Trajectory t;
  t.times = Vector::LinSpaced(4, 0.0, 0.3);
  t.states.resize(4, 2);
  t.states << 1.0 / 3.0, -2.5e-300, std::numbers::pi, 1e300, 0.1, -0.0, 7.0, 123456789.123456789;
  t.labels = {"x", "y"};
  return t;
}

}  // namespace

TEST(Rng, SplitMixMatchesReferenceStream) {
  // First outputs of the reference SplitMix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(splitmix64(0x9E3779B97F4A7C15ull), 0x6E789E6AA1B965F4ull);
}

TEST(Rng, DerivedSeedsAreDeterministicAndDistinct) {
  EXPECT_EQ(derive_seed(42, 3, 7), derive_seed(42, 3, 7));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(derive_seed(42, a, b));
  EXPECT_EQ(seen.size(), 2500u);
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
}

TEST(Rng, UniformStaysInHalfOpenInterval) {
  Rng rng(9);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  // Mean of U(0,1) has standard error 1/sqrt(12 n).
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
  const double v = Rng(1).uniform(-1.0, 1.0);
  EXPECT_GE(v, -1.0);
  EXPECT_LT(v, 1.0);
}

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 6.02214076e23, -0.0, 5e-324}) {
    const auto text = io::format_double(v);
    EXPECT_EQ(std::strtod(text.c_str(), nullptr), v) << text;
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Format, ShortestIsMinimal) {
  EXPECT_EQ(io::format_shortest(0.1), "0.1");
  EXPECT_EQ(io::format_shortest(0.95), "0.95");
  EXPECT_EQ(io::format_shortest(100.0), "100");
  EXPECT_EQ(std::strtod(io::format_shortest(1.0 / 3.0).c_str(), nullptr), 1.0 / 3.0);
}

TEST(TrajectoryCsv, RoundTripIsBitExact) {
  TempDir dir;
  const auto t = small_trajectory();
  io::write_trajectory_csv(dir / "traj.csv", t);
  const auto back = io::read_trajectory_csv(dir / "traj.csv");
  EXPECT_EQ(back.labels, t.labels);
  ASSERT_EQ(back.states.rows(), 4);
  for (Index i = 0; i < 4; ++i) {
    EXPECT_EQ(back.times(i), t.times(i));
    for (Index j = 0; j < 2; ++j) EXPECT_EQ(back.states(i, j), t.states(i, j));
  }
  EXPECT_TRUE(std::signbit(back.states(2, 1)));
}

TEST(TrajectoryCsv, DefaultHeaderAndLineEndings) {
  TempDir dir;
  auto t = small_trajectory();
  t.labels.clear();
  io::write_trajectory_csv(dir / "traj.csv", t);
  const auto text = testing_support::slurp(dir / "traj.csv");
  EXPECT_EQ(text.substr(0, text.find('\n') + 1), "t,var_0,var_1\r\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(TrajectoryCsv, LabelColumnIsAppendedAndDropped) {
  TempDir dir;
  const auto t = small_trajectory();
  const std::vector<int> labels{0, 1, 1, 0};
  io::write_trajectory_csv(dir / "traj.csv", t, labels);
  const auto table = io::read_table_csv(dir / "traj.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"t", "x", "y", "label"}));
  EXPECT_EQ(table.rows[2][3], "1");
  const auto back = io::read_trajectory_csv(dir / "traj.csv");
  EXPECT_EQ(back.dim(), 2);
}

TEST(TrajectoryCsv, MalformedRowsNameTheLine) {
  TempDir dir;
  io::write_text(dir / "bad.csv", "t,x\r\n0,1\r\n0.1,abc\r\n");
  try {
    io::read_trajectory_csv(dir / "bad.csv");
    FAIL() << "expected ArgumentError";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(TrajectoryCsv, DerivativeCompanion) {
  TempDir dir;
  auto t = small_trajectory();
  EXPECT_THROW(io::write_derivative_csv(dir / "d.csv", t), ArgumentError);
  t.derivatives = 2.0 * t.states;
  io::write_derivative_csv(dir / "d.csv", t);
  const auto back = io::read_trajectory_csv(dir / "d.csv");
  EXPECT_EQ(back.states(1, 0), 2.0 * t.states(1, 0));
}

TEST(TableCsv, QuotesFieldsPerRfc4180) {
  TempDir dir;
  io::Table table{{"name", "note"}, {{"a,b", "say \"hi\""}, {"plain", "x"}}};
  io::write_table_csv(dir / "t.csv", table);
  const auto text = testing_support::slurp(dir / "t.csv");
  EXPECT_NE(text.find("\"a,b\",\"say \"\"hi\"\"\"\r\n"), std::string::npos);
  const auto back = io::read_table_csv(dir / "t.csv");
  EXPECT_EQ(back.rows, table.rows);
}

TEST(BinaryTrajectory, LayoutAndRoundTrip) {
  TempDir dir;
  const auto t = small_trajectory();
  io::write_trajectory_binary(dir / "t.bin", t);
  const auto bytes = testing_support::slurp(dir / "t.bin");
  ASSERT_EQ(bytes.size(), 24u + 4u * 3u * 8u);
  EXPECT_EQ(bytes.substr(0, 8), "OSCTRAJ1");
  std::uint64_t rows = 0, cols = 0;
  std::memcpy(&rows, bytes.data() + 8, 8);
  std::memcpy(&cols, bytes.data() + 16, 8);
  EXPECT_EQ(rows, 4u);
  EXPECT_EQ(cols, 3u);
  double first_state = 0.0;
  std::memcpy(&first_state, bytes.data() + 24 + 8, 8);
  EXPECT_EQ(first_state, 1.0 / 3.0);

  const auto back = io::read_trajectory_binary(dir / "t.bin");
  EXPECT_EQ(back.times, t.times);
  EXPECT_EQ(back.states, t.states);
}

TEST(BinaryTrajectory, RejectsWrongMagic) {
  TempDir dir;
  io::write_text(dir / "x.bin", std::string(32, 'z'));
  EXPECT_THROW(io::read_trajectory_binary(dir / "x.bin"), Error);
}

TEST(Trajectory, ValidateCatchesShapeErrors) {
  auto t = small_trajectory();
  EXPECT_NO_THROW(t.validate());
  auto bad = t;
  bad.times(2) = bad.times(1);
  EXPECT_THROW(bad.validate(), StructuralError);
  bad = t;
  bad.labels.push_back("z");
  EXPECT_THROW(bad.validate(), StructuralError);
  bad = t;
  bad.derivatives = Matrix::Zero(3, 2);
  EXPECT_THROW(bad.validate(), StructuralError);
}

TEST(Trajectory, SliceSinceColumns) {
  auto t = small_trajectory();
  t.derivatives = -t.states;
  const auto s = t.slice(1, 3);
  EXPECT_EQ(s.samples(), 2);
  EXPECT_EQ(s.times(0), t.times(1));
  EXPECT_EQ((*s.derivatives)(1, 1), -t.states(2, 1));
  EXPECT_THROW(t.slice(2, 5), ArgumentError);
  EXPECT_EQ(t.since(0.15).samples(), 2);
  const auto c = t.columns({1});
  EXPECT_EQ(c.labels, std::vector<std::string>{"y"});
  EXPECT_EQ(c.states(3, 0), t.states(3, 1));
  EXPECT_THROW(t.columns({2}), ArgumentError);
  EXPECT_EQ(numbered_labels("U_", 3, 1), (std::vector<std::string>{"U_1", "U_2", "U_3"}));
}

TEST(Analysis, PeriodOfSampledSine) {
  const Index m = 20001;
  const Vector t = Vector::LinSpaced(m, 0.0, 40.0);
  const Vector x = (t.array() * (2.0 * std::numbers::pi / 3.7)).sin();
  const auto period = analysis::estimate_period(t, x);
  ASSERT_TRUE(period.has_value());
  EXPECT_NEAR(*period, 3.7, 1e-6);
  EXPECT_FALSE(analysis::estimate_period(t.head(10), x.head(10)).has_value());
}

TEST(Analysis, UpwardCrossingsInterpolate) {
  Vector t(3), x(3);
  t << 0.0, 1.0, 2.0;
  x << -1.0, 3.0, -1.0;
  const auto c = analysis::upward_crossings(t, x, 0.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c[0], 0.25);
}

TEST(Analysis, HausdorffAgainstHandComputedCase) {
  Matrix a(2, 2), b(3, 2);
  a << 0, 0, 1, 0;
  b << 0, 0, 1, 0, 1, 3;
  // (1,3) is 3 away from its nearest point in a; a is covered exactly by b.
  EXPECT_DOUBLE_EQ(analysis::hausdorff_distance(a, b), 3.0);
  EXPECT_DOUBLE_EQ(analysis::hausdorff_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(analysis::bounding_diameter(b), std::sqrt(1.0 + 9.0));
}

TEST(Analysis, RSquared) {
  Vector y(4), p(4);
  y << 1, 2, 3, 4;
  p << 1, 2, 3, 5;
  // SS_res = 1, SS_tot = 5.
  EXPECT_DOUBLE_EQ(analysis::r_squared(y, p), 1.0 - 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(analysis::r_squared(y, y), 1.0);
  EXPECT_EQ(analysis::every_nth_row(Matrix::Identity(5, 5), 2).rows(), 3);
}
