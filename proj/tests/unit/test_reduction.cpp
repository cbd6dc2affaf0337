#include "oscidisc/netsim/builder.hpp"
#include "oscidisc/netsim/network.hpp"
#include "oscidisc/reduction/reduction.hpp"
#include "oscidisc/rng.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <random>

using namespace oscidisc;
using namespace oscidisc::reduction;

namespace {

Trajectory from_states(const Matrix& states) {
  Trajectory t;
  t.times = Vector::LinSpaced(states.rows(), 0.0, static_cast<double>(states.rows() - 1));
  t.states = states;
  return t;
}

Matrix gaussian(Index m, Index d, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  Matrix x(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = n01(gen);
  return x;
}

double frob_energy_share(const Vector& sv, Index r) {
  return std::sqrt(sv.head(r).squaredNorm() / sv.squaredNorm());
}

}  // namespace

TEST(Reduce, RankOneDataIsExact) {
  const Vector s = Vector::LinSpaced(50, 0.0, 5.0).array().sin();
  Vector pattern(6);
  pattern << 1, -2, 0.5, 3, 0, 1;
  Trajectory t = from_states(s * pattern.transpose());
  t.derivatives = 2.0 * t.states;
  const auto r = reduce(t, 1);
  EXPECT_LT((lift(r.basis, r.coordinates.states) - t.states).norm(), 1e-12);
  EXPECT_LT(r.basis.singular_values.tail(5).cwiseAbs().maxCoeff(), 1e-12 * r.basis.singular_values(0));
  EXPECT_LT((*r.coordinates.derivatives - 2.0 * r.coordinates.states).norm(), 1e-12);
  EXPECT_EQ(r.coordinates.labels, std::vector<std::string>{"U_1"});
}

TEST(Reduce, ModesAreOrthonormalAndSpectrumSorted) {
  const auto t = from_states(gaussian(80, 12, 3));
  const auto r = reduce(t, 5);
  EXPECT_LT((r.basis.modes.transpose() * r.basis.modes - Matrix::Identity(5, 5)).norm(), 1e-10);
  const Vector& sv = r.basis.singular_values;
  EXPECT_EQ(sv.size(), 12);
  for (Index k = 1; k < sv.size(); ++k) EXPECT_GE(sv(k - 1), sv(k));
  // Independent oracle: one-sided Jacobi SVD.
  Eigen::JacobiSVD<Matrix> jac(t.states);
  EXPECT_LT((jac.singularValues() - sv).norm(), 1e-10);
}

TEST(Reduce, EckartYoung) {
  const Matrix x = gaussian(30, 8, 5);
  Eigen::JacobiSVD<Matrix> jac(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector sv = singular_values(x);
  for (Index r = 0; r <= 8; ++r) {
    const Matrix xr = jac.matrixU().leftCols(r) * jac.singularValues().head(r).asDiagonal() *
                      jac.matrixV().leftCols(r).transpose();
    EXPECT_NEAR(truncation_error(sv, r), (x - xr).norm(), 1e-10) << r;
  }
}

TEST(Reduce, ReconstructionErrorShrinksToZero) {
  const auto t = from_states(gaussian(40, 7, 6));
  double prev = std::numeric_limits<double>::infinity();
  for (Index r = 1; r <= 7; ++r) {
    const auto red = reduce(t, r);
    const double err = (lift(red.basis, red.coordinates.states) - t.states).norm();
    EXPECT_LE(err, prev + 1e-12);
    prev = err;
  }
  EXPECT_LT(prev, 1e-8 * t.states.norm());
}

TEST(Reduce, CenteringRemovesTemporalMean) {
  Matrix x = gaussian(60, 4, 7);
  x.rowwise() += Eigen::RowVector4d(10, -3, 2, 0);
  const auto t = from_states(x);
  const auto r = reduce(t, 4, true);
  EXPECT_LT((r.basis.mean - x.colwise().mean().transpose()).norm(), 1e-12);
  EXPECT_LT(r.coordinates.states.colwise().mean().norm(), 1e-10);
  EXPECT_LT((lift(r.basis, r.coordinates.states) - x).norm(), 1e-9);
}

TEST(Reduce, ProjectLiftIsIdempotent) {
  const auto t = from_states(gaussian(50, 9, 8));
  const auto r = reduce(t, 3, true);
  const Matrix once = lift(r.basis, project(r.basis, t.states));
  const Matrix twice = lift(r.basis, project(r.basis, once));
  EXPECT_LT((once - twice).norm(), 1e-10);
  EXPECT_THROW(project(r.basis, Matrix::Zero(2, 4)), StructuralError);
  EXPECT_THROW(lift(r.basis, Matrix::Zero(2, 4)), StructuralError);
}

TEST(Reduce, RankBounds) {
  const auto t = from_states(gaussian(5, 8, 9));
  EXPECT_THROW(reduce(t, 0), ArgumentError);
  EXPECT_THROW(reduce(t, 6), ArgumentError);
  EXPECT_NO_THROW(reduce(t, 5));
}

TEST(Reduce, SignConventionIsDeterministic) {
  const auto t = from_states(gaussian(30, 5, 10));
  const auto r = reduce(t, 3);
  for (Index k = 0; k < 3; ++k) {
    Index arg = 0;
    r.basis.modes.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(r.basis.modes(arg, k), 0.0);
  }
  auto flipped = t;
  flipped.states *= -1.0;
  EXPECT_LT((reduce(flipped, 3).basis.modes - r.basis.modes).norm(), 1e-10);
}

TEST(Reduce, GaussianNoiseHasNoDominantMode) {
  const auto sv = singular_values(gaussian(100, 100, 11));
  EXPECT_LT(frob_energy_share(sv, 1) * frob_energy_share(sv, 1), 0.1);
}

TEST(Reduce, SynchronisedKuramotoIsTwoDimensional) {
  netsim::NetworkRecipe recipe;
  recipe.kuramoto = {50, 0.6, 0.5};
  recipe.coupling.kuramoto = 10.0;
  const auto spec = netsim::build_network(recipe, 12);
  const auto raw = netsim::simulate(spec, netsim::random_initial_state(spec, 13), 0.0, 1500.0, 0.1, {5});
  const auto obs = netsim::observe(spec, raw).since(1000.0);
  const auto r = reduce(obs, 2);
  EXPECT_GT(frob_energy_share(r.basis.singular_values, 2), 0.99);
  const std::vector<double> tau{0.99};
  EXPECT_LE(estimate_dimension(obs, tau)[0], 3);
}

TEST(Blockwise, SingleBlockEqualsGlobal) {
  const auto t = from_states(gaussian(40, 6, 14));
  const BlockMap blocks{{"all", {0, 1, 2, 3, 4, 5}}};
  const std::vector<Index> ranks{3};
  const auto b = reduce_blockwise(t, blocks, ranks);
  const auto g = reduce(t, 3);
  EXPECT_LT((b.basis.modes - g.basis.modes).norm(), 1e-10);
  EXPECT_LT((b.coordinates.states - g.coordinates.states).norm(), 1e-10);
  EXPECT_LT((b.basis.singular_values - g.basis.singular_values).norm(), 1e-10);
}

TEST(Blockwise, DuplicatedBlocksShareSpectrum) {
  const Matrix half = gaussian(40, 3, 15);
  Matrix x(40, 6);
  x << half, half;
  const BlockMap blocks{{"a", {0, 1, 2}}, {"b", {3, 4, 5}}};
  const std::vector<Index> ranks{2, 2};
  const auto r = reduce_blockwise(from_states(x), blocks, ranks);
  ASSERT_EQ(r.basis.blocks.size(), 2u);
  EXPECT_LT((r.basis.blocks[0].singular_values - r.basis.blocks[1].singular_values).norm(), 1e-10);
  EXPECT_EQ(r.coordinates.dim(), 4);
  EXPECT_LT((r.coordinates.states.leftCols(2) - r.coordinates.states.rightCols(2)).norm(), 1e-10);
  EXPECT_LT((r.basis.modes.transpose() * r.basis.modes - Matrix::Identity(4, 4)).norm(), 1e-10);
}

TEST(Blockwise, InterleavedColumnsMapBack) {
  const Matrix x = gaussian(30, 4, 16);
  const BlockMap blocks{{"even", {0, 2}}, {"odd", {1, 3}}};
  const std::vector<Index> ranks{2, 2};
  const auto r = reduce_blockwise(from_states(x), blocks, ranks);
  EXPECT_LT((lift(r.basis, r.coordinates.states) - x).norm(), 1e-10);
  EXPECT_EQ(r.basis.modes(1, 0), 0.0);
  EXPECT_EQ(r.basis.modes(0, 2), 0.0);
}

TEST(Blockwise, RejectsBadPartitions) {
  const auto t = from_states(gaussian(10, 4, 17));
  const std::vector<Index> ranks{1, 1};
  EXPECT_THROW(reduce_blockwise(t, {{"a", {0, 1}}, {"b", {1, 2, 3}}}, ranks), ArgumentError);
  EXPECT_THROW(reduce_blockwise(t, {{"a", {0, 1}}, {"b", {2}}}, ranks), ArgumentError);
  EXPECT_THROW(reduce_blockwise(t, {{"a", {0, 1}}, {"b", {2, 7}}}, ranks), ArgumentError);
  const std::vector<Index> one{1};
  EXPECT_THROW(reduce_blockwise(t, {{"a", {0, 1}}, {"b", {2, 3}}}, one), ArgumentError);
}

TEST(Dimension, RankOneIsOne) {
  const Vector s = Vector::LinSpaced(20, 1.0, 2.0);
  const auto t = from_states(s * Eigen::RowVector3d(1, 2, 3));
  const std::vector<double> tau{0.5, 0.9, 0.99, 0.999999};
  for (auto conv : {DimensionConvention::energy, DimensionConvention::error})
    for (Index r : estimate_dimension(t, tau, conv)) EXPECT_EQ(r, 1);
}

TEST(Dimension, EqualSingularValuesClosedForm) {
  // σ_i all equal with d = 10: energy share sqrt(r/10) first reaches 0.9 at
  // r = 9; relative error sqrt(1 - r/10) first drops to 0.1 at r = 10.
  const Vector sv = Vector::Constant(10, 2.5);
  const std::vector<double> tau{0.9};
  EXPECT_EQ(dimension_from_spectrum(sv, tau, DimensionConvention::energy)[0], 9);
  EXPECT_EQ(dimension_from_spectrum(sv, tau, DimensionConvention::error)[0], 10);
  const auto t = from_states(Matrix::Identity(10, 10) * 2.5);
  EXPECT_EQ(estimate_dimension(t, tau, DimensionConvention::energy)[0], 9);
}

TEST(Dimension, MonotoneInThreshold) {
  const auto sv = singular_values(gaussian(60, 20, 18));
  std::vector<double> tau;
  for (int k = 1; k <= 100; ++k) tau.push_back(k / 100.0);
  for (auto conv : {DimensionConvention::energy, DimensionConvention::error}) {
    const auto r = dimension_from_spectrum(sv, tau, conv);
    for (std::size_t k = 1; k < r.size(); ++k) EXPECT_LE(r[k - 1], r[k]);
    EXPECT_LE(r.back(), 20);
  }
}

TEST(Dimension, MatchesBruteForceSearch) {
  const auto sv = singular_values(gaussian(40, 15, 19));
  const double total = sv.squaredNorm();
  for (double tau : {0.5, 0.9, 0.95, 0.99}) {
    Index want = 15;
    for (Index r = 1; r <= 15; ++r) {
      if (std::sqrt(sv.tail(15 - r).squaredNorm() / total) <= 1.0 - tau) {
        want = r;
        break;
      }
    }
    const std::vector<double> t{tau};
    EXPECT_EQ(dimension_from_spectrum(sv, t)[0], want) << tau;
  }
}

TEST(Dimension, RejectsBadInput) {
  const std::vector<double> bad{0.0};
  EXPECT_THROW(dimension_from_spectrum(Vector::Ones(3), bad), ArgumentError);
  const std::vector<double> ok{0.9};
  EXPECT_THROW(estimate_dimension(Trajectory{}, ok), ArgumentError);
}
