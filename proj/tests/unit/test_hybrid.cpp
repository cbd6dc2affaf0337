#include "oscidisc/hybrid/hybrid_model.hpp"
#include "oscidisc/hybrid/regions.hpp"
#include "oscidisc/hybrid/segments.hpp"
#include "oscidisc/netsim/canonical.hpp"
#include "oscidisc/sindy/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace oscidisc;
using namespace oscidisc::hybrid;
using sindy::LibrarySpec;
using sindy::Term;

namespace {

std::vector<bool> bits(const std::string& s) {
  std::vector<bool> out;
  for (char c : s) out.push_back(c == '1');
  return out;
}

sindy::TrimResult trim_from(const std::vector<bool>& mask) {
  sindy::TrimResult t;
  t.trim_mask = mask;
  t.weights.resize(static_cast<Index>(mask.size()));
  for (std::size_t i = 0; i < mask.size(); ++i) t.weights(static_cast<Index>(i)) = mask[i] ? 0.0 : 1.0;
  t.inlier_budget = static_cast<Index>(std::count(mask.begin(), mask.end(), false));
  return t;
}

FastRegion box(double x0, double x1, double y0, double y1, Index first, double margin = 0.0) {
  FastRegion r;
  r.lo = Eigen::Vector2d(x0, y0);
  r.hi = Eigen::Vector2d(x1, y1);
  r.margin = Vector::Constant(2, margin);
  r.centroid = 0.5 * (r.lo + r.hi);
  r.segments = {{first, first + 1, true}};
  return r;
}

LibrarySpec one_var_library(int var, int degree, bool rational) {
  LibrarySpec lib(2);
  for (int k = 0; k <= degree; ++k) {
    std::vector<int> p{0, 0};
    p[static_cast<std::size_t>(var)] = k;
    lib.add(Term::monomial(p));
  }
  if (rational) lib.add(Term::reciprocal(var, 1.0)).add(Term::reciprocal(var, -1.0));
  return lib;
}

struct CanonicalFit {
  Trajectory window;
  sindy::TrimmedFit trimmed;
  HybridModel model;
};

CanonicalFit vdp_fit() {
  CanonicalFit f;
  f.window = netsim::canonical_oscillator(netsim::VanDerPol{5.0}, Eigen::Vector2d(2.0, 0.0), 0.0, 60.0, 1e-3, {5})
                 .since(30.0);
  const auto slow = one_var_library(0, 3, true);
  f.trimmed = sindy::stlsq_trimmed(sindy::build_library(f.window.states, slow), *f.window.derivatives, slow, 0.02,
                                   0.2);
  HybridFitOptions opt;
  opt.slow_library = slow;
  opt.fast_library = LibrarySpec::polynomial(2, 3);
  opt.lambda = 0.02;
  f.model = fit_hybrid(f.window, f.trimmed.trim, opt);
  return f;
}

CanonicalFit rayleigh_fit() {
  CanonicalFit f;
  f.window = netsim::canonical_oscillator(netsim::RayleighOscillator{1e-3}, Eigen::Vector2d(0.0, 2.0), 0.0, 8.0,
                                          1e-4)
                 .since(4.0);
  const auto slow = one_var_library(1, 3, true);
  f.trimmed = sindy::stlsq_trimmed(sindy::build_library(f.window.states, slow), *f.window.derivatives, slow, 0.1,
                                   0.05);
  HybridFitOptions opt;
  opt.slow_library = slow;
  opt.fast_library = LibrarySpec::polynomial(2, 3);
  opt.lambda = 0.1;
  f.model = fit_hybrid(f.window, f.trimmed.trim, opt);
  return f;
}

}  // namespace

TEST(Segments, AllInlierIsOneSlowRun) {
  const auto s = segment_mask(bits("0000000"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (Segment{0, 7, false}));
}

TEST(Segments, RunLengthOfCentralBlock) {
  const auto s = segment_mask(bits("000111000"));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (Segment{0, 3, false}));
  EXPECT_EQ(s[1], (Segment{3, 6, true}));
  EXPECT_EQ(s[2], (Segment{6, 9, false}));
  EXPECT_EQ(count_fast(s), 1);
  EXPECT_EQ(segments_to_mask(s), bits("000111000"));
}

TEST(Segments, ShortRunsAreAbsorbed) {
  // The lone trimmed sample and the two-sample slow gap both fall below min_run.
  const auto s = segment_mask(bits("0000100001110011110000"));
  std::vector<Segment> want{{0, 9, false}, {9, 18, true}, {18, 22, false}};
  EXPECT_EQ(s, want);
  const auto keep = segment_mask(bits("0000100001110011110000"), 1);
  EXPECT_EQ(keep.size(), 7u);
  EXPECT_THROW(segment_trajectory(Trajectory{}, trim_from(bits("01"))), StructuralError);
}

TEST(Regions, SingleSegmentExactBox) {
  Trajectory t;
  t.times = Vector::LinSpaced(5, 0.0, 0.4);
  t.states.resize(5, 2);
  t.states << 0, 0, 1, -2, 3, 5, -1, 4, 9, 9;
  const std::vector<Segment> segs{{0, 1, false}, {1, 4, true}, {4, 5, false}};
  const auto regions = build_fast_regions(t, segs, Vector::Zero(2));
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].lo, Eigen::Vector2d(-1, -2));
  EXPECT_EQ(regions[0].hi, Eigen::Vector2d(3, 5));
  EXPECT_EQ(regions[0].label, 1);
  EXPECT_EQ(regions[0].member_count(), 3);
  EXPECT_TRUE(regions[0].contains(Eigen::Vector2d(3, 5)));
  EXPECT_FALSE(regions[0].contains(Eigen::Vector2d(3.0001, 5)));
  const auto slow = build_fast_regions(t, segs, Vector::Zero(2), false);
  EXPECT_EQ(slow.size(), 2u);
}

TEST(Regions, MarginInflationMerges) {
  const std::vector<FastRegion> apart{box(0, 1, 0, 1, 0, 0.0), box(1.2, 2, 0, 1, 5, 0.0)};
  EXPECT_EQ(merge_regions(apart).size(), 2u);
  const std::vector<FastRegion> inflated{box(0, 1, 0, 1, 0, 0.15), box(1.2, 2, 0, 1, 5, 0.15)};
  const auto merged = merge_regions(inflated);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].lo, Eigen::Vector2d(0, 0));
  EXPECT_EQ(merged[0].hi, Eigen::Vector2d(2, 1));
  EXPECT_EQ(merged[0].segments.size(), 2u);
}

TEST(Regions, TransitiveMergeAfterGrowth) {
  // a and c are apart until a joins b, whose union reaches c.
  const std::vector<FastRegion> r{box(0, 1, 0, 1, 0), box(5, 6, 0.5, 3, 3), box(0.5, 5.5, 0.8, 0.9, 9)};
  const auto merged = merge_regions(r);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].hi, Eigen::Vector2d(6, 3));
}

TEST(Regions, MergeIsIdempotentAndOrderIndependent) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FastRegion> boxes;
    for (Index k = 0; k < 12; ++k) {
      const double x = u(gen), y = u(gen);
      boxes.push_back(box(x, x + 0.8, y, y + 0.8, 10 * k, 0.1));
    }
    const auto once = merge_regions(boxes);
    const auto twice = merge_regions(once);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t k = 0; k < once.size(); ++k) EXPECT_EQ(once[k].lo, twice[k].lo);
    for (std::size_t a = 0; a < once.size(); ++a)
      for (std::size_t b = a + 1; b < once.size(); ++b) EXPECT_FALSE(once[a].overlaps(once[b]));

    auto shuffled = boxes;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto again = merge_regions(shuffled);
    ASSERT_EQ(again.size(), once.size()) << trial;
    for (std::size_t k = 0; k < once.size(); ++k) {
      EXPECT_EQ(again[k].lo, once[k].lo);
      EXPECT_EQ(again[k].hi, once[k].hi);
      EXPECT_EQ(again[k].segments, once[k].segments);
      EXPECT_EQ(again[k].label, static_cast<int>(k) + 1);
    }
  }
}

TEST(Regions, CentroidRuleNeedsMutualContainment) {
  auto a = box(0, 4, 0, 4, 0);
  auto b = box(3, 10, 3, 10, 5);
  EXPECT_EQ(merge_regions({a, b}, MergeRule::overlap).size(), 1u);
  EXPECT_EQ(merge_regions({a, b}, MergeRule::centroid).size(), 2u);
  auto c = box(1, 3.5, 1, 3.5, 9);
  EXPECT_EQ(merge_regions({a, c}, MergeRule::centroid).size(), 1u);
}

TEST(HybridModel, DispatchIsTotalAndFirstWins) {
  HybridModel m;
  m.state_dim = 2;
  m.regions = {box(0, 2, 0, 2, 0), box(1, 3, 1, 3, 5)};
  m.regions[0].label = 1;
  m.regions[1].label = 2;
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1.0, 4.0);
  for (int k = 0; k < 1000; ++k) {
    const Vector x = Eigen::Vector2d(u(gen), u(gen));
    const int label = m.dispatch(x);
    EXPECT_EQ(label, m.dispatch(x));
    const int want = m.regions[0].contains(x) ? 1 : m.regions[1].contains(x) ? 2 : 0;
    EXPECT_EQ(label, want);
  }
  EXPECT_EQ(m.dispatch(Eigen::Vector2d(1.5, 1.5)), 1);
}

TEST(HybridModel, NoTrimmedPointsReducesToSlowModel) {
  const auto t = netsim::canonical_oscillator(netsim::VanDerPol{1.0}, Eigen::Vector2d(2.0, 0.0), 0.0, 20.0, 1e-2);
  HybridFitOptions opt;
  opt.slow_library = LibrarySpec::polynomial(2, 3);
  opt.fast_library = opt.slow_library;
  const auto model = fit_hybrid(t, trim_from(std::vector<bool>(static_cast<std::size_t>(t.samples()), false)), opt);
  EXPECT_TRUE(model.regions.empty());
  const Vector x0 = Eigen::Vector2d(1.0, 0.5);
  const auto hyb = simulate_hybrid(model, x0, 0.0, 10.0, 1e-2);
  const auto plain = sindy::simulate_model(model.slow_model, x0, 0.0, 10.0, 1e-2);
  EXPECT_EQ(hyb.trajectory.states, plain.states);
  EXPECT_TRUE(std::all_of(hyb.labels.begin(), hyb.labels.end(), [](int l) { return l == 0; }));
  EXPECT_FALSE(hyb.extrapolation_warning);
}

TEST(HybridModel, UnderdeterminedRegionIsNamed) {
  const auto t = netsim::canonical_oscillator(netsim::VanDerPol{1.0}, Eigen::Vector2d(2.0, 0.0), 0.0, 20.0, 1e-2);
  auto mask = std::vector<bool>(static_cast<std::size_t>(t.samples()), false);
  for (std::size_t i = 100; i < 105; ++i) mask[i] = true;
  HybridFitOptions opt;
  opt.slow_library = LibrarySpec::polynomial(2, 3);
  opt.fast_library = LibrarySpec::polynomial(2, 3);
  try {
    fit_hybrid(t, trim_from(mask), opt);
    FAIL() << "expected UnderdeterminedError";
  } catch (const UnderdeterminedError& e) {
    EXPECT_EQ(e.region(), "fast_1");
    EXPECT_NE(std::string(e.what()).find("region fast_1 has 5 samples"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("at least 20"), std::string::npos) << e.what();
  }
}

TEST(HybridModel, VisitSequenceCollapsesRepeats) {
  EXPECT_EQ(visit_sequence({0, 0, 1, 1, 1, 0, 2, 2, 0}), (std::vector<int>{0, 1, 0, 2, 0}));
  EXPECT_TRUE(visit_sequence({}).empty());
}

TEST(HybridModel, VanDerPolHasTwoSymmetricJumpRegions) {
  const auto f = vdp_fit();
  ASSERT_EQ(f.model.regions.size(), 2u);
  const auto& a = f.model.regions[0];
  const auto& b = f.model.regions[1];
  EXPECT_LT(a.centroid(1) * b.centroid(1), 0.0);
  const auto& up = a.centroid(1) > 0 ? a : b;
  const auto& down = a.centroid(1) > 0 ? b : a;
  const double scale = std::max(up.hi(0) - up.lo(0), down.hi(0) - down.lo(0));
  EXPECT_NEAR(up.lo(0), -down.hi(0), 0.1 * scale);
  EXPECT_NEAR(up.hi(0), -down.lo(0), 0.1 * scale);

  // Geometry agrees with the segmentation that induced it.
  const auto segs = segment_trajectory(f.window, f.trimmed.trim);
  const auto fast = segments_to_mask(segs);
  Index agree = 0;
  for (Index i = 0; i < f.window.samples(); ++i)
    agree += (f.model.dispatch(f.window.states.row(i).transpose()) != 0) == fast[static_cast<std::size_t>(i)];
  EXPECT_GE(static_cast<double>(agree), 0.9 * static_cast<double>(f.window.samples()));
}

TEST(HybridModel, VanDerPolVisitsEachRegionOncePerPeriod) {
  const auto f = vdp_fit();
  ASSERT_EQ(f.model.regions.size(), 2u);
  const Vector x0 = f.window.states.row(0).transpose();
  const auto sim = simulate_hybrid(f.model, x0, 0.0, 3.0 * 11.6, 1e-3, {5});
  auto visits = visit_sequence(sim.labels);
  // Drop a partial leading visit so the sequence starts on the slow model.
  while (!visits.empty() && visits.front() != 0) visits.erase(visits.begin());
  ASSERT_GE(visits.size(), 8u);
  for (std::size_t k = 0; k + 1 < visits.size(); k += 2) EXPECT_EQ(visits[k], 0);
  for (std::size_t k = 3; k < visits.size(); k += 2) {
    EXPECT_NE(visits[k], visits[k - 2]);
    EXPECT_NE(visits[k], 0);
  }
}

TEST(HybridModel, RayleighSlowModelFollowsOuterSolution) {
  const auto f = rayleigh_fit();
  ASSERT_FALSE(f.model.regions.empty());
  const auto& slow = f.model.slow_model;
  Index checked = 0;
  for (Index i = 0; i < f.window.samples(); ++i) {
    const Vector s = f.window.states.row(i).transpose();
    if (f.model.dispatch(s) != 0) continue;
    const double x = s(0), y = s(1);
    EXPECT_LT(std::abs(y - y * y * y / 3.0 - x), 0.05) << i;
    // d/dt (y - y³/3 - x) = 0 on the slow branch.
    const Vector pred = slow.rhs(s);
    EXPECT_LT(std::abs(pred(1) * (1.0 - y * y) - pred(0)), 0.05) << i;
    ++checked;
  }
  EXPECT_GT(checked, f.window.samples() / 2);
}

TEST(HybridModel, JsonRoundTripPreservesDispatch) {
  const auto f = vdp_fit();
  const auto back = hybrid_from_json(hybrid_to_json(f.model));
  ASSERT_EQ(back.regions.size(), f.model.regions.size());
  for (std::size_t k = 0; k < back.regions.size(); ++k) {
    EXPECT_EQ(back.regions[k].lo, f.model.regions[k].lo);
    EXPECT_EQ(back.regions[k].hi, f.model.regions[k].hi);
    EXPECT_EQ(back.regions[k].segments, f.model.regions[k].segments);
    EXPECT_EQ(back.region_models[k].xi, f.model.region_models[k].xi);
  }
  EXPECT_EQ(back.slow_model.xi, f.model.slow_model.xi);
  EXPECT_EQ(hybrid_to_json(back), hybrid_to_json(f.model));
  const Vector x0 = f.window.states.row(0).transpose();
  EXPECT_EQ(simulate_hybrid(back, x0, 0.0, 5.0, 1e-3).labels, simulate_hybrid(f.model, x0, 0.0, 5.0, 1e-3).labels);
}
