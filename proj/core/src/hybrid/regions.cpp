#include "oscidisc/hybrid/regions.hpp"

#include <algorithm>
#include <limits>

namespace oscidisc::hybrid {
namespace {

Index first_sample(const FastRegion& r) {
  Index first = std::numeric_limits<Index>::max();
  for (const auto& s : r.segments) first = std::min(first, s.begin);
  return first;
}

FastRegion joined(const FastRegion& a, const FastRegion& b) {
  FastRegion out;
  out.lo = a.lo.cwiseMin(b.lo);
  out.hi = a.hi.cwiseMax(b.hi);
  out.margin = a.margin.cwiseMax(b.margin);
  const auto na = static_cast<double>(a.member_count());
  const auto nb = static_cast<double>(b.member_count());
  out.centroid = (na * a.centroid + nb * b.centroid) / (na + nb);
  out.fast = a.fast;
  out.segments = a.segments;
  out.segments.insert(out.segments.end(), b.segments.begin(), b.segments.end());
  std::sort(out.segments.begin(), out.segments.end(),
            [](const Segment& x, const Segment& y) { return x.begin < y.begin; });
  return out;
}

}  // namespace

bool FastRegion::contains(const Vector& x) const {
  return (x.array() >= (lo - margin).array()).all() && (x.array() <= (hi + margin).array()).all();
}

bool FastRegion::overlaps(const FastRegion& other) const {
  return (lower().array() <= other.upper().array()).all() && (other.lower().array() <= upper().array()).all();
}

Index FastRegion::member_count() const {
  Index n = 0;
  for (const auto& s : segments) n += s.size();
  return n;
}

Vector default_margin(const Trajectory& traj, double fraction) {
  if (traj.samples() == 0) return Vector::Zero(traj.dim());
  const Vector range = traj.states.colwise().maxCoeff() - traj.states.colwise().minCoeff();
  return fraction * range;
}

std::vector<FastRegion> build_fast_regions(const Trajectory& traj, const std::vector<Segment>& segments,
                                           const Vector& margin, bool fast, MergeRule rule) {
  if (margin.size() != traj.dim()) throw StructuralError("margin length differs from state dimension");
  if ((margin.array() < 0.0).any()) throw ArgumentError("region margin must be non-negative");
  std::vector<FastRegion> boxes;
  for (const auto& s : segments) {
    if (s.fast != fast || s.size() == 0) continue;
    if (s.begin < 0 || s.end > traj.samples()) throw StructuralError("segment exceeds trajectory bounds");
    const auto block = traj.states.middleRows(s.begin, s.size());
    FastRegion r;
    r.lo = block.colwise().minCoeff().transpose();
    r.hi = block.colwise().maxCoeff().transpose();
    r.centroid = block.colwise().mean().transpose();
    r.margin = margin;
    r.fast = fast;
    r.segments = {s};
    boxes.push_back(std::move(r));
  }
  return merge_regions(std::move(boxes), rule);
}

std::vector<FastRegion> merge_regions(std::vector<FastRegion> regions, MergeRule rule) {
  auto joinable = [rule](const FastRegion& a, const FastRegion& b) {
    if (rule == MergeRule::overlap) return a.overlaps(b);
    return a.contains(b.centroid) && b.contains(a.centroid);
  };
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < regions.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < regions.size(); ++j) {
        if (!joinable(regions[i], regions[j])) continue;
        regions[i] = joined(regions[i], regions[j]);
        regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
        break;
      }
    }
  }
  std::sort(regions.begin(), regions.end(),
            [](const FastRegion& a, const FastRegion& b) { return first_sample(a) < first_sample(b); });
  for (std::size_t k = 0; k < regions.size(); ++k) regions[k].label = static_cast<int>(k) + 1;
  return regions;
}

}  // namespace oscidisc::hybrid
