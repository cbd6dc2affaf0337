#pragma once

#include "oscidisc/hybrid/segments.hpp"

#include <vector>

namespace oscidisc::hybrid {

/// Axis-aligned box around the states of one or more segments.
///
/// `lo`/`hi` are the extents of the member states; membership tests use the
/// box inflated by `margin` on every side.
struct FastRegion {
  Vector lo;
  Vector hi;
  Vector margin;
  /// Mean of the member states.
  Vector centroid;
  int label = 0;
  bool fast = true;
  std::vector<Segment> segments;

  Vector lower() const { return lo - margin; }
  Vector upper() const { return hi + margin; }
  bool contains(const Vector& x) const;
  bool overlaps(const FastRegion& other) const;
  Index member_count() const;
};

enum class MergeRule {
  /// Join regions whose inflated boxes intersect.
  overlap,
  /// Join regions when each one's centroid lies inside the other's inflated
  /// box. Used when boxes of distinct segments intersect in high dimension.
  centroid
};

/// 2% (by default) of each coordinate's range over the trajectory.
Vector default_margin(const Trajectory& traj, double fraction = 0.02);

/// One inflated box per segment whose `fast` flag equals `fast`, then merged.
/// Labels are 1.. in order of each region's earliest member sample.
std::vector<FastRegion> build_fast_regions(const Trajectory& traj, const std::vector<Segment>& segments,
                                           const Vector& margin, bool fast = true,
                                           MergeRule rule = MergeRule::overlap);

/// Repeatedly replaces any two regions that satisfy `rule` by their joint
/// bounding box until no pair does. The result is sorted by earliest member sample and
/// relabelled 1.., so it does not depend on the input order.
std::vector<FastRegion> merge_regions(std::vector<FastRegion> regions, MergeRule rule = MergeRule::overlap);

}  // namespace oscidisc::hybrid
