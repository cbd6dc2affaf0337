#include "oscidisc/hybrid/segments.hpp"

#include <sstream>

namespace oscidisc::hybrid {
namespace {

void coalesce(std::vector<Segment>& runs) {
  std::vector<Segment> out;
  for (const auto& r : runs) {
    if (!out.empty() && out.back().fast == r.fast) {
      out.back().end = r.end;
    } else {
      out.push_back(r);
    }
  }
  runs = std::move(out);
}

}  // namespace

std::vector<Segment> segment_mask(const std::vector<bool>& trimmed, Index min_run) {
  std::vector<Segment> runs;
  const auto m = static_cast<Index>(trimmed.size());
  for (Index i = 0; i < m; ++i) {
    const bool f = trimmed[static_cast<std::size_t>(i)];
    if (runs.empty() || runs.back().fast != f) {
      runs.push_back({i, i + 1, f});
    } else {
      runs.back().end = i + 1;
    }
  }
  while (runs.size() > 1) {
    std::size_t pick = runs.size();
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (runs[k].size() >= min_run) continue;
      if (pick == runs.size() || runs[k].size() < runs[pick].size()) pick = k;
    }
    if (pick == runs.size()) break;
    runs[pick].fast = !runs[pick].fast;
    coalesce(runs);
  }
  return runs;
}

std::vector<Segment> segment_trajectory(const Trajectory& traj, const sindy::TrimResult& trim, Index min_run) {
  if (static_cast<Index>(trim.trim_mask.size()) != traj.samples()) {
    std::ostringstream msg;
    msg << "trim mask has " << trim.trim_mask.size() << " entries, trajectory has " << traj.samples() << " samples";
    throw StructuralError(msg.str());
  }
  return segment_mask(trim.trim_mask, min_run);
}

std::vector<bool> segments_to_mask(const std::vector<Segment>& segments) {
  std::vector<bool> out;
  for (const auto& s : segments)
    for (Index i = s.begin; i < s.end; ++i) out.push_back(s.fast);
  return out;
}

Index count_fast(const std::vector<Segment>& segments) {
  Index n = 0;
  for (const auto& s : segments) n += s.fast ? 1 : 0;
  return n;
}

}  // namespace oscidisc::hybrid
