#include "oscidisc/trajectory.hpp"

#include <sstream>

namespace oscidisc {

void Trajectory::validate() const {
  if (states.rows() != times.size()) {
    std::ostringstream msg;
    msg << "trajectory has " << times.size() << " times but " << states.rows() << " state rows";
    throw StructuralError(msg.str());
  }
  for (Index i = 1; i < times.size(); ++i) {
    if (!(times(i) > times(i - 1))) {
      std::ostringstream msg;
      msg << "trajectory times not strictly increasing at row " << i;
      throw StructuralError(msg.str());
    }
  }
  if (derivatives && (derivatives->rows() != states.rows() || derivatives->cols() != states.cols())) {
    throw StructuralError("derivative matrix shape differs from state matrix");
  }
  if (!labels.empty() && static_cast<Index>(labels.size()) != states.cols()) {
    throw StructuralError("label count differs from state dimension");
  }
}

Trajectory Trajectory::slice(Index begin, Index end) const {
  if (begin < 0 || end > samples() || begin > end) throw ArgumentError("slice out of range");
  Trajectory out;
  out.times = times.segment(begin, end - begin);
  out.states = states.middleRows(begin, end - begin);
  if (derivatives) out.derivatives = derivatives->middleRows(begin, end - begin);
  out.labels = labels;
  return out;
}

Trajectory Trajectory::since(double t_from) const {
  Index begin = 0;
  while (begin < times.size() && times(begin) < t_from) ++begin;
  return slice(begin, samples());
}

Trajectory Trajectory::columns(const std::vector<Index>& cols) const {
  Trajectory out;
  out.times = times;
  out.states.resize(samples(), static_cast<Index>(cols.size()));
  if (derivatives) out.derivatives = Matrix(samples(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Index c = cols[k];
    if (c < 0 || c >= dim()) throw ArgumentError("column index out of range");
    out.states.col(static_cast<Index>(k)) = states.col(c);
    if (derivatives) out.derivatives->col(static_cast<Index>(k)) = derivatives->col(c);
    if (!labels.empty()) out.labels.push_back(labels[static_cast<std::size_t>(c)]);
  }
  return out;
}

std::vector<std::string> numbered_labels(const std::string& prefix, Index count, Index first) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i + first));
  return out;
}

}  // namespace oscidisc
