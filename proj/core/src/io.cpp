#include "oscidisc/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace oscidisc::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary trajectory I/O assumes a little-endian host");

std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    std::ostringstream msg;
    msg << "cannot parse number '" << text << "' on line " << line_no;
    throw ArgumentError(msg.str());
  }
  return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::string> header_for(const Trajectory& traj) {
  std::vector<std::string> header{"t"};
  if (traj.labels.empty()) {
    auto labels = numbered_labels("var_", traj.dim());
    header.insert(header.end(), labels.begin(), labels.end());
  } else {
    header.insert(header.end(), traj.labels.begin(), traj.labels.end());
  }
  return header;
}

void write_rows(std::ofstream& out, const std::vector<std::string>& header, const Vector& times,
                const Matrix& values, std::span<const int> extra, const std::string& extra_name) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out << ',';
    out << quote_field(header[k]);
  }
  if (!extra.empty()) out << ',' << quote_field(extra_name);
  out << "\r\n";
  for (Index i = 0; i < values.rows(); ++i) {
    out << format_double(times(i));
    for (Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(i, j));
    if (!extra.empty()) out << ',' << extra[static_cast<std::size_t>(i)];
    out << "\r\n";
  }
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf.data(), ptr);
}

std::string format_shortest(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf.data(), ptr);
}

void write_table_csv(const std::filesystem::path& path, const Table& table) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) out << ',';
      out << quote_field(fields[k]);
    }
    out << "\r\n";
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

Table read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError(path.string() + " is empty");
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    table.rows.push_back(split_csv_line(line));
  }
  return table;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::span<const int> extra, const std::string& extra_name) {
  traj.validate();
  if (!extra.empty() && static_cast<Index>(extra.size()) != traj.samples()) {
    throw StructuralError("extra column length differs from sample count");
  }
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_rows(out, header_for(traj), traj.times, traj.states, extra, extra_name);
}

void write_derivative_csv(const std::filesystem::path& path, const Trajectory& traj) {
  traj.validate();
  if (!traj.derivatives) throw ArgumentError("trajectory has no derivatives to export");
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_rows(out, header_for(traj), traj.times, *traj.derivatives, {}, {});
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError(path.string() + " is empty");
  auto header = split_csv_line(line);
  if (header.empty() || header.front() != "t") {
    throw ArgumentError(path.string() + ": first column must be 't'");
  }
  std::size_t value_cols = header.size() - 1;
  const bool has_label = header.back() == "label";
  if (has_label) --value_cols;

  std::vector<double> times;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << path.string() << ": line " << line_no << " has " << fields.size()
          << " fields, expected " << header.size();
      throw ArgumentError(msg.str());
    }
    times.push_back(parse_double(fields[0], line_no));
    for (std::size_t j = 0; j < value_cols; ++j) values.push_back(parse_double(fields[j + 1], line_no));
  }

  Trajectory traj;
  const auto m = static_cast<Index>(times.size());
  traj.times = Eigen::Map<const Vector>(times.data(), m);
  traj.states = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), m, static_cast<Index>(value_cols));
  traj.labels.assign(header.begin() + 1, header.begin() + 1 + static_cast<std::ptrdiff_t>(value_cols));
  traj.validate();
  return traj;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  if (!header.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (k) out << ',';
      out << quote_field(header[k]);
    }
    out << "\r\n";
  }
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << "\r\n";
  }
}

void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj) {
  traj.validate();
  auto out = open_out(path, std::ios::out | std::ios::binary);
  const std::array<std::uint64_t, 3> header{kBinaryMagic, static_cast<std::uint64_t>(traj.samples()),
                                            static_cast<std::uint64_t>(traj.dim() + 1)};
  out.write(reinterpret_cast<const char*>(header.data()), sizeof(header));
  std::vector<double> row(static_cast<std::size_t>(traj.dim() + 1));
  for (Index i = 0; i < traj.samples(); ++i) {
    row[0] = traj.times(i);
    for (Index j = 0; j < traj.dim(); ++j) row[static_cast<std::size_t>(j + 1)] = traj.states(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw Error("write failed for " + path.string());
}

Trajectory read_trajectory_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::array<std::uint64_t, 3> header{};
  in.read(reinterpret_cast<char*>(header.data()), sizeof(header));
  if (!in || header[0] != kBinaryMagic) throw ArgumentError(path.string() + ": bad magic");
  if (header[2] < 1) throw ArgumentError(path.string() + ": needs a time column");
  const auto m = static_cast<Index>(header[1]);
  const auto c = static_cast<Index>(header[2]);
  std::vector<double> data(static_cast<std::size_t>(m * c));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw ArgumentError(path.string() + ": truncated payload");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> full(
      data.data(), m, c);
  Trajectory traj;
  traj.times = full.col(0);
  traj.states = full.rightCols(c - 1);
  traj.validate();
  return traj;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oscidisc::io
