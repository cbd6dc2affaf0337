#pragma once

#include "oscidisc/trajectory.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace oscidisc::io {

/// Formats a double with 17 significant digits, '.' decimal separator.
std::string format_double(double value);

/// Shortest decimal text that reads back to the same double.
std::string format_shortest(double value);

/// CSV with header `t,<labels...>` (labels default to var_0..var_{d-1}).
/// When `extra` is non-empty it is appended as an integer column named
/// `extra_name`.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::span<const int> extra = {},
                          const std::string& extra_name = "label");

/// Companion file holding the derivative matrix with the same header.
void write_derivative_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Reads a trajectory CSV written by write_trajectory_csv. The first column is
/// time; an integer column named `label` is dropped.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Plain matrix CSV with an optional header row.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

/// Table of pre-formatted fields; quoting follows RFC 4180.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
void write_table_csv(const std::filesystem::path& path, const Table& table);
Table read_table_csv(const std::filesystem::path& path);

/// Binary trajectory layout, little-endian:
///   u64 magic "OSCTRAJ1", u64 rows m, u64 cols c, then m*c doubles row-major.
/// Column 0 is time, columns 1..c-1 are the state.
void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_binary(const std::filesystem::path& path);

inline constexpr std::uint64_t kBinaryMagic = 0x314A41525443534Full;  // bytes "OSCTRAJ1"

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace oscidisc::io
