#pragma once

// Plain CSV tables: one header row, comma separated, doubles printed with
// 17 significant digits so that text -> double -> text is lossless.
//
//   profile      x,t,t_half     one row per face (x = face midpoint)
//   temperature  x,theta        one row per node
//   history      iteration,compliance,area_error,max_change

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "finopt/errors.hpp"
#include "finopt/mesh.hpp"
#include "finopt/optimizer.hpp"

namespace finopt::io {

inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

inline void write_profile_csv(std::ostream& os, const ThicknessProfile& profile) {
  os << "x,t,t_half\n";
  const Mesh& mesh = profile.mesh();
  for (std::size_t i = 0; i < mesh.cells(); ++i)
    os << format_double(mesh.face(i)) << ',' << format_double(profile[i]) << ','
       << format_double(0.5 * profile[i]) << '\n';
}

inline void write_temperature_csv(std::ostream& os, const Mesh& mesh, std::span<const double> theta) {
  if (theta.size() != mesh.nodes()) throw DomainError("temperature table needs one value per node");
  os << "x,theta\n";
  for (std::size_t i = 0; i < mesh.nodes(); ++i)
    os << format_double(mesh.node(i)) << ',' << format_double(theta[i]) << '\n';
}

inline void write_temperature_csv(std::ostream& os, const TemperatureField& field) {
  write_temperature_csv(os, field.mesh(), field.values());
}

inline void write_history_csv(std::ostream& os, std::span<const IterationRecord> history) {
  os << "iteration,compliance,area_error,max_change\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    os << i << ',' << format_double(history[i].compliance) << ','
       << format_double(history[i].area_error) << ',' << format_double(history[i].max_change) << '\n';
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline double parse_number(std::string_view cell, std::size_t line) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw ParseError("not a finite number: '" + std::string(cell) + "'", line);
  return v;
}

}  // namespace detail

/// Reads an `x,t` profile table (extra columns ignored). Rows are face
/// midpoints of a uniform mesh starting at x = dx/2; the mesh is rebuilt
/// with spacing 2 x_0 so a written table reads back to the same mesh.
inline ThicknessProfile read_profile_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> xs, ts;
  std::vector<std::size_t> lines;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    const auto cells = detail::split(text);
    if (!have_header) {
      if (cells.size() < 2 || cells[0] != "x" || cells[1] != "t")
        throw ParseError("expected header starting with 'x,t'", line_no);
      have_header = true;
      continue;
    }
    if (cells.size() < 2) throw ParseError("expected at least two columns", line_no);
    xs.push_back(detail::parse_number(cells[0], line_no));
    ts.push_back(detail::parse_number(cells[1], line_no));
    if (ts.back() < 0.0) throw ParseError("negative thickness", line_no);
    lines.push_back(line_no);
  }
  if (!have_header) throw ParseError("empty profile table", 0);
  if (xs.size() < Mesh::min_cells)
    throw ParseError("profile needs at least " + std::to_string(Mesh::min_cells) + " rows", line_no);

  if (!(xs[0] > 0.0)) throw ParseError("first face position must be positive (x_0 = dx/2)", lines[0]);
  const double dx = 2.0 * xs[0];
  const double tol = 1e-9 * dx * static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double expected = (static_cast<double>(i) + 0.5) * dx;
    if (std::abs(xs[i] - expected) > tol)
      throw ParseError("face positions are not a uniform mesh starting at dx/2", lines[i]);
  }
  return ThicknessProfile(Mesh::from_spacing(xs.size(), dx), std::move(ts));
}

}  // namespace finopt::io
