#pragma once

// Reader/writer for the `pfield v1` CSV format:
//
//   # pfield v1 nr=<int> ntheta=<int> components=<1|2|4> name=<token>
//   R,theta,v1[,v2[,v3,v4]]          (n_r * n_theta rows, R-major then theta)
//
// Values are printed with 17 significant digits, so a write/read cycle
// reproduces every double exactly. Line endings are LF.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "diskcert/grid.hpp"

namespace diskcert {

/// Raw contents of a field file before it is interpreted as scalar/vector/matrix.
struct FieldFile {
  PolarGrid grid;
  std::string name;
  std::vector<std::vector<double>> components;
};

namespace detail {

inline void append_number(std::string& line, double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  line.append(buf, static_cast<std::size_t>(len));
}

inline double parse_number(std::string_view text, std::size_t row) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    throw Error("pfield: bad number '" + std::string(text) + "' in data row " + std::to_string(row));
  return value;
}

inline bool valid_token(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name)
    if (c == ' ' || c == '\t' || c == ',' || c == '\n' || c == '\r') return false;
  return true;
}

inline void write_components(std::ostream& out, const PolarGrid& grid, std::string_view name,
                             const std::vector<const std::vector<double>*>& comps) {
  require(valid_token(name), "pfield: field name must be a non-empty token without whitespace");
  out << "# pfield v1 nr=" << grid.n_r() << " ntheta=" << grid.n_theta()
      << " components=" << comps.size() << " name=" << name << '\n';
  std::string line;
  for (int i = 0; i < grid.n_r(); ++i) {
    for (int k = 0; k < grid.n_theta(); ++k) {
      line.clear();
      append_number(line, grid.radius(i));
      line.push_back(',');
      append_number(line, grid.theta(k));
      const std::size_t n = grid.index(i, k);
      for (const auto* c : comps) {
        require(std::isfinite((*c)[n]), "pfield: refusing to write non-finite value");
        line.push_back(',');
        append_number(line, (*c)[n]);
      }
      line.push_back('\n');
      out << line;
    }
  }
  require(static_cast<bool>(out), "pfield: write failed");
}

inline int header_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error("pfield: malformed header value for " + key);
  return v;
}

}  // namespace detail

inline void write_field(std::ostream& out, const ScalarField& f, std::string_view name) {
  detail::write_components(out, f.grid, name, {&f.values});
}
inline void write_field(std::ostream& out, const VectorField& f, std::string_view name) {
  detail::write_components(out, f.grid, name, {&f.c1, &f.c2});
}
inline void write_field(std::ostream& out, const MatrixField& f, std::string_view name) {
  detail::write_components(out, f.grid, name, {&f.m11, &f.m12, &f.m21, &f.m22});
}

template <typename Field>
void write_field(const std::string& path, const Field& f, std::string_view name) {
  std::ofstream out(path, std::ios::binary);
  require(out.is_open(), "pfield: cannot open " + path + " for writing");
  write_field(out, f, name);
}

inline FieldFile read_field_file(std::istream& in) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), "pfield: empty input");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::istringstream hs(header);
  std::string hash, magic, version;
  hs >> hash >> magic >> version;
  require(hash == "#" && magic == "pfield" && version == "v1", "pfield: malformed header");

  int nr = -1, ntheta = -1, ncomp = -1;
  std::string name;
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    require(eq != std::string::npos, "pfield: malformed header token '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "nr") nr = detail::header_int(key, value);
    else if (key == "ntheta") ntheta = detail::header_int(key, value);
    else if (key == "components") ncomp = detail::header_int(key, value);
    else if (key == "name") name = value;
    else throw Error("pfield: unknown header key '" + key + "'");
  }
  require(nr > 0 && ntheta > 0, "pfield: header must declare nr and ntheta");
  require(ncomp == 1 || ncomp == 2 || ncomp == 4, "pfield: components must be 1, 2 or 4");
  require(detail::valid_token(name), "pfield: header must declare name");

  FieldFile file{PolarGrid(nr, ntheta), name, {}};
  const PolarGrid& g = file.grid;
  file.components.assign(ncomp, std::vector<double>(g.size()));

  std::string line;
  const std::size_t expected_fields = 2 + static_cast<std::size_t>(ncomp);
  for (std::size_t row = 0; row < g.size(); ++row) {
    require(static_cast<bool>(std::getline(in, line)),
            "pfield: expected " + std::to_string(g.size()) + " data rows, got " + std::to_string(row));
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    require(cells.size() == expected_fields,
            "pfield: data row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                " values, expected " + std::to_string(expected_fields));
    const int i = static_cast<int>(row / g.n_theta());
    const int k = static_cast<int>(row % g.n_theta());
    const double R = detail::parse_number(cells[0], row);
    const double theta = detail::parse_number(cells[1], row);
    require(std::abs(R - g.radius(i)) <= 1e-12 && std::abs(theta - g.theta(k)) <= 1e-12,
            "pfield: node coordinates of row " + std::to_string(row) + " do not match the grid");
    for (int c = 0; c < ncomp; ++c) file.components[c][row] = detail::parse_number(cells[2 + c], row);
  }
  while (std::getline(in, line)) {
    require(line.empty() || line == "\r", "pfield: trailing data after the declared rows");
  }
  return file;
}

inline FieldFile read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), "pfield: cannot open " + path);
  return read_field_file(in);
}

inline ScalarField to_scalar(const FieldFile& file) {
  require(file.components.size() == 1, "pfield: expected a scalar field (components=1)");
  ScalarField f(file.grid);
  f.values = file.components[0];
  return f;
}

inline VectorField to_vector(const FieldFile& file) {
  require(file.components.size() == 2, "pfield: expected a vector field (components=2)");
  VectorField f(file.grid);
  f.c1 = file.components[0];
  f.c2 = file.components[1];
  return f;
}

inline MatrixField to_matrix(const FieldFile& file) {
  require(file.components.size() == 4, "pfield: expected a matrix field (components=4)");
  MatrixField f(file.grid);
  f.m11 = file.components[0];
  f.m12 = file.components[1];
  f.m21 = file.components[2];
  f.m22 = file.components[3];
  return f;
}

inline ScalarField read_scalar_field(const std::string& path) { return to_scalar(read_field_file(path)); }
inline VectorField read_vector_field(const std::string& path) { return to_vector(read_field_file(path)); }
inline MatrixField read_matrix_field(const std::string& path) { return to_matrix(read_field_file(path)); }

}  // namespace diskcert
