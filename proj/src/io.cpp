#include "wcon/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace wcon {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

AtomicMeasure read_point_cloud(std::istream& in) {
  std::vector<std::vector<double>> rows;
  Index declared_d = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      long d = 0;
      if (std::sscanf(line.c_str() + first, "# d=%ld", &d) == 1 && d >= 1)
        declared_d = static_cast<Index>(d);
      continue;
    }
    std::istringstream ls(line);
    std::vector<double> row;
    double v = 0.0;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw std::invalid_argument("point cloud: malformed line: " + line);
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("point cloud: inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("point cloud: no atoms");

  const Index cols = static_cast<Index>(rows.front().size());
  bool weighted = false;
  if (declared_d > 0) {
    if (cols == declared_d + 1)
      weighted = true;
    else if (cols != declared_d)
      throw std::invalid_argument("point cloud: columns disagree with declared dimension");
  } else if (cols >= 2) {
    // No declared dimension: treat the last column as weights when it is a
    // plausible probability vector.
    double sum = 0.0;
    bool positive = true;
    for (const auto& r : rows) {
      sum += r.back();
      positive = positive && r.back() > 0.0;
    }
    weighted = positive && std::abs(sum - 1.0) <= 1e-9;
  }

  const Index d = weighted ? cols - 1 : cols;
  const Index n = static_cast<Index>(rows.size());
  if (d < 1) throw std::invalid_argument("point cloud: dimension must be >= 1");
  Matrix pts(n, d);
  Vector w(n);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) pts(i, c) = rows[i][c];
    w(i) = weighted ? rows[i][d] : 1.0 / static_cast<double>(n);
  }
  return AtomicMeasure(std::move(pts), std::move(w));
}

AtomicMeasure read_point_cloud_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return read_point_cloud(in);
}

void write_point_cloud(std::ostream& out, const AtomicMeasure& measure) {
  out << "# d=" << measure.dim() << "\n";
  for (Index l = 0; l < measure.size(); ++l) {
    for (Index c = 0; c < measure.dim(); ++c) out << format_double(measure.points()(l, c)) << ' ';
    out << format_double(measure.weights()(l)) << "\n";
  }
}

void write_point_cloud_file(const std::string& path, const AtomicMeasure& measure) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  write_point_cloud(out, measure);
}

void write_coupling(std::ostream& out, const Coupling& coupling) {
  for (const auto& e : coupling.entries)
    out << e.i << ' ' << e.j << ' ' << format_double(e.mass) << "\n";
}

}  // namespace wcon
