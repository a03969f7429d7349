#pragma once

#include "wcon/measure.hpp"
#include "wcon/ot.hpp"

#include <iosfwd>
#include <string>

namespace wcon {

/// Round-trip-safe serialization of a double (17 significant digits).
std::string format_double(double value);

/// Point-cloud text format: one atom per line, whitespace-separated
/// `x_1 ... x_d w`; the weight column is optional (absent = uniform);
/// lines starting with `#` are ignored. Files written by this library
/// carry a `# d=<d>` comment that disambiguates the column count.
AtomicMeasure read_point_cloud(std::istream& in);
AtomicMeasure read_point_cloud_file(const std::string& path);

void write_point_cloud(std::ostream& out, const AtomicMeasure& measure);
void write_point_cloud_file(const std::string& path, const AtomicMeasure& measure);

/// Debug export: one `i j mass` triple per line.
void write_coupling(std::ostream& out, const Coupling& coupling);

}  // namespace wcon
