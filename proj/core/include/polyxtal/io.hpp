#ifndef POLYXTAL_IO_HPP
#define POLYXTAL_IO_HPP

#include <complex>
#include <cstdint>
#include <string>

namespace polyxtal {

/// Shortest round-trippable decimal form (%.17g, C locale); the single
/// formatting used in CSV artifacts so identical doubles give identical bytes.
std::string format_double(double v);
std::string format_complex(std::complex<double> v);  // "re+imi" / "re-imi"

/// FNV-1a 64-bit content hash, hex encoded; stamps artifacts for regeneration checks.
std::string content_hash(const std::string& data);

void write_file(const std::string& path, const std::string& data);
std::string read_file(const std::string& path);

} // namespace polyxtal

#endif
