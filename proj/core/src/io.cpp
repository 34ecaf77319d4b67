#include "polyxtal/io.hpp"

#include "polyxtal/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace polyxtal {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_complex(std::complex<double> v) {
    std::string out = format_double(v.real());
    out += (v.imag() < 0.0 ? "-" : "+");
    out += format_double(std::abs(v.imag()));
    out += "i";
    return out;
}

std::string content_hash(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw NumericalError("write_file: cannot open " + path);
    os.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!os) throw NumericalError("write_file: write failed for " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw NumericalError("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace polyxtal
