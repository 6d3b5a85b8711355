#pragma once

// Vector and residual-history IO.
//
// "QVEC1": one ASCII header line `QVEC1 <N>\n` followed by raw little-endian
// doubles, re,im per element (2N doubles). Elements follow the canonical
// layout elem = (site * 3 + color) * 4 + spin with sites ascending.
//
// Residual histories are CSV with header `iteration,residual`, one row per
// tracked iteration, values printed with 17 significant digits so reloading
// reproduces the doubles exactly.

#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qiral {

inline void save_qvec(const std::string& path, const std::vector<std::complex<double>>& v) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << "QVEC1 " << v.size() << "\n";
    os.write(reinterpret_cast<const char*>(v.data()),
             std::streamsize(v.size() * sizeof(std::complex<double>)));
    if (!os) throw std::runtime_error("short write to '" + path + "'");
}

inline std::vector<std::complex<double>> load_qvec(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open vector file '" + path + "'");
    std::string header;
    std::getline(is, header);
    long long n = -1;
    if (std::sscanf(header.c_str(), "QVEC1 %lld", &n) != 1 || n < 0)
        throw std::runtime_error("'" + path + "': bad vector header: " + header);
    std::vector<std::complex<double>> v(static_cast<size_t>(n));
    is.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(v[0])));
    if (is.gcount() != std::streamsize(v.size() * sizeof(v[0])))
        throw std::runtime_error("'" + path + "': truncated vector data");
    return v;
}

struct ResidualPoint {
    long iteration;
    double residual;
};

inline void save_residuals(const std::string& path, const std::vector<ResidualPoint>& hist) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << "iteration,residual\n";
    char buf[64];
    for (const auto& p : hist) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g\n", p.iteration, p.residual);
        os << buf;
    }
    if (!os) throw std::runtime_error("short write to '" + path + "'");
}

} // namespace qiral
