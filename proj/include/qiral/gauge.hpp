#pragma once

// SU(3) gauge configurations: one 3x3 special-unitary link per site and
// positive axis. Negative-direction hops use the conjugate transpose of the
// link at the displaced site, so nothing extra is stored.
//
// File format "QGAUGE1": one ASCII header line
//   QGAUGE1 <Lx> <Ly> <Lz> <Lt>\n
// followed by raw little-endian doubles, site-major in ascending site index
// (x fastest), axes in x,y,z,t order, each link row-major as re,im pairs
// (18 doubles per link).

#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qiral/cmat.hpp"
#include "qiral/lattice.hpp"
#include "qiral/rng.hpp"

namespace qiral {

static_assert(std::endian::native == std::endian::little,
              "gauge file IO assumes a little-endian host");

inline Mat3 random_su3(Rng& rng) {
    Mat3 m;
    for (std::size_t i = 0; i < 9; ++i) m.a[i] = rng.cgaussian();
    // Gram-Schmidt on columns, then rotate one column so det == 1.
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            std::complex<double> dot = 0.0;
            for (std::size_t r = 0; r < 3; ++r) dot += std::conj(m(r, p)) * m(r, c);
            for (std::size_t r = 0; r < 3; ++r) m(r, c) -= dot * m(r, p);
        }
        double n = 0.0;
        for (std::size_t r = 0; r < 3; ++r) n += std::norm(m(r, c));
        n = std::sqrt(n);
        for (std::size_t r = 0; r < 3; ++r) m(r, c) /= n;
    }
    std::complex<double> d = m.det();
    for (std::size_t r = 0; r < 3; ++r) m(r, 2) *= std::conj(d);
    return m;
}

class GaugeField {
public:
    explicit GaugeField(LatticeGeom geom) : geom_(std::move(geom)), links_(geom_.volume() * 4) {}

    static GaugeField random(LatticeGeom geom, std::uint64_t seed) {
        GaugeField f(std::move(geom));
        Rng rng(seed);
        for (auto& u : f.links_) u = random_su3(rng);
        return f;
    }

    static GaugeField unit(LatticeGeom geom) {
        GaugeField f(std::move(geom));
        for (auto& u : f.links_) u = Mat3::ident();
        return f;
    }

    const LatticeGeom& geom() const { return geom_; }

    const Mat3& link(long site, int axis) const { return links_[site * 4 + axis]; }
    Mat3& link(long site, int axis) { return links_[site * 4 + axis]; }

    const std::vector<Mat3>& raw() const { return links_; }

    double max_unitarity_defect() const {
        double worst = 0.0;
        for (const auto& u : links_) {
            worst = std::max(worst, (u.dagger() * u).max_abs_diff(Mat3::ident()));
            worst = std::max(worst, std::abs(u.det() - std::complex<double>(1.0, 0.0)));
        }
        return worst;
    }

    void save(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
        const auto& e = geom_.extents();
        os << "QGAUGE1 " << e[0] << " " << e[1] << " " << e[2] << " " << e[3] << "\n";
        os.write(reinterpret_cast<const char*>(links_.data()),
                 std::streamsize(links_.size() * sizeof(Mat3)));
        if (!os) throw std::runtime_error("short write to '" + path + "'");
    }

    static GaugeField load(const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open gauge file '" + path + "'");
        std::string header;
        std::getline(is, header);
        int lx, ly, lz, lt;
        if (std::sscanf(header.c_str(), "QGAUGE1 %d %d %d %d", &lx, &ly, &lz, &lt) != 4)
            throw std::runtime_error("'" + path + "': bad gauge header: " + header);
        GaugeField f(LatticeGeom({lx, ly, lz, lt}));
        is.read(reinterpret_cast<char*>(f.links_.data()),
                std::streamsize(f.links_.size() * sizeof(Mat3)));
        if (is.gcount() != std::streamsize(f.links_.size() * sizeof(Mat3)))
            throw std::runtime_error("'" + path + "': truncated gauge data");
        for (const auto& u : f.links_)
            for (const auto& v : u.a)
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw std::runtime_error("'" + path + "': non-finite link entry");
        return f;
    }

private:
    LatticeGeom geom_;
    std::vector<Mat3> links_;
};

} // namespace qiral
