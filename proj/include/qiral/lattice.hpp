#pragma once

// 4-d periodic lattice geometry. Sites are linearized x-fastest:
//   idx = ((t * Lz + z) * Ly + y) * Lx + x.
// Parity of a site is (x + y + z + t) mod 2; the even/odd site lists are in
// ascending site-index order, which fixes the meaning of parity-half vector
// layouts everywhere (files, VM buffers, emitted C).

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qiral/indexset.hpp"

namespace qiral {

struct Coords {
    int x, y, z, t;
};

class LatticeGeom {
public:
    explicit LatticeGeom(std::array<int, 4> extents) : ext_(extents) {
        for (int e : ext_)
            if (e < 2) throw std::invalid_argument("lattice extents must be >= 2");
        vol_ = 1;
        for (int e : ext_) vol_ *= e;
        even_.reserve(vol_ / 2);
        odd_.reserve(vol_ - vol_ / 2);
        for (long s = 0; s < vol_; ++s)
            (site_parity(s) == Parity::Even ? even_ : odd_).push_back(s);
    }

    const std::array<int, 4>& extents() const { return ext_; }
    long volume() const { return vol_; }

    bool all_even_extents() const {
        for (int e : ext_)
            if (e % 2) return false;
        return true;
    }

    long index(Coords c) const {
        return ((long(c.t) * ext_[2] + c.z) * ext_[1] + c.y) * ext_[0] + c.x;
    }

    Coords coords(long idx) const {
        Coords c;
        c.x = int(idx % ext_[0]); idx /= ext_[0];
        c.y = int(idx % ext_[1]); idx /= ext_[1];
        c.z = int(idx % ext_[2]); idx /= ext_[2];
        c.t = int(idx);
        return c;
    }

    // Periodic neighbor one step along axis (0..3); step is +1 or -1.
    long neighbor(long idx, int axis, int step) const {
        Coords c = coords(idx);
        int* f = axis == 0 ? &c.x : axis == 1 ? &c.y : axis == 2 ? &c.z : &c.t;
        *f = (*f + step + ext_[axis]) % ext_[axis];
        return index(c);
    }

    Parity site_parity(long idx) const {
        Coords c = coords(idx);
        return ((c.x + c.y + c.z + c.t) & 1) ? Parity::Odd : Parity::Even;
    }

    const std::vector<long>& sites(Parity p) const { return p == Parity::Even ? even_ : odd_; }

    // Position of a site inside its parity list; sites of the other parity
    // map to -1.
    std::vector<long> parity_rank(Parity p) const {
        std::vector<long> rank(vol_, -1);
        const auto& list = sites(p);
        for (size_t i = 0; i < list.size(); ++i) rank[list[i]] = long(i);
        return rank;
    }

private:
    std::array<int, 4> ext_;
    long vol_;
    std::vector<long> even_, odd_;
};

} // namespace qiral
