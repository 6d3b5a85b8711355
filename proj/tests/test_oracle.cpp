#include <catch2/catch_amalgamated.hpp>

#include "qiral/denote.hpp"
#include "qiral/dirac.hpp"

using namespace qiral;

namespace {

DenoteEnv make_env(const LatticeGeom& g, const GaugeField& u, double kappa, double mu) {
    DenoteEnv env;
    env.geom = &g;
    env.gauge = &u;
    env.scalars["kappa"] = kappa;
    env.scalars["mu"] = mu;
    return env;
}

Dense gamma5_full(long vol) { return Dense::ident(vol * 3).kron(detail::embed4(gamma5_mat())); }

// Number of site blocks (12x12) with any nonzero entry in block row s.
long nonzero_blocks_in_row(const Dense& m, long vol, long s) {
    long count = 0;
    for (long sp = 0; sp < vol; ++sp) {
        bool nz = false;
        for (long i = 0; i < 12 && !nz; ++i)
            for (long j = 0; j < 12 && !nz; ++j)
                nz = m(s * 12 + i, sp * 12 + j) != Complex(0.0, 0.0);
        count += nz;
    }
    return count;
}

} // namespace

TEST_CASE("denote: shift moves data from the positive neighbor") {
    LatticeGeom g({2, 2, 2, 2});
    DenoteEnv env;
    env.geom = &g;
    auto L = IndexSet::lattice(g.extents());
    Dense sh = denote(t_shift(L, Dir::lit(3)), env);
    for (long s = 0; s < g.volume(); ++s)
        for (long sp = 0; sp < g.volume(); ++sp)
            REQUIRE(sh(s, sp) == Complex(sp == g.neighbor(s, 3, +1) ? 1.0 : 0.0, 0.0));
    // Shift(-d) is the transpose (inverse) of Shift(d).
    Dense shm = denote(t_shift(L, Dir::lit(3, true)), env);
    REQUIRE(shm.max_abs_diff(sh.transpose()) == 0.0);
    REQUIRE((sh * shm).max_abs_diff(Dense::ident(g.volume())) == 0.0);
}

TEST_CASE("denote: projection selects parity sites in ascending order") {
    LatticeGeom g({2, 2, 2, 2});
    DenoteEnv env;
    env.geom = &g;
    auto L = IndexSet::lattice(g.extents());
    Dense p = denote(t_proj(Parity::Even, L), env);
    REQUIRE(p.rows() == 8);
    REQUIRE(p.cols() == 16);
    // P P^t = I on the half, P^t P = diagonal indicator on the full set.
    REQUIRE((p * p.transpose()).max_abs_diff(Dense::ident(8)) == 0.0);
    Dense ppt = p.transpose() * p;
    for (long s = 0; s < 16; ++s)
        REQUIRE(ppt(s, s) == Complex(g.site_parity(s) == Parity::Even ? 1.0 : 0.0, 0.0));
}

TEST_CASE("Dirac term denotes to the per-site stencil matrix") {
    LatticeGeom g({2, 2, 2, 2});
    auto u = GaugeField::random(g, 42);
    const double kappa = 0.15, mu = 0.1;
    auto env = make_env(g, u, kappa, mu);
    auto L = IndexSet::lattice(g.extents());

    Dense from_term = denote(dirac_term(L), env);
    Dense from_stencil = dense_dirac_stencil(g, u, kappa, mu);
    REQUIRE(from_term.rows() == 192);
    double rel = from_term.max_abs_diff(from_stencil) / from_stencil.max_abs();
    REQUIRE(rel < 1e-14);

    // matrix-free application agrees with the dense matrix
    Rng r(7);
    std::vector<Complex> v(192);
    for (auto& e : v) e = r.cgaussian();
    std::vector<Complex> out;
    apply_dirac_stencil(g, u, kappa, mu, v, out);
    Dense mv = from_stencil * Dense::column(v);
    double worst = 0;
    for (long i = 0; i < 192; ++i) worst = std::max(worst, std::abs(mv(i, 0) - out[size_t(i)]));
    REQUIRE(worst / mv.max_abs() < 1e-13);
}

TEST_CASE("Dirac at kappa=0 is the identity") {
    LatticeGeom g({2, 2, 2, 2});
    auto u = GaugeField::random(g, 9);
    Dense d = dense_dirac_stencil(g, u, 0.0, 0.3);
    REQUIRE(d.max_abs_diff(Dense::ident(192)) == 0.0);
}

TEST_CASE("gamma5-hermiticity of the dense Dirac operator") {
    LatticeGeom g({2, 2, 2, 2});
    auto u = GaugeField::random(g, 42);
    const double kappa = 0.15, mu = 0.1;
    Dense dmu = dense_dirac_stencil(g, u, kappa, mu);
    Dense dmmu = dense_dirac_stencil(g, u, kappa, -mu);
    Dense g5 = gamma5_full(g.volume());
    Dense lhs = dmu.dagger();
    Dense rhs = g5 * dmmu * g5;
    double num = 0, den = 0;
    for (long i = 0; i < lhs.rows(); ++i)
        for (long j = 0; j < lhs.cols(); ++j) {
            num += std::norm(lhs(i, j) - rhs(i, j));
            den += std::norm(dmu(i, j));
        }
    REQUIRE(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("Dirac block structure: self plus eight distinct neighbors") {
    // At extent 3 all eight neighbors are distinct sites.
    LatticeGeom g({3, 3, 3, 3});
    auto u = GaugeField::random(g, 11);
    Dense d = dense_dirac_stencil(g, u, 0.15, 0.1);
    for (long s = 0; s < g.volume(); ++s) REQUIRE(nonzero_blocks_in_row(d, g.volume(), s) == 9);
}

TEST_CASE("Dirac block structure degenerates at extent 2") {
    // With extent 2 the forward and backward neighbors coincide, so each
    // block row holds self + 4 merged neighbor blocks.
    LatticeGeom g({2, 2, 2, 2});
    auto u = GaugeField::random(g, 11);
    Dense d = dense_dirac_stencil(g, u, 0.15, 0.1);
    for (long s = 0; s < g.volume(); ++s) REQUIRE(nonzero_blocks_in_row(d, g.volume(), s) == 5);
}

TEST_CASE("even-even Dirac block is the twisted identity") {
    LatticeGeom g({2, 2, 2, 2});
    auto u = GaugeField::random(g, 42);
    const double kappa = 0.15, mu = 0.1;
    auto env = make_env(g, u, kappa, mu);
    auto L = IndexSet::lattice(g.extents());

    auto P1 = t_tensor({t_proj(Parity::Even, L), t_identity(color_set()), t_identity(spin_set())});
    auto blk = t_mul({P1, dirac_term(L), t_transpose(P1)});
    Dense d11 = denote(blk, env);
    REQUIRE(d11.rows() == 96);

    Dense g5half = Dense::ident(8 * 3).kron(detail::embed4(gamma5_mat()));
    Dense expect = Dense::ident(96) + g5half.scaled(Complex(0.0, 2.0 * kappa * mu));
    REQUIRE(d11.max_abs_diff(expect) < 1e-13);

    // odd-odd block matches too; the hopping terms always flip parity
    auto P2 = t_tensor({t_proj(Parity::Odd, L), t_identity(color_set()), t_identity(spin_set())});
    Dense d22 = denote(t_mul({P2, dirac_term(L), t_transpose(P2)}), env);
    REQUIRE(d22.max_abs_diff(expect) < 1e-13);
}

TEST_CASE("closed-form inverse of the twisted identity") {
    const double kappa = 0.15, mu = 0.1;
    // (I + 2 i k m G5)(I - 2 i k m G5) = (1 + 4 k^2 m^2) I, exactly up to
    // rounding, because G5^2 = I.
    Dense g5 = Dense::ident(24).kron(detail::embed4(gamma5_mat()));
    Dense plus = Dense::ident(96) + g5.scaled(Complex(0.0, 2.0 * kappa * mu));
    Dense minus = Dense::ident(96) - g5.scaled(Complex(0.0, 2.0 * kappa * mu));
    Dense prod = plus * minus;
    Dense expect = Dense::ident(96).scaled(1.0 + 4.0 * kappa * kappa * mu * mu);
    REQUIRE(prod.max_abs_diff(expect) < 1e-14);

    // and the scaled opposite really is the inverse
    Dense inv = minus.scaled(1.0 / (1.0 + 4.0 * kappa * kappa * mu * mu));
    REQUIRE((plus * inv).max_abs_diff(Dense::ident(96)) < 1e-14);
}

TEST_CASE("denote: direct sum over the lattice builds per-site blocks") {
    LatticeGeom g({2, 2, 2, 2});
    auto u = GaugeField::random(g, 3);
    auto env = make_env(g, u, 0.1, 0.0);
    auto L = IndexSet::lattice(g.extents());
    Dense ds = denote(t_dsum("s", L, t_link(Dir::lit(2), "s")), env);
    REQUIRE(ds.rows() == 48);
    for (long s = 0; s < 16; ++s)
        for (long i = 0; i < 3; ++i)
            for (long j = 0; j < 3; ++j)
                REQUIRE(ds(s * 3 + i, s * 3 + j) == u.link(s, 2)(size_t(i), size_t(j)));
    // off-diagonal blocks are zero
    REQUIRE(ds(0, 5) == Complex(0.0, 0.0));
}

TEST_CASE("denote: negative-direction link is the conjugate of the link behind") {
    LatticeGeom g({2, 2, 2, 2});
    auto u = GaugeField::random(g, 3);
    auto env = make_env(g, u, 0.1, 0.0);
    env.sites["s"] = 6;
    Dense fwd = denote(t_link(Dir::lit(1), "s"), env);
    Dense bwd = denote(t_link(Dir::lit(1, true), "s"), env);
    long behind = g.neighbor(6, 1, -1);
    Dense expect = detail::embed3(u.link(behind, 1).dagger());
    REQUIRE(bwd.max_abs_diff(expect) == 0.0);
    REQUIRE(fwd.max_abs_diff(detail::embed3(u.link(6, 1))) == 0.0);
    // dagger flag composes
    Dense bwd_dag = denote(t_dagger(t_link(Dir::lit(1, true), "s")), env);
    REQUIRE(bwd_dag.max_abs_diff(detail::embed3(u.link(behind, 1))) == 0.0);
}
