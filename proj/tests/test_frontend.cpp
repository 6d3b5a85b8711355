#include <catch2/catch_amalgamated.hpp>

#include "qiral/check.hpp"
#include "qiral/denote.hpp"
#include "qiral/dirac.hpp"
#include "qiral/parser.hpp"
#include "qiral/printer.hpp"

#include <filesystem>
#include <fstream>

using namespace qiral;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string repo_path(const std::string& rel) {
    return std::string(QIRAL_SOURCE_DIR) + "/" + rel;
}

SourceUnit parse_ok(const std::string& text, ParseOptions opt = {}) {
    auto r = parse_unit(text, opt);
    for (auto& d : r.errors) UNSCOPED_INFO(d.str());
    REQUIRE(r.ok());
    return std::move(r.unit);
}

void require_round_trip(const std::string& text, ParseOptions opt = {}) {
    auto u1 = parse_ok(text, opt);
    std::string printed = pretty_print(u1);
    auto r2 = parse_unit(printed, opt);
    for (auto& d : r2.errors) UNSCOPED_INFO(printed + "\n--- " + d.str());
    REQUIRE(r2.ok());
    REQUIRE(unit_eq(u1, r2.unit));
    // printing is a fixed point after one round
    REQUIRE(pretty_print(r2.unit) == printed);
}

} // namespace

TEST_CASE("parse: simple definitions and declarations") {
    auto u = parse_ok("scalar kappa ;\n"
                      "vector v over L (x) C (x) S ;\n"
                      "def M = kappa * I_{L (x) C (x) S} ;\n");
    REQUIRE(u.decls.size() == 2);
    REQUIRE(u.defs.size() == 1);
    REQUIRE(u.defs[0].name == "M");
    REQUIRE(u.defs[0].value->kind == TermKind::Mul);
    REQUIRE(u.decls[1].shape.is_vector());
    REQUIRE(u.decls[1].shape.rows->cardinality() == 192);
}

TEST_CASE("parse: empty input gives an empty unit") {
    auto u = parse_ok("  -- nothing here\n");
    REQUIRE(u.decls.empty());
    REQUIRE(u.defs.empty());
    REQUIRE(u.goal == nullptr);
}

TEST_CASE("parse: goal line") {
    auto u = parse_ok("vector x over L (x) C (x) S ;\n"
                      "vector b over L (x) C (x) S ;\n"
                      "matrix Dirac over L (x) C (x) S , L (x) C (x) S ;\n"
                      "solve x = Dirac^-1 * b ;\n");
    REQUIRE(u.goal);
    REQUIRE(u.goal->kind == StmtKind::Assign);
    REQUIRE(u.goal->lhs->kind == TermKind::VectorSym);
    auto rhs = u.goal->rhs;
    REQUIRE(rhs->kind == TermKind::Mul);
    REQUIRE(rhs->kid(0)->kind == TermKind::Inverse);
    REQUIRE(rhs->kid(0)->kid(0)->name == "Dirac");
    REQUIRE(rhs->kid(1)->name == "b");
}

TEST_CASE("parse: precedence and associativity") {
    auto u = parse_ok("matrix A over C , C ;\n"
                      "matrix B over C , C ;\n"
                      "matrix E over S , S ;\n"
                      "def T1 = A (x) E * (B (x) E) ;\n"
                      "def T2 = A * B + B * A ;\n"
                      "def T3 = -A * B ;\n"
                      "def T4 = A - B - A ;\n");
    // (A (x) E) * (B (x) E)
    auto t1 = u.find_def("T1")->value;
    REQUIRE(t1->kind == TermKind::Mul);
    REQUIRE(t1->kid(0)->kind == TermKind::Tensor);
    REQUIRE(t1->kid(1)->kind == TermKind::Tensor);
    auto t2 = u.find_def("T2")->value;
    REQUIRE(t2->kind == TermKind::Add);
    REQUIRE(t2->kid(0)->kind == TermKind::Mul);
    auto t3 = u.find_def("T3")->value;
    REQUIRE(t3->kind == TermKind::Mul);
    REQUIRE(t3->kid(0)->kind == TermKind::Neg);
    auto t4 = u.find_def("T4")->value;
    REQUIRE(t4->kind == TermKind::Sub);
    REQUIRE(t4->kid(0)->kind == TermKind::Sub);
}

TEST_CASE("parse: division desugars to a scalar reciprocal") {
    auto u = parse_ok("scalar a ;\nscalar c ;\ndef M = a / c * I_C ;\n");
    auto m = u.find_def("M")->value;
    REQUIRE(m->kind == TermKind::Mul);
    REQUIRE(m->arity() == 3);
    REQUIRE(m->kid(1)->kind == TermKind::Inverse);
    REQUIRE(m->kid(1)->kid(0)->name == "c");
}

TEST_CASE("parse: errors carry positions and accumulate") {
    auto r = parse_unit("def M = undeclared_thing ;\n"
                        "vector v over L (x) Q ;\n");
    REQUIRE(r.errors.size() == 2);
    REQUIRE(r.errors[0].line == 1);
    REQUIRE(r.errors[0].msg.find("undeclared") != std::string::npos);
    REQUIRE(r.errors[1].line == 2);
}

TEST_CASE("parse: duplicate names are rejected per category") {
    auto r = parse_unit("scalar a ;\nscalar a ;\n");
    REQUIRE(r.errors.size() == 1);
    REQUIRE(r.errors[0].msg.find("duplicate") != std::string::npos);

    auto r2 = parse_unit("equation e : gamma5 = gamma5 ;\nequation e : gamma5 = gamma5 ;\n");
    REQUIRE(r2.errors.size() == 1);
}

TEST_CASE("parse: reserved words cannot be declared") {
    auto r = parse_unit("scalar gamma ;\n");
    REQUIRE_FALSE(r.ok());
}

TEST_CASE("parse: algorithm template sections") {
    auto u = parse_ok(slurp(repo_path("tests/fixtures/cgnr_like.qir")));
    REQUIRE(u.templates.size() == 1);
    const auto& a = u.templates[0];
    REQUIRE(a.name == "CG0");
    REQUIRE(a.inputs.size() == 2);
    REQUIRE(a.inputs[0].sort == PatSort::Matrix);
    REQUIRE(a.outputs.size() == 1);
    REQUIRE(a.match_stmt->rhs->kind == TermKind::Mul);
    REQUIRE(a.match_stmt->rhs->kid(0)->kind == TermKind::Inverse);
    REQUIRE(a.body.back()->kind == StmtKind::While);
    REQUIRE(a.body.back()->cmp == '>');
    // statements see template locals
    REQUIRE(a.body[0]->lhs->kind == TermKind::VectorSym);
}

TEST_CASE("parse: the shipped Dirac prelude") {
    auto u = parse_ok(slurp(repo_path("prelude/dirac.qir")));
    REQUIRE(u.defs.size() == 3);
    REQUIRE(u.find_def("Dirac"));
    REQUIRE(u.find_def("Dirac")->value->kind == TermKind::Add);
    REQUIRE(u.find_def("Dirac")->value->arity() == 4);
    REQUIRE(u.find_def("P1"));
    REQUIRE(u.find_def("P2"));

    auto chk = typecheck_program(u);
    for (auto& d : chk.diags) UNSCOPED_INFO(d.str());
    REQUIRE(chk.ok());
    const Shape* ds = chk.env.find("Dirac");
    REQUIRE(ds);
    REQUIRE(ds->is_matrix());
    REQUIRE(ds->rows->cardinality() == 192);
    const Shape* p1 = chk.env.find("P1");
    REQUIRE(p1->rows->cardinality() == 96);
    REQUIRE(p1->cols->cardinality() == 192);
}

TEST_CASE("parsed Dirac denotes to the independent stencil matrix") {
    auto u = parse_ok(slurp(repo_path("prelude/dirac.qir")));
    LatticeGeom g({2, 2, 2, 2});
    auto gauge = GaugeField::random(g, 42);
    DenoteEnv env;
    env.geom = &g;
    env.gauge = &gauge;
    env.scalars["kappa"] = 0.15;
    env.scalars["mu"] = 0.1;
    Dense from_text = denote(u.find_def("Dirac")->value, env);
    Dense reference = dense_dirac_stencil(g, gauge, 0.15, 0.1);
    REQUIRE(from_text.max_abs_diff(reference) / reference.max_abs() < 1e-14);

    // and it agrees with the programmatic term builder exactly
    Dense from_builder = denote(dirac_term(IndexSet::lattice(g.extents())), env);
    REQUIRE(from_text.max_abs_diff(from_builder) == 0.0);
}

TEST_CASE("typecheck: shape errors carry source locations") {
    auto u = parse_ok("vector v over C ;\n"
                      "vector w over S ;\n"
                      "def M = I_C ;\n"
                      "solve v = M^-1 * w ;\n");
    auto chk = typecheck_program(u);
    REQUIRE_FALSE(chk.ok());
    bool found = false;
    for (auto& d : chk.diags) found |= d.line == 4;
    REQUIRE(found);
}

TEST_CASE("typecheck: goal over a mis-declared vector fails") {
    auto u = parse_ok("vector x over L (x) C (x) S ;\n"
                      "vector b over L ;\n"
                      "matrix Dirac over L (x) C (x) S , L (x) C (x) S ;\n"
                      "solve x = Dirac^-1 * b ;\n");
    auto chk = typecheck_program(u);
    REQUIRE_FALSE(chk.ok());
}

TEST_CASE("typecheck: x = 0 zero-fill is accepted") {
    auto u = parse_ok("vector v over C ;\nalgorithm Z {\n"
                      "  input A : matrix, b : vector ;\n  output y : vector ;\n"
                      "  match y = A^-1 * b ;\n  body {\n    y = 0 ;\n  }\n}\n");
    auto chk = typecheck_program(u);
    for (auto& d : chk.diags) UNSCOPED_INFO(d.str());
    REQUIRE(chk.ok());
}

TEST_CASE("round-trip: every fixture parses, prints, and re-parses identically") {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (auto& e : fs::directory_iterator(repo_path("tests/fixtures")))
        if (e.path().extension() == ".qir") files.push_back(e.path().string());
    for (auto& e : fs::directory_iterator(repo_path("prelude")))
        if (e.path().extension() == ".qir") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    REQUIRE(files.size() >= 30);
    for (auto& f : files) {
        INFO(f);
        require_round_trip(slurp(f));
    }
}

TEST_CASE("round-trip: randomized expression units") {
    // random expression generator over a small declared vocabulary
    Rng rng(2024);
    auto L = IndexSet::lattice({2, 2, 2, 2});

    std::function<TermPtr(int)> gen_mat = [&](int depth) -> TermPtr {
        if (depth <= 0) {
            switch (rng.below(4)) {
            case 0: return t_mat("A");
            case 1: return t_mat("B");
            case 2: return t_identity(color_set());
            default: return t_gamma5();
            }
        }
        switch (rng.below(7)) {
        case 0: return t_add(gen_mat(depth - 1), gen_mat(depth - 1));
        case 1: return t_sub(gen_mat(depth - 1), gen_mat(depth - 1));
        case 2: return t_mul(gen_mat(depth - 1), gen_mat(depth - 1));
        case 3: return t_tensor(gen_mat(depth - 1), gen_mat(depth - 1));
        case 4: return t_neg(gen_mat(depth - 1));
        case 5: return t_transpose(gen_mat(depth - 1));
        default: return t_inverse(gen_mat(depth - 1));
        }
    };

    for (int trial = 0; trial < 100; ++trial) {
        SourceUnit u;
        u.decls.push_back({"A", Shape::matrix(color_set(), color_set()), 0, 0});
        u.decls.push_back({"B", Shape::matrix(color_set(), color_set()), 0, 0});
        u.defs.push_back({"T", gen_mat(3), 0, 0});
        std::string printed = pretty_print(u);
        INFO(printed);
        auto r = parse_unit(printed);
        REQUIRE(r.ok());
        REQUIRE(unit_eq(u, r.unit));
    }
}
