#include "doctest.h"

#include "jetlab/parse.hpp"
#include "jetlab/symmetry.hpp"
#include "testutil.hpp"

using namespace jetlab;
using testutil::make_rng;
using testutil::random_poly;

namespace {

const Context kctx{{"x", "t"}, {"u"}};

DiffPoly P(const std::string& s) { return parse_expr(s, kctx); }

PdeSystem kdv() {
    return parse_system_text("independent: x, t\ndependent: u\neq: u_t = u*u_x + u_xxx\n");
}

PdeSystem heat() {
    return parse_system_text("independent: x, t\ndependent: u\neq: u_t = u_xx\n");
}

Section S(const std::string& s) { return parse_section(s, kctx); }

} // namespace

TEST_CASE("evolutionary field basics") {
    CHECK(evolutionary_apply(kctx, S("u*u_x"), P("u")) == P("u*u_x"));
    CHECK(evolutionary_apply(kctx, S("u_x"), P("x*t")).is_zero());
    CHECK(evolutionary_apply(kctx, S("u_x"), P("u^2*u_xx")) ==
          P("2*u*u_x*u_xx + u^2*u_xxx"));
    CHECK_THROWS_AS(evolutionary_apply(kctx, Section{P("u"), P("u")}, P("u")),
                    SemanticError);
}

TEST_CASE("higher Jacobi bracket") {
    Section chi = S("u*u_xx + u_t");
    Section zero = jacobi_bracket(kctx, chi, chi);
    CHECK(zero[0].is_zero());
    CHECK(jacobi_bracket(kctx, S("1"), S("u"))[0] == P("1"));
    CHECK(jacobi_bracket(kctx, S("u_x"), S("u*u_x + u_xxx"))[0].is_zero());
}

TEST_CASE("bracket properties: antisymmetry, bilinearity, Jacobi") {
    auto rng = make_rng(41);
    for (int i = 0; i < 12; ++i) {
        Section a{random_poly(rng, kctx, 2, 2, 3)};
        Section b{random_poly(rng, kctx, 2, 2, 3)};
        Section c{random_poly(rng, kctx, 2, 2, 3)};
        CHECK(jacobi_bracket(kctx, a, b)[0] == -jacobi_bracket(kctx, b, a)[0]);
        Section bc{b[0] * Rat(2) + c[0] * Rat(-3)};
        CHECK(jacobi_bracket(kctx, a, bc)[0] ==
              jacobi_bracket(kctx, a, b)[0] * Rat(2) +
                  jacobi_bracket(kctx, a, c)[0] * Rat(-3));
        DiffPoly jac = jacobi_bracket(kctx, a, jacobi_bracket(kctx, b, c))[0] +
                       jacobi_bracket(kctx, b, jacobi_bracket(kctx, c, a))[0] +
                       jacobi_bracket(kctx, c, jacobi_bracket(kctx, a, b))[0];
        CHECK(jac.is_zero());
    }
}

TEST_CASE("evolutionary fields commute with total derivatives and derive products") {
    auto rng = make_rng(43);
    for (int i = 0; i < 15; ++i) {
        Section chi{random_poly(rng, kctx, 2, 2, 3)};
        DiffPoly p = random_poly(rng, kctx, 2, 2, 3);
        DiffPoly q = random_poly(rng, kctx, 2, 2, 3);
        for (int d = 0; d < 2; ++d)
            CHECK(evolutionary_apply(kctx, chi, total_derivative(kctx, p, d)) ==
                  total_derivative(kctx, evolutionary_apply(kctx, chi, p), d));
        CHECK(evolutionary_apply(kctx, chi, p * q) ==
              evolutionary_apply(kctx, chi, p) * q + p * evolutionary_apply(kctx, chi, q));
    }
}

TEST_CASE("universal linearization") {
    PdeSystem sys = kdv();
    auto zero = linearization(sys, S("0"));
    CHECK(zero[0].is_zero());
    CHECK(linearization(sys, S("u"))[0] == P("-u*u_x"));
}

TEST_CASE("symmetry check on KdV") {
    PdeSystem sys = kdv();
    CHECK(symmetry_check(sys, S("u_x")).ok);
    CHECK(symmetry_check(sys, S("u*u_x + u_xxx")).ok);
    CHECK(symmetry_check(sys, S("t*u_x + 1")).ok);
    SymmetryReport bad = symmetry_check(sys, S("u"));
    CHECK(!bad.ok);
    CHECK(bad.residuals[0] == P("-u*u_x"));
    CHECK(!symmetry_check(sys, S("1")).ok);
    // closure: the bracket of two verified symmetries is again a symmetry
    Section br = jacobi_bracket(kctx, S("u_x"), S("t*u_x + 1"));
    CHECK(symmetry_check(sys, br).ok);
    Section br2 = jacobi_bracket(kctx, S("u*u_x + u_xxx"), S("t*u_x + 1"));
    CHECK(symmetry_check(sys, br2).ok);
}

TEST_CASE("find_symmetries on the heat equation") {
    PdeSystem sys = heat();
    auto basis = find_symmetries(sys, 1, 1);
    std::vector<std::string> got;
    for (const Section& s : basis)
        got.push_back(section_str(sys.ctx(), s));
    CHECK(got == std::vector<std::string>{"1", "x", "u", "u_x", "u_t"});
    for (const Section& s : basis)
        CHECK(symmetry_check(sys, s).ok);
}

TEST_CASE("find_symmetries: degenerate ansatz sizes") {
    PdeSystem sys = kdv();
    CHECK(find_symmetries(sys, 0, 0).empty()); // (1) is not a KdV symmetry
    CHECK_THROWS_AS(find_symmetries(sys, 3, 3, 10), CapError);
    // the Galilean boost needs explicit coordinates in the pool
    auto basis = find_symmetries(sys, 1, 2);
    bool has_boost = false;
    for (const Section& s : basis)
        if (s[0] == P("t*u_x + 1"))
            has_boost = true;
    CHECK(has_boost);
}
