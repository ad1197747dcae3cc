#include "doctest.h"

#include "jetlab/diffpoly.hpp"
#include "jetlab/parse.hpp"
#include "testutil.hpp"

using namespace jetlab;
using testutil::make_rng;
using testutil::random_poly;

namespace {
const Context kdv_ctx{{"x", "t"}, {"u"}};

DiffPoly P(const std::string& s) { return parse_expr(s, kdv_ctx); }
} // namespace

TEST_CASE("parse: term counts and zero") {
    CHECK(P("u_t - u*u_x - u_xxx").term_count() == 3);
    CHECK(P("0").is_zero());
    CHECK(P("(u_x)^2/2") == P("u_x^2") * Rat(1, 2));
    // suffixes are order-insensitive words
    CHECK(P("u_xt") == P("u_tx"));
    CHECK(P("u_xxt") == P("u_txx"));
}

TEST_CASE("parse: rational literals and division") {
    CHECK(P("2/4") == DiffPoly::constant(Rat(1, 2)));
    CHECK(P("3*u/6") == P("u") * Rat(1, 2));
    CHECK_THROWS_AS(P("u/u_x"), SyntaxError);
    CHECK_THROWS_AS(P("u/0"), SyntaxError);
}

TEST_CASE("parse: rejects bad input with positions") {
    CHECK_THROWS_AS(P("u u_x"), SyntaxError);  // implicit multiplication
    CHECK_THROWS_AS(P("u^-1"), SyntaxError);
    CHECK_THROWS_AS(P("u^(2)"), SyntaxError);
    CHECK_THROWS_AS(P("(u"), SyntaxError);
    CHECK_THROWS_AS(P("v_x"), SemanticError); // unknown identifier
}

TEST_CASE("print: canonical, parse∘print is the identity") {
    CHECK(P("0").str(kdv_ctx) == "0");
    CHECK(P("u_xx - u_tt").str(kdv_ctx) == "-u_tt + u_xx");
    CHECK(P("u*u_x + u_xxx").str(kdv_ctx) == "u*u_x + u_xxx");
    CHECK(P("1/2*u_x^2").str(kdv_ctx) == "1/2*u_x^2");
    auto rng = make_rng();
    for (int i = 0; i < 50; ++i) {
        DiffPoly p = random_poly(rng, kdv_ctx, 3, 3, 5);
        CHECK(parse_expr(p.str(kdv_ctx), kdv_ctx) == p);
    }
}

TEST_CASE("partial derivatives") {
    JetVar u = JetVar::u(0), ux = JetVar::u(0, {0}), ut = JetVar::u(0, {1});
    CHECK(partial(P("u_x^2"), ux) == P("2*u_x"));
    CHECK(partial(P("u*u_x"), u) == P("u_x"));
    CHECK(partial(P("x*u_xx + u"), ut).is_zero());
}

TEST_CASE("total derivative") {
    CHECK(total_derivative(kdv_ctx, P("u"), 0) == P("u_x"));
    CHECK(total_derivative(kdv_ctx, P("7/3"), 0).is_zero());
    CHECK(total_derivative(kdv_ctx, P("u*u_x"), 0) == P("u_x^2 + u*u_xx"));
    CHECK_THROWS_AS(total_derivative(kdv_ctx, P("u"), 2), SemanticError);
}

TEST_CASE("iterated total derivative") {
    DiffPoly p = P("u*u_xx + x*u_t^2");
    CHECK(total_derivative_multi(kdv_ctx, p, {}) == p);
    CHECK(total_derivative_multi(kdv_ctx, P("u"), {0, 0}) == P("u_xx"));
    CHECK(total_derivative_multi(kdv_ctx, P("u^2"), {0, 1}) ==
          P("2*u_t*u_x + 2*u*u_xt"));
    // independent of iteration order
    CHECK(total_derivative_multi(kdv_ctx, P("u^2"), {0, 1}) ==
          total_derivative_multi(kdv_ctx, P("u^2"), {1, 0}));
}

TEST_CASE("substitution is simultaneous") {
    JetVar ux = JetVar::u(0, {0}), ut = JetVar::u(0, {1});
    CHECK(substitute(P("u_t"), {{ut, P("u*u_x")}}) == P("u*u_x"));
    CHECK(substitute(P("u_t^2"), {{ut, DiffPoly()}}).is_zero());
    CHECK(substitute(P("u_t + u_x"), {{ut, P("u_xx")}, {ux, P("u")}}) == P("u_xx + u"));
}

TEST_CASE("property: total derivatives commute and satisfy Leibniz") {
    Context ctx{{"x", "t"}, {"u", "v"}};
    auto rng = make_rng(7);
    for (int i = 0; i < 60; ++i) {
        DiffPoly p = random_poly(rng, ctx, 3, 3, 4);
        DiffPoly q = random_poly(rng, ctx, 3, 3, 4);
        CHECK(total_derivative(ctx, total_derivative(ctx, p, 0), 1) ==
              total_derivative(ctx, total_derivative(ctx, p, 1), 0));
        CHECK(total_derivative(ctx, p * q, 0) ==
              total_derivative(ctx, p, 0) * q + p * total_derivative(ctx, q, 0));
        // linearity over rational scalars
        CHECK(total_derivative(ctx, p * Rat(3, 7) + q, 1) ==
              total_derivative(ctx, p, 1) * Rat(3, 7) + total_derivative(ctx, q, 1));
        CHECK(partial(p * Rat(3, 7) + q, JetVar::u(0)) ==
              partial(p, JetVar::u(0)) * Rat(3, 7) + partial(q, JetVar::u(0)));
    }
}

TEST_CASE("property: contraction identity for D_i") {
    // d(D_i p)/du_{Ji} = dp/du_J + D_i(dp/du_{Ji})
    Context ctx{{"x", "t"}, {"u", "v"}};
    auto rng = make_rng(11);
    for (int i = 0; i < 60; ++i) {
        DiffPoly p = random_poly(rng, ctx, 3, 3, 4);
        int di = (int)(rng() % 2);
        int alpha = (int)(rng() % 2);
        MultiIndex J;
        for (int k = (int)(rng() % 3); k > 0; --k)
            J.push_back((int)(rng() % 2));
        J = mi_sorted(J);
        JetVar uJ = JetVar::u(alpha, J);
        JetVar uJi = JetVar::u(alpha, mi_plus(J, di));
        CHECK(partial(total_derivative(ctx, p, di), uJi) ==
              partial(p, uJ) + total_derivative(ctx, partial(p, uJi), di));
    }
}
