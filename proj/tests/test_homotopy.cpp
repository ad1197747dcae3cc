#include "doctest.h"

#include <algorithm>

#include "jetlab/homotopy.hpp"
#include "testutil.hpp"

using namespace jetlab;

namespace {

// sl(2) with [e,f] = h, [h,e] = 2e, [h,f] = -2f, shifted to degree -1;
// Jacobi checked by hand: [[e,f],h] - [[e,h],f] + [[f,h],e] = 0 + 2h - 2h
GradedSpace sl2_space() {
    GradedSpace V;
    V.add("e", -1);
    V.add("f", -1);
    V.add("h", -1);
    return V;
}

MultiBracket sl2_bracket(const GradedSpace& V, const Rat& he_coeff) {
    MultiBracket l2(2, true);
    l2.set(V, {0, 1}, {{2, Rat(1)}});        // l2(e,f) = h
    l2.set(V, {2, 0}, {{0, he_coeff}});      // l2(h,e) = c*e
    l2.set(V, {2, 1}, {{1, Rat(-2)}});       // l2(h,f) = -2f
    return l2;
}

} // namespace

// ------------------------------------------------------ signs, shuffles ----

TEST_CASE("koszul sign values and validation") {
    CHECK(koszul_sign({0, 1, 2}, {1, 1, 0}) == 1);
    CHECK(koszul_sign({1, 0}, {1, 1}) == -1);
    CHECK(koszul_sign({1, 0}, {2, 1}) == 1);
    // the 3-cycle on degrees (1,1,0)
    CHECK(koszul_sign({1, 2, 0}, {1, 1, 0}) == -1);

    CHECK_THROWS_AS(koszul_sign({0, 0}, {1, 1}), SemanticError);
    CHECK_THROWS_AS(koszul_sign({0, 2}, {1, 1}), SemanticError);
    CHECK_THROWS_AS(koszul_sign({0, 1}, {1}), SemanticError);
}

TEST_CASE("koszul sign is multiplicative under composition") {
    auto rng = testutil::make_rng();
    for (int trial = 0; trial < 200; ++trial) {
        int n = testutil::pick(rng, 1, 6);
        std::vector<int> tau(n), sigma(n), degs(n);
        for (int i = 0; i < n; ++i) {
            tau[i] = sigma[i] = i;
            degs[i] = testutil::pick(rng, -2, 3);
        }
        std::shuffle(tau.begin(), tau.end(), rng);
        std::shuffle(sigma.begin(), sigma.end(), rng);
        // arrange by tau, then arrange that sequence by sigma
        std::vector<int> comp(n), dtau(n);
        for (int i = 0; i < n; ++i) {
            comp[i] = tau[sigma[i]];
            dtau[i] = degs[tau[i]];
        }
        CHECK(koszul_sign(comp, degs) ==
              koszul_sign(tau, degs) * koszul_sign(sigma, dtau));
    }
}

TEST_CASE("unshuffles enumerate binomially many monotone arrangements") {
    CHECK(unshuffles(1, 1).size() == 2);
    CHECK(unshuffles(2, 1).size() == 3);
    CHECK(unshuffles(2, 2).size() == 6);
    CHECK(unshuffles(0, 3) == std::vector<std::vector<int>>{{0, 1, 2}});
    CHECK(unshuffles(2, 0) == std::vector<std::vector<int>>{{0, 1}});

    for (auto& arr : unshuffles(3, 2)) {
        CHECK(std::is_sorted(arr.begin(), arr.begin() + 3));
        CHECK(std::is_sorted(arr.begin() + 3, arr.end()));
    }
    auto all = unshuffles(3, 2);
    std::sort(all.begin(), all.end());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    CHECK(all.size() == 10);
}

// ----------------------------------------------------------- brackets ----

TEST_CASE("symmetric table lookups apply the koszul sign") {
    GradedSpace V;
    V.add("a", 0);
    V.add("b", 1);
    V.add("c", -1);
    V.add("d", 2);

    MultiBracket l3(3, true);
    l3.set(V, {0, 1, 2}, {{1, Rat(5)}});  // deg 0+1-1+1 = 1 -> b
    l3.set(V, {0, 0, 1}, {{3, Rat(2)}});  // deg 0+0+1+1 = 2 -> d

    // permuted lookups equal the koszul-signed canonical evaluation
    std::vector<int> base{0, 1, 2};
    std::vector<int> degs;
    for (int i : base)
        degs.push_back(V.degree(i));
    std::vector<std::vector<int>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                        {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& p : perms) {
        std::vector<int> t{base[p[0]], base[p[1]], base[p[2]]};
        KVec got = l3.eval(V, t);
        KVec want;
        kv_axpy(want, Rat(koszul_sign(p, degs)), l3.eval(V, base));
        CHECK(got == want);
    }
    CHECK(l3.eval(V, {0, 1, 0}) == l3.eval(V, {0, 0, 1}));

    // repeated odd argument forces zero
    CHECK(l3.eval(V, {2, 2, 1}).empty());
    MultiBracket l2(2, true);
    CHECK_THROWS_AS(l2.set(V, {2, 2}, {{0, Rat(1)}}), SemanticError);
    l2.set(V, {2, 2}, {});  // declaring the forced zero is fine

    // degree rule is enforced
    CHECK_THROWS_AS(l2.set(V, {0, 1}, {{0, Rat(1)}}), SemanticError);
}

// --------------------------------------------------------- L-infinity ----

TEST_CASE("l-infinity: zero brackets and a shifted lie algebra pass") {
    GradedSpace V = sl2_space();
    CHECK(check_l_infinity(V, {}, 4).ok);

    HomotopyReport rep = check_l_infinity(V, {sl2_bracket(V, Rat(2))}, 5);
    CHECK(rep.ok);
    CHECK(rep.failures.empty());

    // non-symmetric input is rejected
    MultiBracket bad(2, false);
    CHECK_THROWS_AS(check_l_infinity(V, {bad}, 3), SemanticError);
}

TEST_CASE("l-infinity: perturbed structure constant fails at k=3") {
    GradedSpace V = sl2_space();
    HomotopyReport rep = check_l_infinity(V, {sl2_bracket(V, Rat(3))}, 5);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.failures.size() == 1);
    const HomotopyFailure& f = rep.failures[0];
    CHECK(f.family == "jacobi");
    CHECK(f.k == 3);
    CHECK(f.args == std::vector<std::string>{"e", "f", "h"});
    CHECK(f.residual == "h");
}

TEST_CASE("l-infinity: dg lie algebra with l1 and l2 passes all arities") {
    // u,v in degree -1, w in degree 0; l1(v) = w, l2(u,v) = v, l2(u,w) = w.
    // Classically: d(v) = w with [u,v] = v, [u,w] = w; d is a bracket
    // derivation and Jacobi holds, checked by hand.
    GradedSpace V;
    V.add("u", -1);
    V.add("v", -1);
    V.add("w", 0);
    MultiBracket l1(1, true), l2(2, true);
    l1.set(V, {1}, {{2, Rat(1)}});
    l2.set(V, {0, 1}, {{1, Rat(1)}});
    l2.set(V, {0, 2}, {{2, Rat(1)}});
    HomotopyReport rep = check_l_infinity(V, {l1, l2}, 5);
    CHECK(rep.ok);
}

// --------------------------------------------------------- A-infinity ----

TEST_CASE("a-infinity: upper triangular matrices pass, a warped table fails") {
    // 2x2 upper-triangular matrix units in degree -1; products checked by
    // hand before encoding (e11*e11 = e11, e11*e12 = e12, e12*e22 = e12,
    // e22*e22 = e22, all other products zero).
    GradedSpace U;
    U.add("e11", -1);
    U.add("e12", -1);
    U.add("e22", -1);
    MultiBracket a2(2, false);
    a2.set(U, {0, 0}, {{0, Rat(1)}});
    a2.set(U, {0, 1}, {{1, Rat(1)}});
    a2.set(U, {1, 2}, {{1, Rat(1)}});
    a2.set(U, {2, 2}, {{2, Rat(1)}});
    CHECK(check_a_infinity(U, {}, 4).ok);
    CHECK(check_a_infinity(U, {a2}, 4).ok);

    // one non-associative triple: (p*p)*p = q*p = 0 but p*(p*p) = p*q = p
    GradedSpace W;
    W.add("p", -1);
    W.add("q", -1);
    MultiBracket b2(2, false);
    b2.set(W, {0, 0}, {{1, Rat(1)}});
    b2.set(W, {0, 1}, {{0, Rat(1)}});
    HomotopyReport rep = check_a_infinity(W, {b2}, 4);
    CHECK_FALSE(rep.ok);
    REQUIRE(!rep.failures.empty());
    const HomotopyFailure& f = rep.failures[0];
    CHECK(f.family == "assoc");
    CHECK(f.k == 3);
    CHECK(f.args == std::vector<std::string>{"p", "p", "p"});
    CHECK(f.residual == "-p");

    // symmetric tables are rejected by the associative checker
    MultiBracket sym(2, true);
    CHECK_THROWS_AS(check_a_infinity(W, {sym}, 3), SemanticError);
}

// -------------------------------------------------------- LR-infinity ----

namespace {

// truncated polynomial coefficients: A = span{one, x} with x*x = 0,
// L = span{v} for v = x*d/dx, act(x,v) = x^2*d/dx = 0, m2(v|x) = v(x) = x
LrData truncated_pair() {
    LrData d;
    d.A.add("one", 0);
    d.A.add("x", 0);
    d.L.add("v", -1);
    d.mul.set(d.A, 0, 0, {{0, Rat(1)}});
    d.mul.set(d.A, 0, 1, {{1, Rat(1)}});
    d.act.set(d.A, d.L, 0, 0, {{0, Rat(1)}});
    ModuleMap m2(2);
    m2.set(d.L, d.A, {0}, 1, {{1, Rat(1)}});
    d.m.push_back(std::move(m2));
    return d;
}

} // namespace

TEST_CASE("lr-infinity: degenerate lie-rinehart data passes") {
    // A = ground field, L = shifted sl(2) with the unit acting trivially
    LrData d;
    d.A.add("one", 0);
    d.L = sl2_space();
    d.mul.set(d.A, 0, 0, {{0, Rat(1)}});
    for (int v = 0; v < 3; ++v)
        d.act.set(d.A, d.L, 0, v, {{v, Rat(1)}});
    d.l.push_back(sl2_bracket(d.L, Rat(2)));
    HomotopyReport rep = check_lr_infinity(d, 4);
    CHECK(rep.ok);
}

TEST_CASE("lr-infinity: truncated vector fields pass, corrupted action fails") {
    CHECK(check_lr_infinity(truncated_pair(), 4).ok);

    LrData bad = truncated_pair();
    bad.act.set(bad.A, bad.L, 1, 0, {{0, Rat(1)}});  // x*v = v, breaks linearity
    HomotopyReport rep = check_lr_infinity(bad, 4);
    CHECK_FALSE(rep.ok);
    auto it = std::find_if(rep.failures.begin(), rep.failures.end(),
                           [](const HomotopyFailure& f) {
                               return f.family == "multilinear";
                           });
    REQUIRE(it != rep.failures.end());
    CHECK(it->k == 2);
    CHECK(it->args == std::vector<std::string>{"x*v", "|", "x"});
    CHECK(it->residual == "x");
}

// --------------------------------------------- CE derivation relations ----

namespace {

// graded commutative algebra on {one:0, th:1, u:2, uth:3}, th*u = uth
struct CeFixture {
    GradedSpace S;
    ProductTable mul;
    CeFixture() {
        S.add("one", 0);
        S.add("th", 1);
        S.add("u", 2);
        S.add("uth", 3);
        for (int i = 0; i < 4; ++i)
            mul.set(S, 0, i, {{i, Rat(1)}});
        mul.set(S, 1, 2, {{3, Rat(1)}});
    }
};

} // namespace

TEST_CASE("ce relations: a single squaring-to-zero differential passes") {
    CeFixture fx;
    LinMap d1;
    d1.entries[1] = {{2, Rat(1)}};  // th -> u
    HomotopyReport rep = check_ce_relations(fx.S, fx.mul, {d1});
    CHECK(rep.ok);
}

TEST_CASE("ce relations: anticommutator failure is located at k=3") {
    CeFixture fx;
    LinMap d1, d2;
    d1.entries[1] = {{2, Rat(1)}};  // d1: th -> u
    d2.entries[2] = {{3, Rat(1)}};  // d2: u -> uth
    HomotopyReport rep = check_ce_relations(fx.S, fx.mul, {d1, d2});
    CHECK_FALSE(rep.ok);
    auto it = std::find_if(
        rep.failures.begin(), rep.failures.end(),
        [](const HomotopyFailure& f) { return f.family == "ce-bracket"; });
    REQUIRE(it != rep.failures.end());
    CHECK(it->k == 3);
    CHECK(it->args == std::vector<std::string>{"th"});
    CHECK(it->residual == "2*uth");
    // the squared total differential also detects it
    CHECK(std::any_of(
        rep.failures.begin(), rep.failures.end(),
        [](const HomotopyFailure& f) { return f.family == "ce-total"; }));
}

TEST_CASE("ce relations: non-derivations are reported distinctly") {
    CeFixture fx;
    LinMap bad;
    bad.entries[0] = {{1, Rat(1)}};  // one -> th cannot be a derivation
    HomotopyReport rep = check_ce_relations(fx.S, fx.mul, {bad});
    CHECK_FALSE(rep.ok);
    REQUIRE(!rep.failures.empty());
    CHECK(rep.failures[0].family == "ce-derivation");
    CHECK(rep.failures[0].k == 1);
    CHECK(rep.failures[0].args == std::vector<std::string>{"one*one"});

    LinMap off;
    off.entries[1] = {{3, Rat(1)}};  // th -> uth jumps two degrees
    HomotopyReport rep2 = check_ce_relations(fx.S, fx.mul, {off});
    CHECK_FALSE(rep2.ok);
    CHECK(rep2.failures[0].family == "ce-degree");
}

// -------------------------------------------------------------- parsing ----

TEST_CASE("bracket table files parse and feed the checkers") {
    std::string sl2 =
        "# shifted lie algebra\n"
        "basis: e:-1, f:-1, h:-1\n"
        "l2: (e,f) -> h\n"
        "l2: (h,e) -> 2*e\n"
        "l2: (h,f) -> -2*f\n";
    auto [V, brackets] = parse_bracket_table_text(sl2, 'l');
    CHECK(V.dim() == 3);
    CHECK(check_l_infinity(V, brackets, 5).ok);

    std::string assoc =
        "basis: p:-1, q:-1\n"
        "a2: (p,p) -> q\n"
        "a2: (p,q) -> p\n";
    auto [U, ops] = parse_bracket_table_text(assoc, 'a');
    CHECK_FALSE(check_a_infinity(U, ops, 3).ok);

    CHECK_THROWS_AS(parse_bracket_table_text("basis: e:x\n", 'l'), SyntaxError);
    CHECK_THROWS_AS(parse_bracket_table_text("junk: 1\n", 'l'), SyntaxError);
    CHECK_THROWS_AS(parse_bracket_table_text("l2: (e,f) -> e\n", 'l'),
                    SemanticError);
    CHECK_THROWS_AS(
        parse_bracket_table_text("basis: e:-1\nl2: (e) -> e\n", 'l'),
        SemanticError);
    CHECK_THROWS_AS(
        parse_bracket_table_text("basis: e:-1\nl1: (e) -> q\n", 'l'),
        SemanticError);
    CHECK_THROWS_AS(
        parse_bracket_table_text("basis: e:-1, q:3\nl1: (e) -> q\n", 'l'),
        SemanticError);
    CHECK_THROWS_AS(
        parse_bracket_table_text("basis: e:-1\nl1: (e) - q\n", 'l'),
        SyntaxError);
}

TEST_CASE("lr table files parse and feed the checker") {
    std::string good =
        "abasis: one:0, x:0\n"
        "lbasis: v:-1\n"
        "mul: (one,one) -> one\n"
        "mul: (one,x) -> x\n"
        "act: (one,v) -> v\n"
        "m2: (v | one) -> 0\n"
        "m2: (v | x) -> x\n";
    LrData d = parse_lr_table_text(good);
    CHECK(d.A.dim() == 2);
    CHECK(d.L.dim() == 1);
    CHECK(check_lr_infinity(d, 4).ok);

    std::string corrupted = good + "act: (x,v) -> v\n";
    CHECK_FALSE(check_lr_infinity(parse_lr_table_text(corrupted), 4).ok);

    CHECK_THROWS_AS(parse_lr_table_text("abasis: one:0\n"), SemanticError);
    CHECK_THROWS_AS(
        parse_lr_table_text("abasis: one:0\nlbasis: v:-1\nm2: (v) -> 0\n"),
        SyntaxError);
    CHECK_THROWS_AS(parse_lr_table_text(good + "mul: (one) -> one\n"),
                    SemanticError);
}

TEST_CASE("vector expression parsing and printing") {
    GradedSpace V;
    V.add("e1", 0);
    V.add("e2", 1);
    CHECK(parse_kvec("0", V).empty());
    CHECK(parse_kvec("3*e2", V) == KVec{{1, Rat(3)}});
    CHECK(parse_kvec("e1 - 1/2*e2", V) == KVec{{0, Rat(1)}, {1, Rat(-1, 2)}});
    CHECK(parse_kvec("e1 + e2 - e1", V) == KVec{{1, Rat(1)}});
    CHECK(kvec_str(V, parse_kvec("e1 - 1/2*e2", V)) == "e1 - 1/2*e2");
    CHECK(kvec_str(V, {}) == "0");
    CHECK_THROWS_AS(parse_kvec("", V), SyntaxError);
    CHECK_THROWS_AS(parse_kvec("e1 e2", V), SyntaxError);
    CHECK_THROWS_AS(parse_kvec("zz", V), SemanticError);
}
