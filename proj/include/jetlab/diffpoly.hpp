#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jetlab/errors.hpp"

namespace jetlab {

using Rat = boost::multiprecision::cpp_rational;

/* One global chart: independents x^1..x^n, dependents u^1..u^m, both
   addressed 0-based internally. Names double as parser identifiers. */
struct Context {
    std::vector<std::string> indep;
    std::vector<std::string> dep;

    int n() const { return (int)indep.size(); }
    int m() const { return (int)dep.size(); }
    int indep_index(const std::string& name) const;
    int dep_index(const std::string& name) const;
    bool operator==(const Context&) const = default;
};

/* A multi-index is an order-insensitive word in the independent letters,
   kept sorted ascending. The empty word is the 0th derivative. */
using MultiIndex = std::vector<int>;

MultiIndex mi_sorted(MultiIndex raw);
MultiIndex mi_concat(const MultiIndex& a, const MultiIndex& b);
MultiIndex mi_plus(const MultiIndex& a, int letter);
bool mi_contains(const MultiIndex& big, const MultiIndex& small);
MultiIndex mi_minus(const MultiIndex& big, const MultiIndex& small);
std::string mi_str(const MultiIndex& mi, const Context& ctx);

/* Jet coordinate: either x^i or u^alpha_I. Ordering puts independents
   first, then derivatives by (alpha, |I|, lexicographic I); this is the
   variable order behind all canonical printing. */
struct JetVar {
    bool jet = false; // false: independent x^idx, true: derivative
    int idx = 0;      // independent index, or dependent index alpha
    MultiIndex mi;    // derivative word, empty for independents and u^alpha

    static JetVar x(int i) { return JetVar{false, i, {}}; }
    static JetVar u(int alpha, MultiIndex I = {}) { return JetVar{true, alpha, std::move(I)}; }

    int order() const { return jet ? (int)mi.size() : 0; }
    bool operator==(const JetVar&) const = default;
    bool operator<(const JetVar& o) const;
    std::string str(const Context& ctx) const;
};

/* Monomial: jet variables with positive exponents, sorted ascending by
   variable. Term order is graded, ties broken lexicographically on the
   descending variable sequence, so u_tt > u_xx > u_x > u > t > x. */
using Monomial = std::vector<std::pair<JetVar, int>>;

int mono_degree(const Monomial& m);
Monomial mono_mul(const Monomial& a, const Monomial& b);

struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

class DiffPoly {
public:
    using Terms = std::map<Monomial, Rat, MonoLess>;

    DiffPoly() = default;
    static DiffPoly constant(Rat c);
    static DiffPoly var(const JetVar& v);

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rat constant_value() const; // 0 for the zero polynomial
    int degree() const;         // total degree, 0 for constants and zero
    int jet_order() const;      // max |I| over occurring derivatives
    size_t term_count() const { return terms_.size(); }
    std::vector<JetVar> variables() const; // distinct, ascending

    DiffPoly operator-() const;
    DiffPoly operator+(const DiffPoly& o) const;
    DiffPoly operator-(const DiffPoly& o) const;
    DiffPoly operator*(const DiffPoly& o) const;
    DiffPoly& operator+=(const DiffPoly& o);
    DiffPoly& operator-=(const DiffPoly& o);
    DiffPoly operator*(const Rat& c) const;
    DiffPoly pow(unsigned e) const;
    bool operator==(const DiffPoly& o) const { return terms_ == o.terms_; }

    void add_term(Monomial m, Rat c); // canonicalizing accumulate
    std::string str(const Context& ctx) const;

private:
    Terms terms_;
};

DiffPoly partial(const DiffPoly& p, const JetVar& v);
DiffPoly total_derivative(const Context& ctx, const DiffPoly& p, int i);
DiffPoly total_derivative_multi(const Context& ctx, const DiffPoly& p, const MultiIndex& J);
DiffPoly substitute(const DiffPoly& p, const std::map<JetVar, DiffPoly>& sigma);

} // namespace jetlab
