#include "jetlab/diffpoly.hpp"

#include <algorithm>
#include <sstream>

namespace jetlab {

int Context::indep_index(const std::string& name) const {
    for (size_t i = 0; i < indep.size(); ++i)
        if (indep[i] == name)
            return (int)i;
    return -1;
}

int Context::dep_index(const std::string& name) const {
    for (size_t i = 0; i < dep.size(); ++i)
        if (dep[i] == name)
            return (int)i;
    return -1;
}

/******** multi-indices ********/

MultiIndex mi_sorted(MultiIndex raw) {
    std::sort(raw.begin(), raw.end());
    return raw;
}

MultiIndex mi_concat(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r;
    r.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

MultiIndex mi_plus(const MultiIndex& a, int letter) {
    MultiIndex r = a;
    r.insert(std::upper_bound(r.begin(), r.end(), letter), letter);
    return r;
}

bool mi_contains(const MultiIndex& big, const MultiIndex& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

MultiIndex mi_minus(const MultiIndex& big, const MultiIndex& small) {
    MultiIndex r;
    std::set_difference(big.begin(), big.end(), small.begin(), small.end(),
                        std::back_inserter(r));
    return r;
}

std::string mi_str(const MultiIndex& mi, const Context& ctx) {
    std::string s;
    for (int l : mi)
        s += ctx.indep[l];
    return s;
}

/******** jet variables ********/

bool JetVar::operator<(const JetVar& o) const {
    if (jet != o.jet)
        return !jet; // independents first
    if (!jet)
        return idx < o.idx;
    if (idx != o.idx)
        return idx < o.idx;
    if (mi.size() != o.mi.size())
        return mi.size() < o.mi.size();
    return mi < o.mi;
}

std::string JetVar::str(const Context& ctx) const {
    if (!jet)
        return ctx.indep[idx];
    if (mi.empty())
        return ctx.dep[idx];
    return ctx.dep[idx] + "_" + mi_str(mi, ctx);
}

/******** monomials ********/

int mono_degree(const Monomial& m) {
    int d = 0;
    for (auto& [v, e] : m)
        d += e;
    return d;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            r.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i, ++j;
        } else if (a[i].first < b[j].first) {
            r.push_back(a[i++]);
        } else {
            r.push_back(b[j++]);
        }
    }
    for (; i < a.size(); ++i)
        r.push_back(a[i]);
    for (; j < b.size(); ++j)
        r.push_back(b[j]);
    return r;
}

bool MonoLess::operator()(const Monomial& a, const Monomial& b) const {
    int da = mono_degree(a), db = mono_degree(b);
    if (da != db)
        return da < db;
    // lexicographic on the descending variable sequence
    auto ia = a.rbegin();
    auto ib = b.rbegin();
    for (; ia != a.rend() && ib != b.rend(); ++ia, ++ib) {
        if (!(ia->first == ib->first))
            return ia->first < ib->first;
        if (ia->second != ib->second)
            return ia->second < ib->second;
    }
    return false; // equal degree and identical prefix: equal monomials
}

/******** polynomials ********/

DiffPoly DiffPoly::constant(Rat c) {
    DiffPoly p;
    p.add_term({}, std::move(c));
    return p;
}

DiffPoly DiffPoly::var(const JetVar& v) {
    DiffPoly p;
    p.add_term({{v, 1}}, 1);
    return p;
}

bool DiffPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rat DiffPoly::constant_value() const {
    if (terms_.empty())
        return 0;
    return terms_.begin()->second;
}

int DiffPoly::degree() const {
    int d = 0;
    for (auto& [m, c] : terms_)
        d = std::max(d, mono_degree(m));
    return d;
}

int DiffPoly::jet_order() const {
    int k = 0;
    for (auto& [m, c] : terms_)
        for (auto& [v, e] : m)
            k = std::max(k, v.order());
    return k;
}

std::vector<JetVar> DiffPoly::variables() const {
    std::vector<JetVar> vs;
    for (auto& [m, c] : terms_)
        for (auto& [v, e] : m)
            vs.push_back(v);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

void DiffPoly::add_term(Monomial m, Rat c) {
    if (c == 0)
        return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(std::move(m), std::move(c));
    } else {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

DiffPoly DiffPoly::operator-() const {
    DiffPoly r;
    for (auto& [m, c] : terms_)
        r.terms_.emplace(m, -c);
    return r;
}

DiffPoly DiffPoly::operator+(const DiffPoly& o) const {
    DiffPoly r = *this;
    r += o;
    return r;
}

DiffPoly DiffPoly::operator-(const DiffPoly& o) const {
    DiffPoly r = *this;
    r -= o;
    return r;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
    for (auto& [m, c] : o.terms_)
        add_term(m, c);
    return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
    for (auto& [m, c] : o.terms_)
        add_term(m, -c);
    return *this;
}

DiffPoly DiffPoly::operator*(const DiffPoly& o) const {
    DiffPoly r;
    for (auto& [ma, ca] : terms_)
        for (auto& [mb, cb] : o.terms_)
            r.add_term(mono_mul(ma, mb), ca * cb);
    return r;
}

DiffPoly DiffPoly::operator*(const Rat& c) const {
    DiffPoly r;
    if (c == 0)
        return r;
    for (auto& [m, k] : terms_)
        r.terms_.emplace(m, k * c);
    return r;
}

DiffPoly DiffPoly::pow(unsigned e) const {
    DiffPoly r = DiffPoly::constant(1);
    for (unsigned i = 0; i < e; ++i)
        r = r * *this;
    return r;
}

/******** printing ********/

static std::string rat_str(const Rat& c) {
    std::ostringstream os;
    os << numerator(c);
    if (denominator(c) != 1)
        os << "/" << denominator(c);
    return os.str();
}

std::string DiffPoly::str(const Context& ctx) const {
    if (terms_.empty())
        return "0";
    std::string s;
    // highest term first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const Monomial& m = it->first;
        Rat c = it->second;
        bool neg = c < 0;
        if (s.empty()) {
            if (neg)
                s += "-";
        } else {
            s += neg ? " - " : " + ";
        }
        if (neg)
            c = -c;
        std::string factors;
        for (auto& [v, e] : m) {
            if (!factors.empty())
                factors += "*";
            factors += v.str(ctx);
            if (e > 1)
                factors += "^" + std::to_string(e);
        }
        if (factors.empty()) {
            s += rat_str(c);
        } else if (c == 1) {
            s += factors;
        } else {
            s += rat_str(c) + "*" + factors;
        }
    }
    return s;
}

/******** derivatives and substitution ********/

DiffPoly partial(const DiffPoly& p, const JetVar& v) {
    DiffPoly r;
    for (auto& [m, c] : p.terms()) {
        for (size_t i = 0; i < m.size(); ++i) {
            if (!(m[i].first == v))
                continue;
            Monomial rest;
            rest.reserve(m.size());
            for (size_t j = 0; j < m.size(); ++j) {
                if (j == i) {
                    if (m[j].second > 1)
                        rest.emplace_back(m[j].first, m[j].second - 1);
                } else {
                    rest.push_back(m[j]);
                }
            }
            r.add_term(std::move(rest), c * m[i].second);
        }
    }
    return r;
}

DiffPoly total_derivative(const Context& ctx, const DiffPoly& p, int i) {
    if (i < 0 || i >= ctx.n())
        throw SemanticError("total derivative index out of range");
    DiffPoly r = partial(p, JetVar::x(i));
    for (const JetVar& v : p.variables()) {
        if (!v.jet)
            continue;
        DiffPoly pv = partial(p, v);
        if (pv.is_zero())
            continue;
        r += pv * DiffPoly::var(JetVar::u(v.idx, mi_plus(v.mi, i)));
    }
    return r;
}

DiffPoly total_derivative_multi(const Context& ctx, const DiffPoly& p, const MultiIndex& J) {
    DiffPoly r = p;
    for (int letter : J)
        r = total_derivative(ctx, r, letter);
    return r;
}

DiffPoly substitute(const DiffPoly& p, const std::map<JetVar, DiffPoly>& sigma) {
    DiffPoly r;
    for (auto& [m, c] : p.terms()) {
        DiffPoly term = DiffPoly::constant(c);
        Monomial untouched;
        for (auto& [v, e] : m) {
            auto it = sigma.find(v);
            if (it == sigma.end())
                untouched.emplace_back(v, e);
            else
                term = term * it->second.pow((unsigned)e);
        }
        if (!untouched.empty()) {
            DiffPoly mono;
            mono.add_term(std::move(untouched), 1);
            term = term * mono;
        }
        r += term;
    }
    return r;
}

} // namespace jetlab
