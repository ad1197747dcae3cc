#include "jetlab/horizontal.hpp"

#include <algorithm>

#include "jetlab/parse.hpp"

namespace jetlab {

namespace {

// sort into strictly increasing order; returns 0 on a repeated index
int sort_sign(std::vector<int>& t) {
    int sign = 1;
    for (size_t i = 1; i < t.size(); ++i)
        for (size_t j = i; j > 0 && t[j - 1] >= t[j]; --j) {
            if (t[j - 1] == t[j])
                return 0;
            std::swap(t[j - 1], t[j]);
            sign = -sign;
        }
    return sign;
}

} // namespace

HorizontalForm HorizontalForm::scalar(DiffPoly f) {
    HorizontalForm w(0);
    w.add({}, std::move(f));
    return w;
}

void HorizontalForm::add(std::vector<int> tuple, DiffPoly f) {
    if ((int)tuple.size() != deg_)
        throw SemanticError("component tuple length does not match the form degree");
    int sign = sort_sign(tuple);
    if (sign == 0 || f.is_zero())
        return;
    DiffPoly& slot = comps_[tuple];
    slot += sign < 0 ? -f : f;
    if (slot.is_zero())
        comps_.erase(tuple);
}

DiffPoly HorizontalForm::coefficient(const std::vector<int>& tuple) const {
    std::vector<int> t = tuple;
    int sign = sort_sign(t);
    auto it = comps_.find(t);
    if (sign == 0 || it == comps_.end())
        return DiffPoly();
    return sign < 0 ? -it->second : it->second;
}

HorizontalForm HorizontalForm::operator+(const HorizontalForm& o) const {
    if (deg_ != o.deg_)
        throw SemanticError("cannot add forms of different degree");
    HorizontalForm r = *this;
    for (auto& [t, f] : o.comps_)
        r.add(t, f);
    return r;
}

HorizontalForm HorizontalForm::operator-(const HorizontalForm& o) const {
    return *this + o * Rat(-1);
}

HorizontalForm HorizontalForm::operator*(const Rat& c) const {
    HorizontalForm r(deg_);
    if (c == 0)
        return r;
    for (auto& [t, f] : comps_)
        r.comps_.emplace(t, f * c);
    return r;
}

bool HorizontalForm::operator==(const HorizontalForm& o) const {
    return deg_ == o.deg_ && comps_ == o.comps_;
}

std::string HorizontalForm::str(const Context& ctx) const {
    if (comps_.empty())
        return "0";
    std::string s;
    for (auto& [t, f] : comps_) {
        if (!s.empty())
            s += " + ";
        std::string coeff = f.str(ctx);
        bool wrap = f.term_count() > 1 && !t.empty();
        if (wrap)
            coeff = "(" + coeff + ")";
        s += coeff;
        for (int i : t)
            s += " d" + ctx.indep[i];
    }
    return s;
}

HorizontalForm wedge(const HorizontalForm& a, const HorizontalForm& b) {
    HorizontalForm r(a.degree() + b.degree());
    for (auto& [ta, fa] : a.components())
        for (auto& [tb, fb] : b.components()) {
            std::vector<int> t = ta;
            t.insert(t.end(), tb.begin(), tb.end());
            r.add(std::move(t), fa * fb);
        }
    return r;
}

HorizontalForm hdiff(const Context& ctx, const HorizontalForm& w) {
    HorizontalForm r(w.degree() + 1);
    for (auto& [t, f] : w.components())
        for (int i = 0; i < ctx.n(); ++i) {
            std::vector<int> ext{i};
            ext.insert(ext.end(), t.begin(), t.end());
            r.add(std::move(ext), total_derivative(ctx, f, i));
        }
    return r;
}

ConservationReport conservation_check(const PdeSystem& sys, const HorizontalForm& J) {
    const Context& ctx = sys.ctx();
    if (J.degree() != ctx.n() - 1)
        throw SemanticError("a current must be a horizontal form of degree n-1");
    HorizontalForm dJ = hdiff(ctx, J);
    std::vector<int> top;
    for (int i = 0; i < ctx.n(); ++i)
        top.push_back(i);
    ConservationReport rep;
    rep.residual = sys.reduce(dJ.coefficient(top));
    rep.ok = rep.residual.is_zero();
    return rep;
}

SourceForm euler_lagrange(const Context& ctx, const DiffPoly& lagrangian) {
    SourceForm E;
    E.comps.resize(ctx.m());
    for (const JetVar& v : lagrangian.variables()) {
        if (!v.jet)
            continue;
        DiffPoly term = total_derivative_multi(ctx, partial(lagrangian, v), v.mi);
        if (v.mi.size() % 2)
            E.comps[v.idx] -= term;
        else
            E.comps[v.idx] += term;
    }
    return E;
}

SourceForm euler_lagrange(const Context& ctx, const HorizontalForm& L) {
    if (L.degree() != ctx.n())
        throw SemanticError("a Lagrangian must be a horizontal top form");
    std::vector<int> top;
    for (int i = 0; i < ctx.n(); ++i)
        top.push_back(i);
    return euler_lagrange(ctx, L.coefficient(top));
}

DiffPoly linop_apply(const Context& ctx, const LinOp& op, const DiffPoly& p) {
    DiffPoly r;
    for (auto& [mi, c] : op)
        r += c * total_derivative_multi(ctx, p, mi);
    return r;
}

LinOpMatrix linearization_operator(const Context& ctx, const SourceForm& E) {
    LinOpMatrix M;
    M.rows = (int)E.comps.size();
    M.cols = ctx.m();
    M.entries.resize((size_t)M.rows * M.cols);
    for (int a = 0; a < M.rows; ++a)
        for (const JetVar& v : E.comps[a].variables()) {
            if (!v.jet)
                continue;
            DiffPoly c = partial(E.comps[a], v);
            if (!c.is_zero())
                M.at(a, v.idx)[v.mi] = c;
        }
    return M;
}

namespace {

// number of distinct ways to pick the sub-multiset sub out of mi
Rat multiset_binomial(const MultiIndex& mi, const MultiIndex& sub, int n) {
    auto count = [n](const MultiIndex& m) {
        std::vector<int> c(n, 0);
        for (int l : m)
            ++c[l];
        return c;
    };
    std::vector<int> cm = count(mi), cs = count(sub);
    Rat r = 1;
    for (int i = 0; i < n; ++i) {
        // binomial(cm[i], cs[i])
        for (int k = 0; k < cs[i]; ++k)
            r *= Rat(cm[i] - k, k + 1);
    }
    return r;
}

// all sub-multisets of mi, each once
void submultisets(const MultiIndex& mi, std::vector<MultiIndex>& out) {
    std::map<int, int> c;
    for (int l : mi)
        ++c[l];
    out = {{}};
    for (auto& [letter, count] : c) {
        std::vector<MultiIndex> next;
        for (const MultiIndex& base : out)
            for (int k = 0; k <= count; ++k) {
                MultiIndex e = base;
                for (int j = 0; j < k; ++j)
                    e.push_back(letter);
                next.push_back(std::move(e));
            }
        out = std::move(next);
    }
    for (MultiIndex& m : out)
        m = mi_sorted(std::move(m));
}

} // namespace

LinOpMatrix formal_adjoint(const Context& ctx, const LinOpMatrix& M) {
    if (M.rows != M.cols)
        throw SemanticError("formal adjoint requires a square operator matrix");
    LinOpMatrix A;
    A.rows = M.rows;
    A.cols = M.cols;
    A.entries.resize((size_t)A.rows * A.cols);
    for (int a = 0; a < A.rows; ++a)
        for (int b = 0; b < A.cols; ++b) {
            // adjoint entry (a,b) = sum_I (-1)^|I| D_I ∘ (c .) for c = M(b,a)_I,
            // expanded to coefficient-left form with the Leibniz rule:
            // D_I ∘ (c .) = sum_{J ⊆ I} binom(I,J) (D_J c) D_{I−J}
            LinOp& out = A.at(a, b);
            for (auto& [mi, c] : M.at(b, a)) {
                int sgn = mi.size() % 2 ? -1 : 1;
                std::vector<MultiIndex> subs;
                submultisets(mi, subs);
                for (const MultiIndex& J : subs) {
                    DiffPoly coeff = total_derivative_multi(ctx, c, J) *
                                     (multiset_binomial(mi, J, ctx.n()) * Rat(sgn));
                    if (coeff.is_zero())
                        continue;
                    DiffPoly& slot = out[mi_minus(mi, J)];
                    slot += coeff;
                }
            }
            // drop zero entries so normal forms compare exactly
            for (auto it = out.begin(); it != out.end();)
                it = it->second.is_zero() ? out.erase(it) : std::next(it);
        }
    return A;
}

bool helmholtz_check(const Context& ctx, const SourceForm& E) {
    if ((int)E.comps.size() != ctx.m())
        throw SemanticError("source form has wrong component count");
    LinOpMatrix l = linearization_operator(ctx, E);
    return l == formal_adjoint(ctx, l);
}

std::string linop_str(const Context& ctx, const LinOp& op) {
    if (op.empty())
        return "0";
    // low order first, constant part leading: matches D_t - u_x - u*D_x style
    std::string s;
    for (auto& [mi, c] : op) {
        std::string cs = c.str(ctx);
        std::string piece;
        if (mi.empty()) {
            piece = c.term_count() > 1 ? "(" + cs + ")" : cs;
        } else {
            std::string d = "D_" + mi_str(mi, ctx);
            if (c == DiffPoly::constant(1))
                piece = d;
            else if (c == DiffPoly::constant(-1))
                piece = "-" + d;
            else if (c.term_count() > 1)
                piece = "(" + cs + ")*" + d;
            else
                piece = cs + "*" + d;
        }
        if (s.empty()) {
            s = piece;
        } else if (!piece.empty() && piece[0] == '-') {
            s += " - " + piece.substr(1);
        } else {
            s += " + " + piece;
        }
    }
    return s;
}

HorizontalForm parse_form(const std::string& text, const Context& ctx) {
    /* Terms separated by top-level '+'/'-'; each term is an optional
       coefficient expression followed by space-separated dx atoms. */
    std::vector<std::pair<std::string, int>> pieces; // term text, sign
    std::string cur;
    int depth = 0, sign = 1;
    auto flush = [&](int next_sign) {
        std::string t = cur;
        cur.clear();
        size_t b = t.find_first_not_of(" \t");
        if (b == std::string::npos) {
            if (sign < 0)
                throw SyntaxError("dangling sign in form expression");
            sign = next_sign;
            return;
        }
        pieces.emplace_back(t, sign);
        sign = next_sign;
    };
    for (char c : text) {
        if (c == '(')
            ++depth;
        if (c == ')')
            --depth;
        if (depth == 0 && (c == '+' || c == '-')) {
            // a sign splits terms only when it follows a dx atom or coefficient,
            // i.e. when the accumulated text is nonblank
            if (cur.find_first_not_of(" \t") != std::string::npos) {
                flush(c == '-' ? -1 : 1);
                continue;
            }
            if (c == '-') {
                sign = -sign;
                continue;
            }
            continue;
        }
        cur += c;
    }
    flush(1);
    if (pieces.empty())
        throw SyntaxError("empty form expression");

    int degree = -1;
    HorizontalForm out(0);
    bool first = true;
    for (auto& [term, sgn] : pieces) {
        // split trailing dx atoms off the coefficient expression
        std::vector<std::string> atoms;
        std::string coeff = term;
        for (;;) {
            size_t e = coeff.find_last_not_of(" \t");
            if (e == std::string::npos)
                break;
            size_t b = coeff.find_last_of(" \t", e);
            std::string word = coeff.substr(b == std::string::npos ? 0 : b + 1,
                                            e - (b == std::string::npos ? 0 : b + 1) + 1);
            if (word.size() >= 2 && word[0] == 'd' &&
                ctx.indep_index(word.substr(1)) >= 0) {
                atoms.insert(atoms.begin(), word);
                coeff = b == std::string::npos ? "" : coeff.substr(0, b);
            } else {
                break;
            }
        }
        if (degree < 0) {
            degree = (int)atoms.size();
            out = HorizontalForm(degree);
        } else if ((int)atoms.size() != degree) {
            throw SyntaxError("form terms have mixed degrees");
        }
        DiffPoly f = coeff.find_first_not_of(" \t") == std::string::npos
                         ? DiffPoly::constant(1)
                         : parse_expr(coeff, ctx);
        if (sgn < 0)
            f = -f;
        std::vector<int> tuple;
        for (const std::string& a : atoms)
            tuple.push_back(ctx.indep_index(a.substr(1)));
        out.add(std::move(tuple), std::move(f));
        first = false;
    }
    (void)first;
    return out;
}

} // namespace jetlab
