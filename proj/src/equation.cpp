#include "jetlab/equation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "jetlab/parse.hpp"

namespace jetlab {

namespace {

// letter counts of a multi-index
std::vector<int> counts(const MultiIndex& mi, int n) {
    std::vector<int> c(n, 0);
    for (int l : mi)
        ++c[l];
    return c;
}

/* Fourier-Motzkin elimination over exact rationals. Rows encode
   a_0 w_0 + ... + a_{n-1} w_{n-1} >= a_n. */
using Row = std::vector<Rat>;

std::optional<std::vector<Rat>> fm_solve(std::vector<Row> rows, int n) {
    if (rows.size() > 200000)
        throw CapError("ranking constraint system too large");
    if (n == 0) {
        for (const Row& r : rows)
            if (r.back() > 0)
                return std::nullopt;
        return std::vector<Rat>{};
    }
    int k = n - 1;
    std::vector<Row> lower, upper, rest;
    for (Row& r : rows) {
        if (r[k] > 0)
            lower.push_back(std::move(r));
        else if (r[k] < 0)
            upper.push_back(std::move(r));
        else
            rest.push_back(std::move(r));
    }
    for (const Row& lo : lower) {
        for (const Row& up : upper) {
            // lo[k] > 0, up[k] < 0: the combination eliminates w_k
            Row c(n + 1);
            for (int j = 0; j <= n; ++j)
                c[j] = lo[j] * (-up[k]) + up[j] * lo[k];
            c[k] = 0;
            rest.push_back(std::move(c));
        }
    }
    auto sub = fm_solve(rest, k);
    if (!sub)
        return std::nullopt;
    std::vector<Rat>& w = *sub;
    Rat wk = 0; // nonnegative, and at least every lower bound
    for (const Row& lo : lower) {
        Rat bound = lo.back();
        for (int j = 0; j < k; ++j)
            bound -= lo[j] * w[j];
        bound /= lo[k];
        if (bound > wk)
            wk = bound;
    }
    w.push_back(wk);
    return w;
}

void enumerate_multiindices(int n, int size, MultiIndex& cur, int from,
                            std::vector<MultiIndex>& out) {
    if ((int)cur.size() == size) {
        out.push_back(cur);
        return;
    }
    for (int l = from; l < n; ++l) {
        cur.push_back(l);
        enumerate_multiindices(n, size, cur, l, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<MultiIndex> all_multiindices(int n, int max_order) {
    std::vector<MultiIndex> out;
    MultiIndex cur;
    for (int s = 0; s <= max_order; ++s)
        enumerate_multiindices(n, s, cur, 0, out);
    return out;
}

std::optional<std::vector<long>> ranking_weights(const Context& ctx,
                                                 const std::vector<Equation>& eqs) {
    int n = ctx.n();
    std::vector<Row> rows;
    for (int i = 0; i < n; ++i) { // w_i >= 0
        Row r(n + 1, Rat(0));
        r[i] = 1;
        rows.push_back(std::move(r));
    }
    for (const Equation& eq : eqs) {
        std::vector<int> ic = counts(eq.principal.mi, n);
        for (const JetVar& v : eq.rhs.variables()) {
            if (!v.jet)
                continue;
            std::vector<int> kc = counts(v.mi, n);
            Row r(n + 1, Rat(0));
            for (int i = 0; i < n; ++i)
                r[i] = ic[i] - kc[i];
            r[n] = 1; // strict drop: w(I_a) >= w(K) + 1
            rows.push_back(std::move(r));
        }
    }
    auto sol = fm_solve(std::move(rows), n);
    if (!sol)
        return std::nullopt;
    // scale the rational point up to integers; scaling up preserves feasibility
    boost::multiprecision::cpp_int den = 1;
    for (const Rat& w : *sol)
        den = boost::multiprecision::lcm(den, denominator(w));
    std::vector<long> out;
    for (const Rat& w : *sol) {
        Rat scaled = w * Rat(den);
        out.push_back(scaled.convert_to<long>());
    }
    return out;
}

PdeSystem::PdeSystem(Context ctx, std::vector<Equation> eqs, long rewrite_cap)
    : ctx_(std::move(ctx)), eqs_(std::move(eqs)), rewrite_cap_(rewrite_cap) {
    for (size_t a = 0; a < eqs_.size(); ++a) {
        const JetVar& p = eqs_[a].principal;
        if (!p.jet)
            throw SemanticError("left side must be a derivative of a dependent variable");
        if (p.idx < 0 || p.idx >= ctx_.m())
            throw SemanticError("principal derivative out of range");
        for (size_t b = 0; b < a; ++b)
            if (eqs_[b].principal == p)
                throw SemanticError("duplicate principal derivative " + p.str(ctx_));
    }
    auto w = ranking_weights(ctx_, eqs_);
    if (!w)
        throw SemanticError(
            "system is not well-founded: no ranking weights make every "
            "right-hand side lower than its principal derivative");
    weights_ = *w;
}

int PdeSystem::match(const JetVar& v) const {
    if (!v.jet)
        return -1;
    int best = -1;
    for (size_t a = 0; a < eqs_.size(); ++a) {
        const JetVar& p = eqs_[a].principal;
        if (p.idx != v.idx || !mi_contains(v.mi, p.mi))
            continue;
        if (best < 0)
            best = (int)a;
        else {
            const JetVar& q = eqs_[best].principal;
            if (p.mi.size() > q.mi.size() ||
                (p.mi.size() == q.mi.size() && p.mi > q.mi))
                best = (int)a;
        }
    }
    return best;
}

DiffPoly PdeSystem::reduce_impl(const DiffPoly& p, std::map<JetVar, DiffPoly>& memo,
                                long& budget) const {
    DiffPoly out;
    for (auto& [mono, coeff] : p.terms()) {
        DiffPoly term = DiffPoly::constant(coeff);
        Monomial untouched;
        for (auto& [v, e] : mono) {
            int a = match(v);
            if (a < 0) {
                untouched.emplace_back(v, e);
                continue;
            }
            auto it = memo.find(v);
            if (it == memo.end()) {
                if (--budget < 0)
                    throw CapError("rewrite cap exceeded; the system is ill-posed "
                                   "or the cap is too small");
                MultiIndex rem = mi_minus(v.mi, eqs_[a].principal.mi);
                DiffPoly expanded = total_derivative_multi(ctx_, eqs_[a].rhs, rem);
                DiffPoly red = reduce_impl(expanded, memo, budget);
                it = memo.emplace(v, std::move(red)).first;
            }
            term = term * it->second.pow((unsigned)e);
        }
        if (!untouched.empty()) {
            DiffPoly mfac;
            mfac.add_term(std::move(untouched), 1);
            term = term * mfac;
        }
        out += term;
    }
    return out;
}

DiffPoly PdeSystem::reduce(const DiffPoly& p) const {
    std::map<JetVar, DiffPoly> memo;
    long budget = rewrite_cap_;
    return reduce_impl(p, memo, budget);
}

bool PdeSystem::is_zero_on_shell(const DiffPoly& p) const {
    return reduce(p).is_zero();
}

std::pair<JetVar, DiffPoly> PdeSystem::prolong(int a, const MultiIndex& J) const {
    if (a < 0 || a >= (int)eqs_.size())
        throw SemanticError("equation index out of range");
    for (int l : J)
        if (l < 0 || l >= ctx_.n())
            throw SemanticError("prolongation letter out of range");
    JetVar principal = JetVar::u(eqs_[a].principal.idx,
                                 mi_concat(eqs_[a].principal.mi, mi_sorted(J)));
    return {principal, reduce(total_derivative_multi(ctx_, eqs_[a].rhs, J))};
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

} // namespace

PdeSystem parse_system_text(const std::string& text, long rewrite_cap) {
    Context ctx;
    std::vector<std::pair<std::string, std::string>> raw_eqs; // lhs, rhs
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        size_t colon = t.find(':');
        if (colon == std::string::npos)
            throw SyntaxError("line " + std::to_string(lineno) + ": expected 'keyword: ...'");
        std::string key = trim(t.substr(0, colon));
        std::string rest = trim(t.substr(colon + 1));
        if (key == "independent" || key == "dependent") {
            auto& names = key == "independent" ? ctx.indep : ctx.dep;
            for (const std::string& nm : split_list(rest)) {
                check_name(nm);
                if (ctx.indep_index(nm) >= 0 || ctx.dep_index(nm) >= 0)
                    throw SemanticError("line " + std::to_string(lineno) +
                                        ": duplicate variable name '" + nm + "'");
                names.push_back(nm);
            }
        } else if (key == "eq") {
            size_t eqpos = rest.find('=');
            if (eqpos == std::string::npos)
                throw SyntaxError("line " + std::to_string(lineno) + ": expected '='");
            raw_eqs.emplace_back(trim(rest.substr(0, eqpos)), trim(rest.substr(eqpos + 1)));
        } else {
            throw SyntaxError("line " + std::to_string(lineno) + ": unknown directive '" +
                              key + "'");
        }
    }
    if (ctx.n() == 0 || ctx.m() == 0)
        throw SemanticError("system file must declare independent and dependent variables");
    std::vector<Equation> eqs;
    for (auto& [lhs, rhs] : raw_eqs) {
        JetVar principal;
        try {
            principal = parse_jetvar(lhs, ctx);
        } catch (const SemanticError&) {
            throw SyntaxError("left side '" + lhs +
                              "' must be a bare derivative identifier");
        }
        if (!principal.jet)
            throw SyntaxError("left side '" + lhs +
                              "' must be a bare derivative identifier");
        eqs.push_back({principal, parse_expr(rhs, ctx)});
    }
    return PdeSystem(std::move(ctx), std::move(eqs), rewrite_cap);
}

PdeSystem parse_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_system_text(ss.str());
}

PassivityReport PdeSystem::check_passivity(int up_to_order) const {
    PassivityReport rep;
    for (size_t a = 0; a < eqs_.size(); ++a) {
        for (size_t b = a + 1; b < eqs_.size(); ++b) {
            if (eqs_[a].principal.idx != eqs_[b].principal.idx)
                continue;
            const MultiIndex& ia = eqs_[a].principal.mi;
            const MultiIndex& ib = eqs_[b].principal.mi;
            // least common derivative of the two principals
            std::vector<int> ca = counts(ia, ctx_.n()), cb = counts(ib, ctx_.n());
            MultiIndex l0;
            for (int i = 0; i < ctx_.n(); ++i)
                for (int r = 0; r < std::max(ca[i], cb[i]); ++r)
                    l0.push_back(i);
            if ((int)l0.size() > up_to_order)
                continue;
            for (const MultiIndex& extra :
                 all_multiindices(ctx_.n(), up_to_order - (int)l0.size())) {
                MultiIndex L = mi_concat(l0, extra);
                DiffPoly ra = reduce(total_derivative_multi(ctx_, eqs_[a].rhs, mi_minus(L, ia)));
                DiffPoly rb = reduce(total_derivative_multi(ctx_, eqs_[b].rhs, mi_minus(L, ib)));
                if (!(ra == rb)) {
                    rep.ok = false;
                    rep.failures.push_back({(int)a, (int)b, L, ra, rb});
                }
            }
        }
    }
    return rep;
}

} // namespace jetlab
