#include "jetlab/symmetry.hpp"

#include <algorithm>

#include "jetlab/parse.hpp"

namespace jetlab {

DiffPoly evolutionary_apply(const Context& ctx, const Section& chi, const DiffPoly& p) {
    if ((int)chi.size() != ctx.m())
        throw SemanticError("section has " + std::to_string(chi.size()) +
                            " components, expected " + std::to_string(ctx.m()));
    DiffPoly r;
    for (const JetVar& v : p.variables()) {
        if (!v.jet)
            continue;
        DiffPoly pv = partial(p, v);
        if (pv.is_zero())
            continue;
        r += total_derivative_multi(ctx, chi[v.idx], v.mi) * pv;
    }
    return r;
}

Section jacobi_bracket(const Context& ctx, const Section& chi, const Section& psi) {
    if (chi.size() != psi.size())
        throw SemanticError("section component counts differ");
    Section out;
    out.reserve(chi.size());
    for (size_t a = 0; a < chi.size(); ++a)
        out.push_back(evolutionary_apply(ctx, chi, psi[a]) -
                      evolutionary_apply(ctx, psi, chi[a]));
    return out;
}

std::vector<DiffPoly> linearization(const PdeSystem& sys, const Section& chi) {
    std::vector<DiffPoly> out;
    out.reserve(sys.equations().size());
    for (const Equation& eq : sys.equations()) {
        DiffPoly f = DiffPoly::var(eq.principal) - eq.rhs;
        out.push_back(sys.reduce(evolutionary_apply(sys.ctx(), chi, f)));
    }
    return out;
}

SymmetryReport symmetry_check(const PdeSystem& sys, const Section& chi) {
    SymmetryReport rep;
    rep.residuals = linearization(sys, chi);
    for (const DiffPoly& r : rep.residuals)
        if (!r.is_zero())
            rep.ok = false;
    return rep;
}

namespace {

// monomials of degree <= max_degree over the given variables, ascending
std::vector<Monomial> monomial_pool(const std::vector<JetVar>& vars, int max_degree) {
    std::vector<Monomial> out{{}};
    for (int d = 1; d <= max_degree; ++d) {
        std::vector<Monomial> next;
        // extend each degree-(d-1) monomial by one variable not below its last
        for (const Monomial& m : out) {
            if (mono_degree(m) != d - 1)
                continue;
            for (const JetVar& v : vars) {
                if (!m.empty() && v < m.back().first)
                    continue;
                Monomial e = m;
                if (!e.empty() && e.back().first == v)
                    ++e.back().second;
                else
                    e.emplace_back(v, 1);
                next.push_back(std::move(e));
            }
        }
        out.insert(out.end(), next.begin(), next.end());
    }
    std::sort(out.begin(), out.end(), MonoLess{});
    return out;
}

} // namespace

std::vector<Section> find_symmetries(const PdeSystem& sys, int jet_order,
                                     int poly_degree, size_t ansatz_cap) {
    const Context& ctx = sys.ctx();
    std::vector<JetVar> vars;
    for (int i = 0; i < ctx.n(); ++i)
        vars.push_back(JetVar::x(i));
    for (int a = 0; a < ctx.m(); ++a)
        for (const MultiIndex& mi : all_multiindices(ctx.n(), jet_order))
            vars.push_back(JetVar::u(a, mi));
    std::sort(vars.begin(), vars.end());
    std::vector<Monomial> pool = monomial_pool(vars, poly_degree);

    size_t cols = pool.size() * ctx.m();
    if (cols > ansatz_cap)
        throw CapError("symmetry ansatz has " + std::to_string(cols) +
                       " unknowns, cap is " + std::to_string(ansatz_cap));

    // residual of each unit ansatz section; rows are indexed by the pair
    // (equation, residual monomial)
    std::map<std::pair<int, Monomial>, std::map<size_t, Rat>,
             bool (*)(const std::pair<int, Monomial>&, const std::pair<int, Monomial>&)>
        rows(+[](const std::pair<int, Monomial>& a, const std::pair<int, Monomial>& b) {
            if (a.first != b.first)
                return a.first < b.first;
            return MonoLess{}(a.second, b.second);
        });
    for (size_t col = 0; col < cols; ++col) {
        int alpha = (int)(col / pool.size());
        const Monomial& mono = pool[col % pool.size()];
        Section unit(ctx.m());
        DiffPoly m;
        m.add_term(mono, 1);
        unit[alpha] = m;
        std::vector<DiffPoly> res = linearization(sys, unit);
        for (size_t a = 0; a < res.size(); ++a)
            for (auto& [rm, rc] : res[a].terms())
                rows[{(int)a, rm}][col] = rc;
    }

    // exact reduced row echelon form
    std::vector<std::vector<Rat>> mat;
    for (auto& [key, row] : rows) {
        std::vector<Rat> dense(cols, Rat(0));
        for (auto& [c, v] : row)
            dense[c] = v;
        mat.push_back(std::move(dense));
    }
    std::vector<long> pivot_of_col(cols, -1);
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < mat.size(); ++col) {
        size_t sel = rank;
        while (sel < mat.size() && mat[sel][col] == 0)
            ++sel;
        if (sel == mat.size())
            continue;
        std::swap(mat[rank], mat[sel]);
        Rat inv = Rat(1) / mat[rank][col];
        for (size_t j = col; j < cols; ++j)
            mat[rank][j] *= inv;
        for (size_t r = 0; r < mat.size(); ++r) {
            if (r == rank || mat[r][col] == 0)
                continue;
            Rat f = mat[r][col];
            for (size_t j = col; j < cols; ++j)
                mat[r][j] -= f * mat[rank][j];
        }
        pivot_of_col[col] = (long)rank;
        ++rank;
    }

    // nullspace basis, one vector per free column, first nonzero entry 1
    std::vector<Section> basis;
    for (size_t fc = 0; fc < cols; ++fc) {
        if (pivot_of_col[fc] >= 0)
            continue;
        std::vector<Rat> vec(cols, Rat(0));
        vec[fc] = 1;
        for (size_t c = 0; c < fc; ++c)
            if (pivot_of_col[c] >= 0)
                vec[c] = -mat[pivot_of_col[c]][fc];
        Rat lead = 0;
        for (const Rat& v : vec)
            if (v != 0) {
                lead = v;
                break;
            }
        Section s(ctx.m());
        for (size_t col = 0; col < cols; ++col) {
            if (vec[col] == 0)
                continue;
            DiffPoly m;
            m.add_term(pool[col % pool.size()], vec[col] / lead);
            s[col / pool.size()] += m;
        }
        basis.push_back(std::move(s));
    }
    return basis;
}

std::string section_str(const Context& ctx, const Section& s) {
    std::string out;
    for (size_t a = 0; a < s.size(); ++a) {
        if (a)
            out += ", ";
        out += s[a].str(ctx);
    }
    return out;
}

Section parse_section(const std::string& text, const Context& ctx) {
    Section s;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(')
            ++depth;
        if (c == ')')
            --depth;
        if (c == ',' && depth == 0) {
            s.push_back(parse_expr(cur, ctx));
            cur.clear();
        } else {
            cur += c;
        }
    }
    s.push_back(parse_expr(cur, ctx));
    if ((int)s.size() != ctx.m())
        throw SemanticError("section has " + std::to_string(s.size()) +
                            " components, expected " + std::to_string(ctx.m()));
    return s;
}

} // namespace jetlab
