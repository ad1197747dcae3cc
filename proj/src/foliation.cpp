#include "jetlab/foliation.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

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

int par(int x) { return ((x % 2) + 2) % 2; }

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Poly mat_det(const std::vector<std::vector<Poly>>& mtx) {
    size_t n = mtx.size();
    if (n == 0)
        return Poly::constant(1);
    if (n == 1)
        return mtx[0][0];
    Poly acc;
    for (size_t r = 0; r < n; ++r) {
        if (mtx[r][0].is_zero())
            continue;
        std::vector<std::vector<Poly>> sub;
        for (size_t i = 0; i < n; ++i) {
            if (i == r)
                continue;
            sub.emplace_back(mtx[i].begin() + 1, mtx[i].end());
        }
        Poly term = mtx[r][0] * mat_det(sub);
        acc += (r % 2) ? -term : term;
    }
    return acc;
}

Poly mat_minor(const std::vector<std::vector<Poly>>& mtx, size_t row, size_t col) {
    std::vector<std::vector<Poly>> sub;
    for (size_t i = 0; i < mtx.size(); ++i) {
        if (i == row)
            continue;
        std::vector<Poly> line;
        for (size_t j = 0; j < mtx.size(); ++j)
            if (j != col)
                line.push_back(mtx[i][j]);
        sub.push_back(std::move(line));
    }
    return mat_det(sub);
}

// contraction by a single frame covector slot: i_{e_a} theta^T
void contract_unit(BigradedForm& out, int a, const std::vector<int>& legs, const Poly& f) {
    for (size_t j = 0; j < legs.size(); ++j) {
        if (legs[j] != a)
            continue;
        std::vector<int> rest;
        for (size_t i = 0; i < legs.size(); ++i)
            if (i != j)
                rest.push_back(legs[i]);
        out.add(std::move(rest), (j % 2) ? -f : f);
    }
}

BigradedForm lie_frame_field(const FoliationModel& m, int a, const BigradedForm& w);

} // namespace

// ------------------------------------------------------- vector fields ----

Poly vf_apply(const Context& ctx, const VectorField& x, const Poly& f) {
    Poly r;
    for (int i = 0; i < (int)x.comps.size(); ++i) {
        if (x.comps[i].is_zero())
            continue;
        r += x.comps[i] * partial(f, JetVar::x(i));
    }
    return r;
}

VectorField vf_bracket(const Context& ctx, const VectorField& x, const VectorField& y) {
    VectorField r;
    r.comps.resize(ctx.n());
    for (int i = 0; i < ctx.n(); ++i)
        r.comps[i] = vf_apply(ctx, x, y.comps[i]) - vf_apply(ctx, y, x.comps[i]);
    return r;
}

// ---------------------------------------------------------------- model ----

FoliationModel build_model(const std::vector<std::string>& coords,
                           const std::vector<VectorField>& c_frame,
                           const std::vector<VectorField>& v_frame) {
    if (coords.empty())
        throw SemanticError("a model needs at least one coordinate");
    FoliationModel m;
    for (auto& name : coords) {
        check_name(name);
        for (auto& seen : m.ctx.indep)
            if (seen == name)
                throw SemanticError("duplicate coordinate '" + name + "'");
        m.ctx.indep.push_back(name);
    }
    m.c = (int)c_frame.size();
    m.v = (int)v_frame.size();
    m.frame = c_frame;
    m.frame.insert(m.frame.end(), v_frame.begin(), v_frame.end());
    int n = m.n();
    if ((int)m.frame.size() != n)
        throw SemanticError("frame must have exactly one field per coordinate");
    for (auto& f : m.frame)
        if ((int)f.comps.size() != n)
            throw SemanticError("vector field has the wrong number of components");

    // mtx = F^T, so the coframe matrix is its inverse
    std::vector<std::vector<Poly>> mtx(n, std::vector<Poly>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            mtx[i][j] = m.frame[j].comps[i];
    Poly det = mat_det(mtx);
    if (!det.is_constant() || det.constant_value() == 0)
        throw SemanticError("frame determinant must be a nonzero constant");
    Rat inv_det = Rat(1) / det.constant_value();
    m.coframe.assign(n, std::vector<Poly>(n));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) {
            Poly cof = mat_minor(mtx, i, a) * inv_det;
            m.coframe[a][i] = ((a + i) % 2) ? -cof : cof;
        }

    m.structure.assign(n, std::vector<std::vector<Poly>>(n, std::vector<Poly>(n)));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            VectorField w = vf_bracket(m.ctx, m.frame[a], m.frame[b]);
            std::vector<Poly> fc = frame_components(m, w);
            for (int k = 0; k < n; ++k) {
                m.structure[a][b][k] = fc[k];
                m.structure[b][a][k] = -fc[k];
            }
        }
    for (int a = 0; a < m.c; ++a)
        for (int b = a + 1; b < m.c; ++b)
            for (int k = m.c; k < n; ++k)
                if (!m.structure[a][b][k].is_zero())
                    throw SemanticError("C block is not involutive");
    return m;
}

std::vector<Poly> frame_components(const FoliationModel& m, const VectorField& x) {
    std::vector<Poly> out(m.n());
    for (int a = 0; a < m.n(); ++a)
        for (int i = 0; i < m.n(); ++i)
            out[a] += m.coframe[a][i] * x.comps[i];
    return out;
}

std::vector<Poly> bott_connection(const FoliationModel& m, int a, int b) {
    if (a < 0 || a >= m.c || b < 0 || b >= m.v)
        throw SemanticError("Bott connection indices out of range");
    std::vector<Poly> out(m.v);
    for (int k = 0; k < m.v; ++k)
        out[k] = m.structure[a][m.c + b][m.c + k];
    return out;
}

// --------------------------------------------------------- scalar forms ----

BigradedForm BigradedForm::scalar(Poly f) {
    BigradedForm w(0);
    w.add({}, std::move(f));
    return w;
}

void BigradedForm::add(std::vector<int> legs, Poly f) {
    if ((int)legs.size() != deg_)
        throw SemanticError("component tuple length does not match the form degree");
    int sign = sort_sign(legs);
    if (sign == 0 || f.is_zero())
        return;
    Poly& slot = comps_[legs];
    slot += sign < 0 ? -f : f;
    if (slot.is_zero())
        comps_.erase(legs);
}

Poly BigradedForm::coefficient(const std::vector<int>& legs) const {
    std::vector<int> t = legs;
    int sign = sort_sign(t);
    auto it = comps_.find(t);
    if (sign == 0 || it == comps_.end())
        return Poly();
    return sign < 0 ? -it->second : it->second;
}

BigradedForm BigradedForm::operator+(const BigradedForm& o) const {
    if (deg_ != o.deg_)
        throw SemanticError("cannot add forms of different degree");
    BigradedForm r = *this;
    for (auto& [t, f] : o.comps_)
        r.add(t, f);
    return r;
}

BigradedForm BigradedForm::operator-(const BigradedForm& o) const { return *this + (-o); }

BigradedForm BigradedForm::operator-() const {
    BigradedForm r(deg_);
    for (auto& [t, f] : comps_)
        r.comps_[t] = -f;
    return r;
}

BigradedForm BigradedForm::operator*(const Poly& f) const {
    BigradedForm r(deg_);
    for (auto& [t, g] : comps_)
        r.add(t, g * f);
    return r;
}

std::pair<int, int> leg_bidegree(const FoliationModel& m, const std::vector<int>& legs) {
    int q = 0;
    for (int a : legs)
        if (m.in_c(a))
            ++q;
    return {q, (int)legs.size() - q};
}

BigradedForm wedge(const BigradedForm& a, const BigradedForm& b) {
    BigradedForm r(a.degree() + b.degree());
    for (auto& [ta, fa] : a.components())
        for (auto& [tb, fb] : b.components()) {
            std::vector<int> t = ta;
            t.insert(t.end(), tb.begin(), tb.end());
            r.add(std::move(t), fa * fb);
        }
    return r;
}

BigradedForm frame_d(const FoliationModel& m, const BigradedForm& w) {
    BigradedForm r(w.degree() + 1);
    for (auto& [t, f] : w.components()) {
        for (int a = 0; a < m.n(); ++a) {
            Poly df = vf_apply(m.ctx, m.frame[a], f);
            if (df.is_zero())
                continue;
            std::vector<int> legs = {a};
            legs.insert(legs.end(), t.begin(), t.end());
            r.add(std::move(legs), std::move(df));
        }
        for (size_t j = 0; j < t.size(); ++j)
            for (int a = 0; a < m.n(); ++a)
                for (int b = a + 1; b < m.n(); ++b) {
                    const Poly& cs = m.structure[a][b][t[j]];
                    if (cs.is_zero())
                        continue;
                    std::vector<int> legs(t.begin(), t.begin() + j);
                    legs.push_back(a);
                    legs.push_back(b);
                    legs.insert(legs.end(), t.begin() + j + 1, t.end());
                    Poly term = f * cs;
                    r.add(std::move(legs), (j % 2) ? term : -term);
                }
    }
    return r;
}

BigradedForm contract(const FoliationModel& m, const std::vector<Poly>& vec,
                      const BigradedForm& w) {
    BigradedForm r(w.degree() - 1);
    if (w.degree() == 0)
        return r;
    for (auto& [t, f] : w.components())
        for (size_t j = 0; j < t.size(); ++j) {
            if (vec[t[j]].is_zero())
                continue;
            std::vector<int> rest;
            for (size_t i = 0; i < t.size(); ++i)
                if (i != j)
                    rest.push_back(t[i]);
            Poly term = f * vec[t[j]];
            r.add(std::move(rest), (j % 2) ? -term : term);
        }
    return r;
}

BigradedForm horizontal_part(const FoliationModel& m, const BigradedForm& w) {
    BigradedForm r(w.degree());
    for (auto& [t, f] : w.components()) {
        bool keep = true;
        for (int a : t)
            if (!m.in_c(a))
                keep = false;
        if (keep)
            r.add(t, f);
    }
    return r;
}

namespace {

std::string legs_str(const std::vector<int>& t) {
    std::string s;
    for (int a : t) {
        if (!s.empty())
            s += "^";
        s += "th" + std::to_string(a + 1);
    }
    return s;
}

std::string term_str(const FoliationModel& m, const std::vector<int>& t, const Poly& f) {
    std::string legs = legs_str(t);
    if (legs.empty())
        return f.str(m.ctx);
    if (f.is_constant() && f.constant_value() == 1)
        return legs;
    if (f.is_constant() && f.constant_value() == -1)
        return "-" + legs;
    std::string coeff = f.str(m.ctx);
    if (f.term_count() > 1)
        coeff = "(" + coeff + ")";
    return coeff + " " + legs;
}

} // namespace

std::string form_str(const FoliationModel& m, const BigradedForm& w) {
    if (w.is_zero())
        return "0";
    std::string s;
    for (auto& [t, f] : w.components()) {
        if (!s.empty())
            s += " + ";
        s += term_str(m, t, f);
    }
    return s;
}

// --------------------------------------------------- vector valued forms ----

void VectorValuedForm::add(std::vector<int> legs, int k, Poly f) {
    if ((int)legs.size() != deg_)
        throw SemanticError("component tuple length does not match the form degree");
    int sign = sort_sign(legs);
    if (sign == 0 || f.is_zero())
        return;
    std::vector<Poly>& slot = comps_[legs];
    if ((int)slot.size() <= k)
        slot.resize(k + 1);
    slot[k] += sign < 0 ? -f : f;
    while (!slot.empty() && slot.back().is_zero())
        slot.pop_back();
    if (slot.empty())
        comps_.erase(legs);
}

Poly VectorValuedForm::value(const std::vector<int>& legs, int k) const {
    std::vector<int> t = legs;
    int sign = sort_sign(t);
    auto it = comps_.find(t);
    if (sign == 0 || it == comps_.end() || k >= (int)it->second.size())
        return Poly();
    return sign < 0 ? -it->second[k] : it->second[k];
}

VectorValuedForm VectorValuedForm::operator+(const VectorValuedForm& o) const {
    if (deg_ != o.deg_)
        throw SemanticError("cannot add forms of different degree");
    VectorValuedForm r = *this;
    for (auto& [t, vals] : o.comps_)
        for (int k = 0; k < (int)vals.size(); ++k)
            r.add(t, k, vals[k]);
    return r;
}

VectorValuedForm VectorValuedForm::operator-(const VectorValuedForm& o) const {
    return *this + (-o);
}

VectorValuedForm VectorValuedForm::operator-() const {
    VectorValuedForm r(deg_);
    for (auto& [t, vals] : comps_) {
        std::vector<Poly> neg;
        for (auto& f : vals)
            neg.push_back(-f);
        r.comps_[t] = std::move(neg);
    }
    return r;
}

VectorValuedForm VectorValuedForm::operator*(const Poly& f) const {
    VectorValuedForm r(deg_);
    for (auto& [t, vals] : comps_)
        for (int k = 0; k < (int)vals.size(); ++k)
            r.add(t, k, vals[k] * f);
    return r;
}

VectorValuedForm vvf_of_field(const FoliationModel& m, const VectorField& x) {
    VectorValuedForm r(0);
    std::vector<Poly> fc = frame_components(m, x);
    for (int k = 0; k < m.n(); ++k)
        r.add({}, k, fc[k]);
    return r;
}

BigradedForm contract(const FoliationModel& m, const VectorValuedForm& k,
                      const BigradedForm& w) {
    BigradedForm r(k.degree() + w.degree() - 1);
    if (w.degree() == 0)
        return r;
    for (auto& [t, vals] : k.components())
        for (int a = 0; a < (int)vals.size(); ++a) {
            if (vals[a].is_zero())
                continue;
            BigradedForm inner(w.degree() - 1);
            for (auto& [s, f] : w.components())
                contract_unit(inner, a, s, f);
            BigradedForm outer(k.degree());
            outer.add(t, vals[a]);
            r = r + wedge(outer, inner);
        }
    return r;
}

VectorValuedForm contract(const FoliationModel& m, const VectorValuedForm& k,
                          const VectorValuedForm& l) {
    VectorValuedForm r(k.degree() + l.degree() - 1);
    if (l.degree() == 0)
        return r;
    for (auto& [s, vals] : l.components())
        for (int b = 0; b < (int)vals.size(); ++b) {
            if (vals[b].is_zero())
                continue;
            BigradedForm part(l.degree());
            part.add(s, vals[b]);
            BigradedForm in = contract(m, k, part);
            for (auto& [t, f] : in.components())
                r.add(t, b, f);
        }
    return r;
}

VectorValuedForm nr_bracket(const FoliationModel& m, const VectorValuedForm& k,
                            const VectorValuedForm& l) {
    VectorValuedForm r = contract(m, k, l);
    VectorValuedForm s = contract(m, l, k);
    int sign = par((k.degree() - 1) * (l.degree() - 1));
    return sign ? r + s : r - s;
}

BigradedForm lie_derivative(const FoliationModel& m, const VectorValuedForm& k,
                            const BigradedForm& w) {
    BigradedForm a = contract(m, k, frame_d(m, w));
    BigradedForm b = frame_d(m, contract(m, k, w));
    return par(k.degree() - 1) ? a + b : a - b;
}

namespace {

// Cartan formula for a single frame field
BigradedForm lie_frame_field(const FoliationModel& m, int a, const BigradedForm& w) {
    std::vector<Poly> vec(m.n());
    vec[a] = Poly::constant(1);
    return contract(m, vec, frame_d(m, w)) + frame_d(m, contract(m, vec, w));
}

} // namespace

VectorValuedForm fn_bracket(const FoliationModel& m, const VectorValuedForm& k,
                            const VectorValuedForm& l) {
    VectorValuedForm r(k.degree() + l.degree());
    int sgn = par(k.degree());
    for (auto& [t, kvals] : k.components())
        for (int x = 0; x < (int)kvals.size(); ++x) {
            if (kvals[x].is_zero())
                continue;
            BigradedForm w(k.degree());
            w.add(t, kvals[x]);
            BigradedForm dw = frame_d(m, w);
            for (auto& [s, lvals] : l.components())
                for (int y = 0; y < (int)lvals.size(); ++y) {
                    if (lvals[y].is_zero())
                        continue;
                    BigradedForm h(l.degree());
                    h.add(s, lvals[y]);

                    BigradedForm we_h = wedge(w, h);
                    for (int z = 0; z < m.n(); ++z) {
                        const Poly& cs = m.structure[x][y][z];
                        if (cs.is_zero())
                            continue;
                        for (auto& [u, f] : we_h.components())
                            r.add(u, z, f * cs);
                    }

                    BigradedForm t2 = wedge(w, lie_frame_field(m, x, h));
                    for (auto& [u, f] : t2.components())
                        r.add(u, y, f);

                    BigradedForm t3 = wedge(lie_frame_field(m, y, w), h);
                    for (auto& [u, f] : t3.components())
                        r.add(u, x, -f);

                    std::vector<Poly> ex(m.n()), ey(m.n());
                    ex[x] = Poly::constant(1);
                    ey[y] = Poly::constant(1);
                    BigradedForm t4 = wedge(dw, contract(m, ex, h));
                    for (auto& [u, f] : t4.components())
                        r.add(u, y, sgn ? -f : f);
                    BigradedForm t5 = wedge(contract(m, ey, w), frame_d(m, h));
                    for (auto& [u, f] : t5.components())
                        r.add(u, x, sgn ? -f : f);
                }
        }
    return r;
}

VectorValuedForm curvature(const FoliationModel& m) {
    VectorValuedForm r(2);
    for (int a = m.c; a < m.n(); ++a)
        for (int b = a + 1; b < m.n(); ++b)
            for (int k = 0; k < m.c; ++k)
                r.add({a, b}, k, m.structure[a][b][k]);
    return r;
}

VectorValuedForm v_horizontal_part(const FoliationModel& m, const VectorValuedForm& w) {
    VectorValuedForm r(w.degree());
    for (auto& [t, vals] : w.components()) {
        bool keep = true;
        for (int a : t)
            if (!m.in_c(a))
                keep = false;
        if (!keep)
            continue;
        for (int k = m.c; k < (int)vals.size(); ++k)
            r.add(t, k, vals[k]);
    }
    return r;
}

std::string vvf_str(const FoliationModel& m, const VectorValuedForm& w) {
    if (w.is_zero())
        return "0";
    std::string s;
    for (auto& [t, vals] : w.components())
        for (int k = 0; k < (int)vals.size(); ++k) {
            if (vals[k].is_zero())
                continue;
            if (!s.empty())
                s += " + ";
            s += term_str(m, t, vals[k]);
            s += " (x) e" + std::to_string(k + 1);
        }
    return s;
}

// --------------------------------------------------- CE derivation triple ----

CeSplit ce_derivations(const FoliationModel& m, const BigradedForm& w) {
    CeSplit out{BigradedForm(w.degree() + 1), BigradedForm(w.degree() + 1),
                BigradedForm(w.degree() + 1)};
    for (auto& [t, f] : w.components()) {
        BigradedForm piece(w.degree());
        piece.add(t, f);
        int q_in = leg_bidegree(m, t).first;
        BigradedForm dp = frame_d(m, piece);
        for (auto& [s, g] : dp.components()) {
            int dq = leg_bidegree(m, s).first - q_in;
            if (dq == 1)
                out.d1.add(s, g);
            else if (dq == 0)
                out.d2.add(s, g);
        }
    }
    out.d3 = -contract(m, curvature(m), w);
    return out;
}

// ------------------------------------------------------ LR structure maps ----

namespace {

void require_horizontal(const FoliationModel& m, const BigradedForm& w) {
    for (auto& [t, f] : w.components())
        for (int a : t)
            if (!m.in_c(a))
                throw SemanticError("expected a horizontal form");
}

void require_v_horizontal(const FoliationModel& m, const VectorValuedForm& w) {
    for (auto& [t, vals] : w.components()) {
        for (int a : t)
            if (!m.in_c(a))
                throw SemanticError("expected a V-valued horizontal form");
        for (int k = 0; k < (int)vals.size() && k < m.c; ++k)
            if (!vals[k].is_zero())
                throw SemanticError("expected a V-valued horizontal form");
    }
}

// -(-1)^{|w|} with |w| the shifted degree
int lead_sign(const VectorValuedForm& w) { return par(w.degree() - 1) ? 1 : -1; }

} // namespace

LrMaps::LrMaps(const FoliationModel& m) : m_(&m), r_(curvature(m)) {}

VectorValuedForm LrMaps::l1(const VectorValuedForm& w) const {
    const FoliationModel& m = *m_;
    require_v_horizontal(m, w);
    VectorValuedForm r(w.degree() + 1);
    int sgn = par(w.degree());
    for (auto& [t, vals] : w.components())
        for (int b = m.c; b < (int)vals.size(); ++b) {
            if (vals[b].is_zero())
                continue;
            BigradedForm piece(w.degree());
            piece.add(t, vals[b]);
            BigradedForm dbar = horizontal_part(m, frame_d(m, piece));
            for (auto& [s, g] : dbar.components())
                r.add(s, b, g);
            for (int a = 0; a < m.c; ++a)
                for (int k = m.c; k < m.n(); ++k) {
                    const Poly& cs = m.structure[a][b][k];
                    if (cs.is_zero())
                        continue;
                    std::vector<int> legs = t;
                    legs.push_back(a);
                    Poly term = vals[b] * cs;
                    r.add(std::move(legs), k, sgn ? -term : term);
                }
        }
    return r;
}

VectorValuedForm LrMaps::l2(const VectorValuedForm& w, const VectorValuedForm& u) const {
    const FoliationModel& m = *m_;
    require_v_horizontal(m, w);
    require_v_horizontal(m, u);
    VectorValuedForm fnb = fn_bracket(m, w, u);
    if (lead_sign(w) < 0)
        fnb = -fnb;
    VectorValuedForm corr = nr_bracket(m, nr_bracket(m, r_, w), u);
    return v_horizontal_part(m, fnb + corr);
}

VectorValuedForm LrMaps::l3(const VectorValuedForm& w, const VectorValuedForm& u,
                            const VectorValuedForm& z) const {
    const FoliationModel& m = *m_;
    require_v_horizontal(m, w);
    require_v_horizontal(m, u);
    require_v_horizontal(m, z);
    VectorValuedForm raw = nr_bracket(m, nr_bracket(m, nr_bracket(m, r_, w), u), z);
    return v_horizontal_part(m, -raw);
}

BigradedForm LrMaps::m1(const BigradedForm& a) const {
    require_horizontal(*m_, a);
    return horizontal_part(*m_, frame_d(*m_, a));
}

BigradedForm LrMaps::m2(const VectorValuedForm& w, const BigradedForm& a) const {
    const FoliationModel& m = *m_;
    require_v_horizontal(m, w);
    require_horizontal(m, a);
    BigradedForm lie = lie_derivative(m, w, a);
    if (lead_sign(w) < 0)
        lie = -lie;
    BigradedForm corr = contract(m, nr_bracket(m, r_, w), a);
    return horizontal_part(m, lie + corr);
}

BigradedForm LrMaps::m3(const VectorValuedForm& w, const VectorValuedForm& u,
                        const BigradedForm& a) const {
    const FoliationModel& m = *m_;
    require_v_horizontal(m, w);
    require_v_horizontal(m, u);
    require_horizontal(m, a);
    BigradedForm raw = contract(m, nr_bracket(m, nr_bracket(m, r_, w), u), a);
    return horizontal_part(m, -raw);
}

LrMaps lr_structure_maps(const FoliationModel& m) { return LrMaps(m); }

// ------------------------------------------------------------ truncations ----

namespace {

/* Exact solve of basis * x = target over sparse Rat vectors; nullopt when
   the target is outside the span. */
template <class Key>
std::optional<std::vector<Rat>> expand_sparse(const std::vector<std::map<Key, Rat>>& basis,
                                              const std::map<Key, Rat>& target) {
    std::set<Key> keys;
    for (auto& b : basis)
        for (auto& [k, v] : b)
            keys.insert(k);
    for (auto& [k, v] : target)
        keys.insert(k);
    size_t rows = keys.size(), cols = basis.size();
    std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(cols + 1));
    size_t r = 0;
    for (auto& k : keys) {
        for (size_t j = 0; j < cols; ++j) {
            auto it = basis[j].find(k);
            if (it != basis[j].end())
                a[r][j] = it->second;
        }
        auto it = target.find(k);
        if (it != target.end())
            a[r][cols] = it->second;
        ++r;
    }
    size_t rank = 0;
    std::vector<int> pivot_col;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t p = rank;
        while (p < rows && a[p][col] == 0)
            ++p;
        if (p == rows)
            continue;
        std::swap(a[p], a[rank]);
        Rat inv = Rat(1) / a[rank][col];
        for (size_t j = col; j <= cols; ++j)
            a[rank][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == rank || a[i][col] == 0)
                continue;
            Rat f = a[i][col];
            for (size_t j = col; j <= cols; ++j)
                a[i][j] -= f * a[rank][j];
        }
        pivot_col.push_back((int)col);
        ++rank;
    }
    for (size_t i = rank; i < rows; ++i)
        if (a[i][cols] != 0)
            return std::nullopt;
    std::vector<Rat> x(cols);
    for (size_t i = 0; i < rank; ++i)
        x[pivot_col[i]] = a[i][cols];
    return x;
}

using FormKey = std::pair<std::vector<int>, Monomial>;
using VvfKey = std::pair<std::pair<std::vector<int>, int>, Monomial>;

std::map<FormKey, Rat> flatten_form(const BigradedForm& w) {
    std::map<FormKey, Rat> out;
    for (auto& [t, f] : w.components())
        for (auto& [mono, coef] : f.terms())
            out[{t, mono}] = coef;
    return out;
}

std::map<VvfKey, Rat> flatten_vvf(const VectorValuedForm& w) {
    std::map<VvfKey, Rat> out;
    for (auto& [t, vals] : w.components())
        for (int k = 0; k < (int)vals.size(); ++k)
            for (auto& [mono, coef] : vals[k].terms())
                out[{{t, k}, mono}] = coef;
    return out;
}

KVec kv_of(const std::vector<Rat>& x) {
    KVec kv;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0)
            kv[(int)i] = x[i];
    return kv;
}

} // namespace

LrData lr_truncation_tables(const FoliationModel& m, const LrTruncation& t) {
    if (t.a_names.size() != t.a_elems.size() || t.l_names.size() != t.l_elems.size())
        throw SemanticError("truncation names and elements must pair up");
    LrData data;
    for (size_t i = 0; i < t.a_names.size(); ++i)
        data.A.add(t.a_names[i], t.a_elems[i].degree());
    for (size_t i = 0; i < t.l_names.size(); ++i)
        data.L.add(t.l_names[i], t.l_elems[i].degree() - 1);

    std::vector<std::map<FormKey, Rat>> a_flat;
    for (auto& e : t.a_elems)
        a_flat.push_back(flatten_form(e));
    std::vector<std::map<VvfKey, Rat>> l_flat;
    for (auto& e : t.l_elems)
        l_flat.push_back(flatten_vvf(e));

    auto expand_a = [&](const BigradedForm& w, const char* what) {
        auto x = expand_sparse(a_flat, flatten_form(w));
        if (!x)
            throw SemanticError(std::string("truncation is not closed under ") + what);
        return kv_of(*x);
    };
    auto expand_l = [&](const VectorValuedForm& w, const char* what) {
        auto x = expand_sparse(l_flat, flatten_vvf(w));
        if (!x)
            throw SemanticError(std::string("truncation is not closed under ") + what);
        return kv_of(*x);
    };

    int na = (int)t.a_elems.size(), nl = (int)t.l_elems.size();
    for (int i = 0; i < na; ++i)
        for (int j = i; j < na; ++j) {
            BigradedForm w = wedge(t.a_elems[i], t.a_elems[j]);
            if (w.is_zero())
                continue;
            data.mul.set(data.A, i, j, expand_a(w, "the product"));
        }
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nl; ++j) {
            VectorValuedForm aw(t.a_elems[i].degree() + t.l_elems[j].degree());
            for (auto& [ta, f] : t.a_elems[i].components())
                for (auto& [tl, vals] : t.l_elems[j].components())
                    for (int k = 0; k < (int)vals.size(); ++k) {
                        std::vector<int> legs = ta;
                        legs.insert(legs.end(), tl.begin(), tl.end());
                        aw.add(legs, k, f * vals[k]);
                    }
            if (aw.is_zero())
                continue;
            data.act.set(data.A, data.L, i, j, expand_l(aw, "the module action"));
        }

    LrMaps maps(m);
    MultiBracket b1(1, true), b2(2, true), b3(3, true);
    for (int i = 0; i < nl; ++i) {
        VectorValuedForm w = maps.l1(t.l_elems[i]);
        if (!w.is_zero())
            b1.set(data.L, {i}, expand_l(w, "l1"));
    }
    for (int i = 0; i < nl; ++i)
        for (int j = i; j < nl; ++j) {
            VectorValuedForm w = maps.l2(t.l_elems[i], t.l_elems[j]);
            if (!w.is_zero())
                b2.set(data.L, {i, j}, expand_l(w, "l2"));
        }
    for (int i = 0; i < nl; ++i)
        for (int j = i; j < nl; ++j)
            for (int k = j; k < nl; ++k) {
                VectorValuedForm w = maps.l3(t.l_elems[i], t.l_elems[j], t.l_elems[k]);
                if (!w.is_zero())
                    b3.set(data.L, {i, j, k}, expand_l(w, "l3"));
            }
    data.l = {b1, b2, b3};

    ModuleMap m1(1), m2(2), m3(3);
    for (int i = 0; i < na; ++i) {
        BigradedForm w = maps.m1(t.a_elems[i]);
        if (!w.is_zero())
            m1.set(data.L, data.A, {}, i, expand_a(w, "m1"));
    }
    for (int i = 0; i < nl; ++i)
        for (int j = 0; j < na; ++j) {
            BigradedForm w = maps.m2(t.l_elems[i], t.a_elems[j]);
            if (!w.is_zero())
                m2.set(data.L, data.A, {i}, j, expand_a(w, "m2"));
        }
    for (int i = 0; i < nl; ++i)
        for (int j = i; j < nl; ++j)
            for (int k = 0; k < na; ++k) {
                BigradedForm w = maps.m3(t.l_elems[i], t.l_elems[j], t.a_elems[k]);
                if (!w.is_zero())
                    m3.set(data.L, data.A, {i, j}, k, expand_a(w, "m3"));
            }
    data.m = {m1, m2, m3};
    return data;
}

bool constant_structure(const FoliationModel& m) {
    for (auto& row : m.structure)
        for (auto& cell : row)
            for (auto& f : cell)
                if (!f.is_constant())
                    return false;
    return true;
}

CeTruncation ce_truncation_tables(const FoliationModel& m) {
    if (!constant_structure(m))
        throw SemanticError("monomial truncation needs constant structure functions");
    if (m.n() > 9)
        throw SemanticError("model too large for the monomial truncation");
    CeTruncation out;
    std::vector<std::vector<int>> tuples;
    std::map<std::vector<int>, int> index;
    for (int len = 0; len <= m.n(); ++len) {
        std::vector<int> t(len);
        for (int i = 0; i < len; ++i)
            t[i] = i;
        while (true) {
            index[t] = (int)tuples.size();
            tuples.push_back(t);
            std::string name = "one";
            if (len > 0) {
                name = "th";
                for (int a : t)
                    name += std::to_string(a + 1);
            }
            out.space.add(name, len);
            int j = len - 1;
            while (j >= 0 && t[j] == m.n() - len + j)
                --j;
            if (j < 0)
                break;
            ++t[j];
            for (int i = j + 1; i < len; ++i)
                t[i] = t[i - 1] + 1;
        }
        if (len == 0 && m.n() == 0)
            break;
    }

    for (size_t i = 0; i < tuples.size(); ++i)
        for (size_t j = i; j < tuples.size(); ++j) {
            std::vector<int> t = tuples[i];
            t.insert(t.end(), tuples[j].begin(), tuples[j].end());
            int sign = sort_sign(t);
            if (sign == 0)
                continue;
            out.mul.set(out.space, (int)i, (int)j, {{index[t], Rat(sign)}});
        }

    out.ds.resize(3);
    for (size_t i = 0; i < tuples.size(); ++i) {
        BigradedForm w((int)tuples[i].size());
        w.add(tuples[i], Poly::constant(1));
        CeSplit split = ce_derivations(m, w);
        const BigradedForm* parts[3] = {&split.d1, &split.d2, &split.d3};
        for (int r = 0; r < 3; ++r) {
            KVec kv;
            for (auto& [s, f] : parts[r]->components()) {
                if (!f.is_constant())
                    throw SemanticError("monomial truncation needs constant structure functions");
                kv[index[s]] = f.constant_value();
            }
            if (!kv.empty())
                out.ds[r].entries[(int)i] = kv;
        }
    }
    return out;
}

// ---------------------------------------------------------------- parsing ----

VectorField parse_vector_field(const Context& ctx, const std::string& text) {
    VectorField out;
    out.comps.resize(ctx.n());
    std::vector<std::pair<int, std::string>> terms; // sign, body
    int depth = 0, sign = 1;
    std::string cur;
    for (size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (ch == '(')
            ++depth;
        if (ch == ')')
            --depth;
        if (depth == 0 && (ch == '+' || ch == '-') && !trim(cur).empty()) {
            terms.push_back({sign, trim(cur)});
            sign = ch == '-' ? -1 : 1;
            cur.clear();
            continue;
        }
        if (depth == 0 && ch == '-' && trim(cur).empty()) {
            sign = -sign;
            continue;
        }
        if (depth == 0 && ch == '+' && trim(cur).empty())
            continue;
        cur += ch;
    }
    if (!trim(cur).empty())
        terms.push_back({sign, trim(cur)});
    if (terms.empty())
        throw SyntaxError("empty vector field expression");
    for (auto& [sg, body] : terms) {
        size_t at = body.find("d/d");
        if (at == std::string::npos || body.rfind("d/d") != at)
            throw SyntaxError("vector field term must contain one d/d<coord> atom: '" + body + "'");
        std::string name = trim(body.substr(at + 3));
        int idx = -1;
        for (int i = 0; i < ctx.n(); ++i)
            if (ctx.indep[i] == name)
                idx = i;
        if (idx < 0)
            throw SemanticError("unknown coordinate '" + name + "'");
        std::string prefix = trim(body.substr(0, at));
        Poly coeff = Poly::constant(1);
        if (!prefix.empty()) {
            if (prefix.back() != '*')
                throw SyntaxError("coefficient must be joined with '*' in '" + body + "'");
            prefix = trim(prefix.substr(0, prefix.size() - 1));
            if (prefix.empty())
                throw SyntaxError("missing coefficient in '" + body + "'");
            coeff = parse_expr(prefix, ctx);
        }
        if (sg < 0)
            coeff = -coeff;
        out.comps[idx] += coeff;
    }
    return out;
}

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
        if (ch == '(')
            ++depth;
        if (ch == ')')
            --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
            continue;
        }
        cur += ch;
    }
    if (!trim(cur).empty())
        out.push_back(trim(cur));
    return out;
}

} // namespace

FoliationModel parse_model_text(const std::string& text) {
    std::vector<std::string> coords;
    std::vector<std::string> c_src, v_src;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw SyntaxError("expected 'key: body' in model line '" + line + "'");
        std::string key = trim(line.substr(0, colon));
        std::string body = trim(line.substr(colon + 1));
        if (key == "coords") {
            if (!coords.empty())
                throw SemanticError("duplicate coords line");
            coords = split_commas(body);
        } else if (key == "cframe" || key == "vframe") {
            if (coords.empty())
                throw SemanticError("coords must come before frame lines");
            auto& dst = key == "cframe" ? c_src : v_src;
            for (auto& piece : split_commas(body))
                dst.push_back(piece);
        } else {
            throw SyntaxError("unknown model key '" + key + "'");
        }
    }
    if (coords.empty())
        throw SemanticError("model needs a coords line");
    Context ctx;
    ctx.indep = coords;
    std::vector<VectorField> cf, vf;
    for (auto& s : c_src)
        cf.push_back(parse_vector_field(ctx, s));
    for (auto& s : v_src)
        vf.push_back(parse_vector_field(ctx, s));
    return build_model(coords, cf, vf);
}

FoliationModel parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_text(buf.str());
}

} // namespace jetlab
