#include "jetlab/homotopy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "jetlab/parse.hpp"

namespace jetlab {

// ------------------------------------------------------------- spaces ----

int GradedSpace::index(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return (int)i;
    return -1;
}

void GradedSpace::add(const std::string& name, int degree) {
    if (index(name) >= 0)
        throw SemanticError("duplicate basis name '" + name + "'");
    names.push_back(name);
    degrees.push_back(degree);
}

void kv_axpy(KVec& dst, const Rat& c, const KVec& src) {
    if (c == 0)
        return;
    for (auto& [i, x] : src) {
        Rat& slot = dst[i];
        slot += c * x;
        if (slot == 0)
            dst.erase(i);
    }
}

static std::string rat_coeff_str(const Rat& c) {
    std::ostringstream os;
    os << c;
    return os.str();
}

std::string kvec_str(const GradedSpace& V, const KVec& v) {
    if (v.empty())
        return "0";
    std::string s;
    for (auto& [i, c] : v) {
        Rat a = c < 0 ? Rat(-c) : c;
        std::string piece =
            a == 1 ? V.names[i] : rat_coeff_str(a) + "*" + V.names[i];
        if (s.empty())
            s = (c < 0 ? "-" : "") + piece;
        else
            s += (c < 0 ? " - " : " + ") + piece;
    }
    return s;
}

KVec parse_kvec(const std::string& text, const GradedSpace& V) {
    KVec out;
    size_t pos = 0, n = text.size();
    auto skip = [&] {
        while (pos < n && (text[pos] == ' ' || text[pos] == '\t'))
            ++pos;
    };
    skip();
    if (pos == n)
        throw SyntaxError("empty vector expression");
    bool first = true;
    while (pos < n) {
        int sign = 1;
        skip();
        if (pos < n && (text[pos] == '+' || text[pos] == '-')) {
            if (text[pos] == '-')
                sign = -1;
            ++pos;
            skip();
        } else if (!first) {
            throw SyntaxError("expected '+' or '-' in vector expression");
        }
        first = false;
        // optional rational coefficient
        size_t start = pos;
        while (pos < n && (isdigit((unsigned char)text[pos]) || text[pos] == '/'))
            ++pos;
        Rat coeff = 1;
        bool have_coeff = pos > start;
        if (have_coeff) {
            try {
                coeff = Rat(text.substr(start, pos - start));
            } catch (const std::exception&) {
                throw SyntaxError("bad coefficient '" +
                                  text.substr(start, pos - start) + "'");
            }
            skip();
            if (pos < n && text[pos] == '*') {
                ++pos;
                skip();
            }
        }
        // basis name
        start = pos;
        while (pos < n && (isalnum((unsigned char)text[pos]) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (name.empty()) {
            if (have_coeff && coeff == 0) {
                skip();
                continue; // bare zero term
            }
            throw SyntaxError("expected basis name in vector expression");
        }
        int idx = V.index(name);
        if (idx < 0)
            throw SemanticError("unknown basis element '" + name + "'");
        Rat& slot = out[idx];
        slot += Rat(sign) * coeff;
        if (slot == 0)
            out.erase(idx);
        skip();
    }
    return out;
}

// --------------------------------------------------- signs and shuffles ----

int koszul_sign(const std::vector<int>& sigma, const std::vector<int>& degrees) {
    size_t k = sigma.size();
    if (degrees.size() != k)
        throw SemanticError("permutation and degree list sizes differ");
    std::vector<char> seen(k, 0);
    for (int v : sigma) {
        if (v < 0 || v >= (int)k || seen[v])
            throw SemanticError("malformed permutation");
        seen[v] = 1;
    }
    int parity = 0;
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j)
            if (sigma[i] > sigma[j])
                parity += (degrees[sigma[i]] & 1) & (degrees[sigma[j]] & 1);
    return parity % 2 ? -1 : 1;
}

std::vector<std::vector<int>> unshuffles(int r, int s) {
    std::vector<std::vector<int>> out;
    int k = r + s;
    std::vector<int> pick(r);
    for (int i = 0; i < r; ++i)
        pick[i] = i;
    for (;;) {
        std::vector<int> arr = pick;
        std::vector<char> used(k, 0);
        for (int p : pick)
            used[p] = 1;
        for (int i = 0; i < k; ++i)
            if (!used[i])
                arr.push_back(i);
        out.push_back(std::move(arr));
        // next r-combination of {0..k-1} in lexicographic order
        int i = r - 1;
        while (i >= 0 && pick[i] == k - r + i)
            --i;
        if (i < 0)
            break;
        ++pick[i];
        for (int j = i + 1; j < r; ++j)
            pick[j] = pick[j - 1] + 1;
    }
    return out;
}

namespace {

// sort ascending by basis index, accumulating the Koszul sign;
// 0 flags a repeated odd-degree argument (the entry is forced zero)
int canonical_sign(const GradedSpace& V, std::vector<int>& t) {
    int parity = 0;
    for (size_t i = 1; i < t.size(); ++i)
        for (size_t j = i; j > 0 && t[j - 1] > t[j]; --j) {
            parity += (V.degree(t[j - 1]) & 1) & (V.degree(t[j]) & 1);
            std::swap(t[j - 1], t[j]);
        }
    for (size_t i = 1; i < t.size(); ++i)
        if (t[i] == t[i - 1] && (V.degree(t[i]) & 1))
            return 0;
    return parity % 2 ? -1 : 1;
}

int degree_sum(const GradedSpace& V, const std::vector<int>& t) {
    int d = 0;
    for (int i : t)
        d += V.degree(i);
    return d;
}

void check_degree_rule(const GradedSpace& out_space, const KVec& out,
                       int expected) {
    for (auto& [i, c] : out)
        if (c != 0 && out_space.degree(i) != expected)
            throw SemanticError(
                "table entry violates the degree rule: output '" +
                out_space.names[i] + "' has degree " +
                std::to_string(out_space.degree(i)) + ", expected " +
                std::to_string(expected));
}

} // namespace

// ----------------------------------------------------------- brackets ----

void MultiBracket::set(const GradedSpace& V, std::vector<int> inputs, KVec out) {
    if ((int)inputs.size() != arity_)
        throw SemanticError("bracket arity mismatch");
    for (int i : inputs)
        if (i < 0 || i >= V.dim())
            throw SemanticError("bracket input index out of range");
    check_degree_rule(V, out, degree_sum(V, inputs) + 1);
    int sign = 1;
    if (symmetric_) {
        sign = canonical_sign(V, inputs);
        if (sign == 0) {
            if (!out.empty())
                throw SemanticError(
                    "repeated odd-degree argument forces a zero entry");
            return;
        }
    }
    KVec& slot = table_[inputs];
    kv_axpy(slot, Rat(sign), out);
    if (slot.empty())
        table_.erase(inputs);
}

KVec MultiBracket::eval(const GradedSpace& V, std::vector<int> inputs) const {
    if ((int)inputs.size() != arity_)
        throw SemanticError("bracket arity mismatch");
    int sign = 1;
    if (symmetric_) {
        sign = canonical_sign(V, inputs);
        if (sign == 0)
            return {};
    }
    auto it = table_.find(inputs);
    if (it == table_.end())
        return {};
    KVec out;
    kv_axpy(out, Rat(sign), it->second);
    return out;
}

void ModuleMap::set(const GradedSpace& L, const GradedSpace& A,
                    std::vector<int> vs, int a, KVec out) {
    if ((int)vs.size() != arity_ - 1)
        throw SemanticError("module map arity mismatch");
    if (a < 0 || a >= A.dim())
        throw SemanticError("module map algebra index out of range");
    check_degree_rule(A, out, degree_sum(L, vs) + A.degree(a) + 1);
    int sign = canonical_sign(L, vs);
    if (sign == 0) {
        if (!out.empty())
            throw SemanticError(
                "repeated odd-degree argument forces a zero entry");
        return;
    }
    KVec& slot = table_[{vs, a}];
    kv_axpy(slot, Rat(sign), out);
    if (slot.empty())
        table_.erase({vs, a});
}

KVec ModuleMap::eval(const GradedSpace& L, const GradedSpace& A,
                     std::vector<int> vs, int a) const {
    (void)A;
    if ((int)vs.size() != arity_ - 1)
        throw SemanticError("module map arity mismatch");
    int sign = canonical_sign(L, vs);
    if (sign == 0)
        return {};
    auto it = table_.find({vs, a});
    if (it == table_.end())
        return {};
    KVec out;
    kv_axpy(out, Rat(sign), it->second);
    return out;
}

void ProductTable::set(const GradedSpace& A, int i, int j, KVec out) {
    check_degree_rule(A, out, A.degree(i) + A.degree(j));
    int sign = 1;
    if (i > j) {
        sign = (A.degree(i) & 1) & (A.degree(j) & 1) ? -1 : 1;
        std::swap(i, j);
    } else if (i == j && (A.degree(i) & 1)) {
        if (!out.empty())
            throw SemanticError("odd square must be zero in a commutative algebra");
        return;
    }
    KVec& slot = table_[{i, j}];
    kv_axpy(slot, Rat(sign), out);
    if (slot.empty())
        table_.erase({i, j});
}

KVec ProductTable::eval(const GradedSpace& A, int i, int j) const {
    int sign = 1;
    if (i > j) {
        sign = (A.degree(i) & 1) & (A.degree(j) & 1) ? -1 : 1;
        std::swap(i, j);
    }
    auto it = table_.find({i, j});
    if (it == table_.end())
        return {};
    KVec out;
    kv_axpy(out, Rat(sign), it->second);
    return out;
}

void ActionTable::set(const GradedSpace& A, const GradedSpace& L, int a, int v,
                      KVec out) {
    check_degree_rule(L, out, A.degree(a) + L.degree(v));
    KVec& slot = table_[{a, v}];
    kv_axpy(slot, Rat(1), out);
    if (slot.empty())
        table_.erase({a, v});
}

KVec ActionTable::eval(int a, int v) const {
    auto it = table_.find({a, v});
    return it == table_.end() ? KVec{} : it->second;
}

KVec mul_kv(const GradedSpace& A, const ProductTable& mul, const KVec& x,
            const KVec& y) {
    KVec out;
    for (auto& [i, ci] : x)
        for (auto& [j, cj] : y)
            kv_axpy(out, ci * cj, mul.eval(A, i, j));
    return out;
}

KVec act_kv(const ActionTable& act, const KVec& a, const KVec& v) {
    KVec out;
    for (auto& [i, ci] : a)
        for (auto& [j, cj] : v)
            kv_axpy(out, ci * cj, act.eval(i, j));
    return out;
}

// ------------------------------------------------------------ checkers ----

namespace {

using BracketIndex = std::map<int, const MultiBracket*>;

BracketIndex index_brackets(const std::vector<MultiBracket>& brackets,
                            bool need_symmetric) {
    BracketIndex ix;
    for (const MultiBracket& b : brackets) {
        if (need_symmetric && !b.symmetric())
            throw SemanticError("bracket of arity " + std::to_string(b.arity()) +
                                " is not symmetric");
        if (!ix.emplace(b.arity(), &b).second)
            throw SemanticError("duplicate bracket arity " +
                                std::to_string(b.arity()));
    }
    return ix;
}

using ModuleIndex = std::map<int, const ModuleMap*>;

ModuleIndex index_modules(const std::vector<ModuleMap>& maps) {
    ModuleIndex ix;
    for (const ModuleMap& m : maps)
        if (!ix.emplace(m.arity(), &m).second)
            throw SemanticError("duplicate module map arity " +
                                std::to_string(m.arity()));
    return ix;
}

KVec bracket_eval(const GradedSpace& V, const BracketIndex& ix, int arity,
                  const std::vector<int>& args) {
    auto it = ix.find(arity);
    return it == ix.end() ? KVec{} : it->second->eval(V, args);
}

KVec module_eval(const GradedSpace& L, const GradedSpace& A,
                 const ModuleIndex& ix, int arity, const std::vector<int>& vs,
                 int a) {
    auto it = ix.find(arity);
    return it == ix.end() ? KVec{} : it->second->eval(L, A, vs, a);
}

// linear extension of a module map over an algebra-vector last argument
KVec module_eval_kv(const GradedSpace& L, const GradedSpace& A,
                    const ModuleIndex& ix, int arity, const std::vector<int>& vs,
                    const KVec& a) {
    KVec out;
    for (auto& [i, c] : a)
        kv_axpy(out, c, module_eval(L, A, ix, arity, vs, i));
    return out;
}

// higher Jacobi residual on one basis tuple
KVec jacobi_residual(const GradedSpace& V, const BracketIndex& ix,
                     const std::vector<int>& tuple) {
    int k = (int)tuple.size();
    std::vector<int> degs(k);
    for (int i = 0; i < k; ++i)
        degs[i] = V.degree(tuple[i]);
    KVec res;
    for (int r = 1; r <= k; ++r) {
        int s = k - r;
        if (!ix.count(r) || !ix.count(s + 1))
            continue;
        for (const std::vector<int>& sig : unshuffles(r, s)) {
            int eps = koszul_sign(sig, degs);
            std::vector<int> head(r), tail(s);
            for (int i = 0; i < r; ++i)
                head[i] = tuple[sig[i]];
            for (int i = 0; i < s; ++i)
                tail[i] = tuple[sig[r + i]];
            KVec inner = bracket_eval(V, ix, r, head);
            for (auto& [b, c] : inner) {
                std::vector<int> args{b};
                args.insert(args.end(), tail.begin(), tail.end());
                kv_axpy(res, Rat(eps) * c, bracket_eval(V, ix, s + 1, args));
            }
        }
    }
    return res;
}

// higher associativity residual on one ordered tuple
KVec assoc_residual(const GradedSpace& U, const BracketIndex& ix,
                    const std::vector<int>& tuple) {
    int k = (int)tuple.size();
    KVec res;
    for (int r = 1; r <= k; ++r) {
        int s = k - r;
        if (!ix.count(r) || !ix.count(s + 1))
            continue;
        for (int j = 0; j <= s; ++j) {
            int parity = 0;
            for (int i = 0; i < j; ++i)
                parity += U.degree(tuple[i]) & 1;
            int sgn = parity % 2 ? -1 : 1;
            std::vector<int> head(tuple.begin() + j, tuple.begin() + j + r);
            KVec inner = bracket_eval(U, ix, r, head);
            for (auto& [b, c] : inner) {
                std::vector<int> args(tuple.begin(), tuple.begin() + j);
                args.push_back(b);
                args.insert(args.end(), tuple.begin() + j + r, tuple.end());
                kv_axpy(res, Rat(sgn) * c, bracket_eval(U, ix, s + 1, args));
            }
        }
    }
    return res;
}

/* L-infinity module residual: p elements of L plus one of A.
   Both summand families of the module identity, with the inner map
   acting either through l (then fed to m) or through m twice. */
KVec module_residual(const GradedSpace& L, const GradedSpace& A,
                     const BracketIndex& lix, const ModuleIndex& mix,
                     const std::vector<int>& vs, int a) {
    int p = (int)vs.size();
    std::vector<int> degs(p);
    for (int i = 0; i < p; ++i)
        degs[i] = L.degree(vs[i]);
    KVec res;
    for (int r = 0; r <= p; ++r) {
        int s = p - r;
        for (const std::vector<int>& sig : unshuffles(r, s)) {
            int eps = koszul_sign(sig, degs);
            std::vector<int> head(r), tail(s);
            int head_parity = 0;
            for (int i = 0; i < r; ++i) {
                head[i] = vs[sig[i]];
                head_parity += L.degree(head[i]) & 1;
            }
            for (int i = 0; i < s; ++i)
                tail[i] = vs[sig[r + i]];
            if (r >= 1 && lix.count(r) && mix.count(s + 2)) {
                KVec inner = bracket_eval(L, lix, r, head);
                for (auto& [b, c] : inner) {
                    std::vector<int> args{b};
                    args.insert(args.end(), tail.begin(), tail.end());
                    kv_axpy(res, Rat(eps) * c,
                            module_eval(L, A, mix, s + 2, args, a));
                }
            }
            if (mix.count(s + 1) && mix.count(r + 1)) {
                int sgn = head_parity % 2 ? -eps : eps;
                KVec inner = module_eval(L, A, mix, s + 1, tail, a);
                kv_axpy(res, Rat(sgn),
                        module_eval_kv(L, A, mix, r + 1, head, inner));
            }
        }
    }
    return res;
}

// nondecreasing index tuples of a given length (combinations with repetition)
void enumerate_tuples(int dim, int len, std::vector<int>& cur,
                      const std::function<void(const std::vector<int>&)>& fn) {
    if ((int)cur.size() == len) {
        fn(cur);
        return;
    }
    int lo = cur.empty() ? 0 : cur.back();
    for (int i = lo; i < dim; ++i) {
        cur.push_back(i);
        enumerate_tuples(dim, len, cur, fn);
        cur.pop_back();
    }
}

std::vector<std::string> tuple_names(const GradedSpace& V,
                                     const std::vector<int>& t) {
    std::vector<std::string> out;
    for (int i : t)
        out.push_back(V.names[i]);
    return out;
}

} // namespace

HomotopyReport check_l_infinity(const GradedSpace& V,
                                const std::vector<MultiBracket>& brackets,
                                int max_k) {
    BracketIndex ix = index_brackets(brackets, true);
    HomotopyReport rep;
    for (int k = 1; k <= max_k; ++k) {
        std::vector<int> cur;
        enumerate_tuples(V.dim(), k, cur, [&](const std::vector<int>& t) {
            KVec res = jacobi_residual(V, ix, t);
            if (!res.empty()) {
                rep.ok = false;
                rep.failures.push_back(
                    {"jacobi", k, tuple_names(V, t), kvec_str(V, res)});
            }
        });
    }
    return rep;
}

HomotopyReport check_a_infinity(const GradedSpace& U,
                                const std::vector<MultiBracket>& ops,
                                int max_k) {
    for (const MultiBracket& b : ops)
        if (b.symmetric())
            throw SemanticError("associative operations must be non-symmetric");
    BracketIndex ix = index_brackets(ops, false);
    HomotopyReport rep;
    for (int k = 1; k <= max_k; ++k) {
        // ordered tuples: odometer over dim^k
        std::vector<int> t(k, 0);
        for (;;) {
            KVec res = assoc_residual(U, ix, t);
            if (!res.empty()) {
                rep.ok = false;
                rep.failures.push_back(
                    {"assoc", k, tuple_names(U, t), kvec_str(U, res)});
            }
            int i = k - 1;
            while (i >= 0 && t[i] == U.dim() - 1)
                t[i--] = 0;
            if (i < 0)
                break;
            ++t[i];
        }
    }
    return rep;
}

HomotopyReport check_lr_infinity(const LrData& data, int max_k) {
    const GradedSpace& A = data.A;
    const GradedSpace& L = data.L;
    BracketIndex lix = index_brackets(data.l, true);
    ModuleIndex mix = index_modules(data.m);
    HomotopyReport rep;

    auto fail = [&](const std::string& family, int k,
                    std::vector<std::string> args, const KVec& res,
                    const GradedSpace& target) {
        rep.ok = false;
        rep.failures.push_back(
            {family, k, std::move(args), kvec_str(target, res)});
    };

    // L-infinity identities on L
    for (int k = 1; k <= max_k; ++k) {
        std::vector<int> cur;
        enumerate_tuples(L.dim(), k, cur, [&](const std::vector<int>& t) {
            KVec res = jacobi_residual(L, lix, t);
            if (!res.empty())
                fail("jacobi", k, tuple_names(L, t), res, L);
        });
    }

    // module identities: k-1 elements of L and one of A
    for (int k = 1; k <= max_k; ++k) {
        std::vector<int> cur;
        enumerate_tuples(L.dim(), k - 1, cur, [&](const std::vector<int>& vs) {
            for (int a = 0; a < A.dim(); ++a) {
                KVec res = module_residual(L, A, lix, mix, vs, a);
                if (!res.empty()) {
                    std::vector<std::string> args = tuple_names(L, vs);
                    args.push_back("|");
                    args.push_back(A.names[a]);
                    fail("module", k, std::move(args), res, A);
                }
            }
        });
    }

    // A-multilinearity of m_k in each of the first k-1 slots
    for (int k = 2; k <= max_k; ++k) {
        if (!mix.count(k))
            continue;
        std::vector<int> cur;
        enumerate_tuples(L.dim(), k - 1, cur, [&](const std::vector<int>& vs) {
            for (int j = 0; j < k - 1; ++j)
                for (int a = 0; a < A.dim(); ++a)
                    for (int b = 0; b < A.dim(); ++b) {
                        KVec lhs;
                        KVec av = data.act.eval(a, vs[j]);
                        for (auto& [w, c] : av) {
                            std::vector<int> mod = vs;
                            mod[j] = w;
                            kv_axpy(lhs, c, module_eval(L, A, mix, k, mod, b));
                        }
                        int parity = A.degree(a) & 1;
                        int pre = 1;
                        for (int i = 0; i < j; ++i)
                            pre += L.degree(vs[i]) & 1;
                        int sgn = (parity & 1) && (pre & 1) ? -1 : 1;
                        KVec rhs = mul_kv(
                            A, data.mul, KVec{{a, Rat(sgn)}},
                            module_eval(L, A, mix, k, vs, b));
                        kv_axpy(lhs, Rat(-1), rhs);
                        if (!lhs.empty()) {
                            std::vector<std::string> args;
                            for (int i = 0; i < k - 1; ++i)
                                args.push_back(i == j ? A.names[a] + "*" +
                                                            L.names[vs[i]]
                                                      : L.names[vs[i]]);
                            args.push_back("|");
                            args.push_back(A.names[b]);
                            fail("multilinear", k, std::move(args), lhs, A);
                        }
                    }
        });
    }

    // derivation property of m_k in the algebra slot
    for (int k = 1; k <= max_k; ++k) {
        if (!mix.count(k))
            continue;
        std::vector<int> cur;
        enumerate_tuples(L.dim(), k - 1, cur, [&](const std::vector<int>& vs) {
            int vs_parity = 0;
            for (int v : vs)
                vs_parity += L.degree(v) & 1;
            for (int a = 0; a < A.dim(); ++a)
                for (int b = 0; b < A.dim(); ++b) {
                    KVec lhs = module_eval_kv(L, A, mix, k, vs,
                                              data.mul.eval(A, a, b));
                    KVec rhs = mul_kv(A, data.mul,
                                      module_eval(L, A, mix, k, vs, a),
                                      KVec{{b, Rat(1)}});
                    int sgn =
                        (A.degree(a) & 1) && ((vs_parity + 1) & 1) ? -1 : 1;
                    kv_axpy(rhs, Rat(1),
                            mul_kv(A, data.mul, KVec{{a, Rat(sgn)}},
                                   module_eval(L, A, mix, k, vs, b)));
                    kv_axpy(lhs, Rat(-1), rhs);
                    if (!lhs.empty()) {
                        std::vector<std::string> args = tuple_names(L, vs);
                        args.push_back("|");
                        args.push_back(A.names[a] + "*" + A.names[b]);
                        fail("derivation", k, std::move(args), lhs, A);
                    }
                }
        });
    }

    // Leibniz rule: l_k(v_1..v_{k-1}, a*v_k) against the m_k correction
    for (int k = 1; k <= max_k; ++k) {
        std::vector<int> cur;
        enumerate_tuples(L.dim(), k - 1, cur, [&](const std::vector<int>& vs) {
            int vs_parity = 0;
            for (int v : vs)
                vs_parity += L.degree(v) & 1;
            for (int vk = 0; vk < L.dim(); ++vk)
                for (int a = 0; a < A.dim(); ++a) {
                    KVec lhs;
                    KVec av = data.act.eval(a, vk);
                    for (auto& [w, c] : av) {
                        std::vector<int> args = vs;
                        args.push_back(w);
                        kv_axpy(lhs, c, bracket_eval(L, lix, k, args));
                    }
                    // m_k(v_1..v_{k-1} | a) * v_k
                    KVec rhs =
                        act_kv(data.act, module_eval(L, A, mix, k, vs, a),
                               KVec{{vk, Rat(1)}});
                    // signed a * l_k(v_1..v_k)
                    std::vector<int> full = vs;
                    full.push_back(vk);
                    int sgn =
                        (A.degree(a) & 1) && ((vs_parity + 1) & 1) ? -1 : 1;
                    kv_axpy(rhs, Rat(sgn),
                            act_kv(data.act, KVec{{a, Rat(1)}},
                                   bracket_eval(L, lix, k, full)));
                    kv_axpy(lhs, Rat(-1), rhs);
                    if (!lhs.empty()) {
                        std::vector<std::string> args = tuple_names(L, vs);
                        args.push_back(A.names[a] + "*" + L.names[vk]);
                        fail("leibniz", k, std::move(args), lhs, L);
                    }
                }
        });
    }

    return rep;
}

KVec lin_apply(const LinMap& f, const KVec& v) {
    KVec out;
    for (auto& [i, c] : v) {
        auto it = f.entries.find(i);
        if (it != f.entries.end())
            kv_axpy(out, c, it->second);
    }
    return out;
}

HomotopyReport check_ce_relations(const GradedSpace& S, const ProductTable& mul,
                                  const std::vector<LinMap>& ds) {
    HomotopyReport rep;
    int K = (int)ds.size();

    // degree +1 homogeneity, reported per derivation
    for (int r = 0; r < K; ++r)
        for (auto& [i, img] : ds[r].entries)
            for (auto& [j, c] : img)
                if (c != 0 && S.degree(j) != S.degree(i) + 1) {
                    rep.ok = false;
                    rep.failures.push_back({"ce-degree", r + 1,
                                            {S.names[i]},
                                            kvec_str(S, img)});
                    break;
                }

    // each d_r must be a derivation of the product
    for (int r = 0; r < K; ++r)
        for (int i = 0; i < S.dim(); ++i)
            for (int j = 0; j < S.dim(); ++j) {
                KVec lhs = lin_apply(ds[r], mul.eval(S, i, j));
                KVec rhs = mul_kv(S, mul, lin_apply(ds[r], KVec{{i, Rat(1)}}),
                                  KVec{{j, Rat(1)}});
                int sgn = S.degree(i) & 1 ? -1 : 1;
                kv_axpy(rhs, Rat(sgn),
                        mul_kv(S, mul, KVec{{i, Rat(1)}},
                               lin_apply(ds[r], KVec{{j, Rat(1)}})));
                kv_axpy(lhs, Rat(-1), rhs);
                if (!lhs.empty()) {
                    rep.ok = false;
                    rep.failures.push_back({"ce-derivation", r + 1,
                                            {S.names[i] + "*" + S.names[j]},
                                            kvec_str(S, lhs)});
                }
            }

    // sum_{r+s=k} [d_r, d_s] = 0, graded commutator of odd maps
    for (int k = 2; k <= 2 * K; ++k)
        for (int i = 0; i < S.dim(); ++i) {
            KVec res;
            for (int r = 1; r < k; ++r) {
                int s = k - r;
                if (r > K || s > K)
                    continue;
                KVec e{{i, Rat(1)}};
                kv_axpy(res, Rat(1),
                        lin_apply(ds[r - 1], lin_apply(ds[s - 1], e)));
                kv_axpy(res, Rat(1),
                        lin_apply(ds[s - 1], lin_apply(ds[r - 1], e)));
            }
            if (!res.empty()) {
                rep.ok = false;
                rep.failures.push_back(
                    {"ce-bracket", k, {S.names[i]}, kvec_str(S, res)});
            }
        }

    // (sum_r d_r)^2 = 0
    LinMap total;
    for (const LinMap& d : ds)
        for (auto& [i, img] : d.entries)
            kv_axpy(total.entries[i], Rat(1), img);
    for (int i = 0; i < S.dim(); ++i) {
        KVec res = lin_apply(total, lin_apply(total, KVec{{i, Rat(1)}}));
        if (!res.empty()) {
            rep.ok = false;
            rep.failures.push_back(
                {"ce-total", 0, {S.names[i]}, kvec_str(S, res)});
        }
    }

    return rep;
}

// -------------------------------------------------------------- parsing ----

namespace {

std::string trimmed(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trimmed(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = trimmed(cur);
    if (!last.empty())
        out.push_back(last);
    return out;
}

void parse_basis_line(const std::string& body, GradedSpace& space) {
    for (const std::string& entry : split_commas(body)) {
        size_t colon = entry.rfind(':');
        if (colon == std::string::npos)
            throw SyntaxError("basis entry '" + entry + "' needs name:degree");
        std::string name = trimmed(entry.substr(0, colon));
        std::string deg = trimmed(entry.substr(colon + 1));
        check_name(name);
        try {
            space.add(name, std::stoi(deg));
        } catch (const SemanticError&) {
            throw;
        } catch (const std::exception&) {
            throw SyntaxError("bad degree '" + deg + "' for basis element '" +
                              name + "'");
        }
    }
}

// "(e1,e2) -> 3*e2" decomposed into argument list and right side
std::pair<std::vector<std::string>, std::string>
parse_rule(const std::string& body) {
    size_t open = body.find('(');
    size_t close = body.find(')');
    size_t arrow = body.find("->");
    if (open == std::string::npos || close == std::string::npos ||
        arrow == std::string::npos || close < open || arrow < close)
        throw SyntaxError("rule must look like '(args) -> value': " + body);
    std::string args = body.substr(open + 1, close - open - 1);
    std::string rhs = trimmed(body.substr(arrow + 2));
    if (rhs.empty())
        throw SyntaxError("missing right side in rule: " + body);
    return {split_commas(args), rhs};
}

int arity_of_key(const std::string& key, char letter) {
    if (key.size() < 2 || key[0] != letter)
        return -1;
    for (size_t i = 1; i < key.size(); ++i)
        if (!isdigit((unsigned char)key[i]))
            return -1;
    return std::stoi(key.substr(1));
}

int basis_index(const GradedSpace& space, const std::string& name,
                const char* what) {
    int ix = space.index(name);
    if (ix < 0)
        throw SemanticError(std::string("unknown ") + what + " element '" +
                            name + "'");
    return ix;
}

struct TableLine {
    std::string key, body;
};

std::vector<TableLine> table_lines(const std::string& text) {
    std::vector<TableLine> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trimmed(line);
        if (line.empty())
            continue;
        size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw SyntaxError("table line needs 'key: body': " + line);
        out.push_back(
            {trimmed(line.substr(0, colon)), trimmed(line.substr(colon + 1))});
    }
    return out;
}

} // namespace

std::pair<GradedSpace, std::vector<MultiBracket>>
parse_bracket_table_text(const std::string& text, char letter) {
    GradedSpace space;
    std::map<int, MultiBracket> brackets;
    bool symmetric = letter == 'l';
    for (const TableLine& ln : table_lines(text)) {
        if (ln.key == "basis") {
            parse_basis_line(ln.body, space);
            continue;
        }
        int arity = arity_of_key(ln.key, letter);
        if (arity < 1)
            throw SyntaxError("unknown table key '" + ln.key + "'");
        if (space.dim() == 0)
            throw SemanticError("bracket line before any basis declaration");
        auto [args, rhs] = parse_rule(ln.body);
        if ((int)args.size() != arity)
            throw SemanticError("rule for '" + ln.key + "' takes " +
                                std::to_string(arity) + " arguments");
        std::vector<int> inputs;
        for (const std::string& a : args)
            inputs.push_back(basis_index(space, a, "basis"));
        auto it = brackets.try_emplace(arity, MultiBracket(arity, symmetric));
        it.first->second.set(space, inputs, parse_kvec(rhs, space));
    }
    if (space.dim() == 0)
        throw SemanticError("table declares no basis");
    std::vector<MultiBracket> out;
    for (auto& [arity, b] : brackets)
        out.push_back(std::move(b));
    return {std::move(space), std::move(out)};
}

std::pair<GradedSpace, std::vector<MultiBracket>>
parse_bracket_table_file(const std::string& path, char letter) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open table file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_bracket_table_text(buf.str(), letter);
}

LrData parse_lr_table_text(const std::string& text) {
    LrData data;
    std::map<int, MultiBracket> lbr;
    std::map<int, ModuleMap> mmaps;
    for (const TableLine& ln : table_lines(text)) {
        if (ln.key == "abasis") {
            parse_basis_line(ln.body, data.A);
            continue;
        }
        if (ln.key == "lbasis") {
            parse_basis_line(ln.body, data.L);
            continue;
        }
        if (ln.key == "mul") {
            auto [args, rhs] = parse_rule(ln.body);
            if (args.size() != 2)
                throw SemanticError("mul takes two arguments");
            data.mul.set(data.A, basis_index(data.A, args[0], "algebra"),
                         basis_index(data.A, args[1], "algebra"),
                         parse_kvec(rhs, data.A));
            continue;
        }
        if (ln.key == "act") {
            auto [args, rhs] = parse_rule(ln.body);
            if (args.size() != 2)
                throw SemanticError("act takes two arguments");
            data.act.set(data.A, data.L,
                         basis_index(data.A, args[0], "algebra"),
                         basis_index(data.L, args[1], "module"),
                         parse_kvec(rhs, data.L));
            continue;
        }
        int arity = arity_of_key(ln.key, 'l');
        if (arity >= 1) {
            auto [args, rhs] = parse_rule(ln.body);
            if ((int)args.size() != arity)
                throw SemanticError("rule for '" + ln.key + "' takes " +
                                    std::to_string(arity) + " arguments");
            std::vector<int> inputs;
            for (const std::string& a : args)
                inputs.push_back(basis_index(data.L, a, "module"));
            auto it = lbr.try_emplace(arity, MultiBracket(arity, true));
            it.first->second.set(data.L, inputs, parse_kvec(rhs, data.L));
            continue;
        }
        arity = arity_of_key(ln.key, 'm');
        if (arity >= 1) {
            // arguments before '|' live in L, the single one after in A
            size_t open = ln.body.find('(');
            size_t close = ln.body.find(')');
            size_t arrow = ln.body.find("->");
            if (open == std::string::npos || close == std::string::npos ||
                arrow == std::string::npos || close < open || arrow < close)
                throw SyntaxError("rule must look like '(v | a) -> value': " +
                                  ln.body);
            std::string inner = ln.body.substr(open + 1, close - open - 1);
            size_t bar = inner.find('|');
            if (bar == std::string::npos)
                throw SyntaxError("module rule needs a '|' separator: " +
                                  ln.body);
            std::vector<std::string> lnames =
                split_commas(inner.substr(0, bar));
            std::string aname = trimmed(inner.substr(bar + 1));
            std::string rhs = trimmed(ln.body.substr(arrow + 2));
            if ((int)lnames.size() != arity - 1)
                throw SemanticError("rule for '" + ln.key + "' takes " +
                                    std::to_string(arity - 1) +
                                    " module arguments");
            std::vector<int> vs;
            for (const std::string& v : lnames)
                vs.push_back(basis_index(data.L, v, "module"));
            auto it = mmaps.try_emplace(arity, ModuleMap(arity));
            it.first->second.set(data.L, data.A, vs,
                                 basis_index(data.A, aname, "algebra"),
                                 parse_kvec(rhs, data.A));
            continue;
        }
        throw SyntaxError("unknown table key '" + ln.key + "'");
    }
    if (data.A.dim() == 0 || data.L.dim() == 0)
        throw SemanticError("LR table needs both abasis and lbasis");
    for (auto& [arity, b] : lbr)
        data.l.push_back(std::move(b));
    for (auto& [arity, m] : mmaps)
        data.m.push_back(std::move(m));
    return data;
}

LrData parse_lr_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open table file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_lr_table_text(buf.str());
}

} // namespace jetlab
