#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jetlab/diffpoly.hpp"

namespace jetlab {

/* Exact checkers for homotopy-algebra axioms (L-infinity, A-infinity,
   LR-infinity, Chevalley-Eilenberg derivation relations) on
   finite-dimensional graded vector spaces over the rationals.

   Degree convention: every structure map has degree +1. A "pass" is a
   proof over the given finite basis, not a sample. */

// ------------------------------------------------------------- spaces ----

struct GradedSpace {
    std::vector<std::string> names;
    std::vector<int> degrees;

    int dim() const { return (int)names.size(); }
    int degree(int i) const { return degrees[i]; }
    int index(const std::string& name) const; // -1 when absent
    void add(const std::string& name, int degree);
};

// sparse vector over basis indices
using KVec = std::map<int, Rat>;

void kv_axpy(KVec& dst, const Rat& c, const KVec& src);
std::string kvec_str(const GradedSpace& V, const KVec& v);

// linear combination syntax: "3*e2 - e1 + 1/2*h", or "0"
KVec parse_kvec(const std::string& text, const GradedSpace& V);

// --------------------------------------------------- signs and shuffles ----

/* Koszul sign of the arrangement (v_sigma(0), ..., v_sigma(k-1)) relative
   to (v_0, ..., v_k-1): each inversion of elements of degrees p, q
   contributes (-1)^{pq}. sigma is 0-based; degrees are indexed by the
   original positions. */
int koszul_sign(const std::vector<int>& sigma, const std::vector<int>& degrees);

// all (r,s)-unshuffles as 0-based arrangements, increasing on both blocks
std::vector<std::vector<int>> unshuffles(int r, int s);

// ----------------------------------------------------------- brackets ----

/* k-ary degree +1 map given by a coefficient table over basis tuples.
   Symmetric tables are stored on sorted representatives; lookups apply
   the Koszul sign, and a repeated odd-degree argument forces zero. */
class MultiBracket {
public:
    MultiBracket(int arity, bool symmetric)
        : arity_(arity), symmetric_(symmetric) {}

    int arity() const { return arity_; }
    bool symmetric() const { return symmetric_; }
    const std::map<std::vector<int>, KVec>& table() const { return table_; }

    // declare value on a basis tuple; validates the degree rule
    void set(const GradedSpace& V, std::vector<int> inputs, KVec out);
    KVec eval(const GradedSpace& V, std::vector<int> inputs) const;

private:
    int arity_;
    bool symmetric_;
    std::map<std::vector<int>, KVec> table_;
};

/* Module map m_k : S^{k-1} L (x) A -> A of degree +1; symmetric with
   Koszul signs in the L-arguments. */
class ModuleMap {
public:
    explicit ModuleMap(int arity) : arity_(arity) {}

    int arity() const { return arity_; }

    void set(const GradedSpace& L, const GradedSpace& A, std::vector<int> vs,
             int a, KVec out);
    KVec eval(const GradedSpace& L, const GradedSpace& A, std::vector<int> vs,
              int a) const;

private:
    int arity_;
    std::map<std::pair<std::vector<int>, int>, KVec> table_;
};

// graded commutative product on A, stored on index pairs i <= j
class ProductTable {
public:
    void set(const GradedSpace& A, int i, int j, KVec out);
    KVec eval(const GradedSpace& A, int i, int j) const;

private:
    std::map<std::pair<int, int>, KVec> table_;
};

// action of A on L (no symmetry between the slots)
class ActionTable {
public:
    void set(const GradedSpace& A, const GradedSpace& L, int a, int v, KVec out);
    KVec eval(int a, int v) const;

private:
    std::map<std::pair<int, int>, KVec> table_;
};

// bilinear extensions
KVec mul_kv(const GradedSpace& A, const ProductTable& mul, const KVec& x,
            const KVec& y);
KVec act_kv(const ActionTable& act, const KVec& a, const KVec& v);

/* Lie-Rinehart-infinity data: the arity-1 module map doubles as the
   differential of the commutative DG algebra A. */
struct LrData {
    GradedSpace A;
    GradedSpace L;
    ProductTable mul;         // product on A
    ActionTable act;          // A acting on L
    std::vector<MultiBracket> l; // symmetric brackets on L
    std::vector<ModuleMap> m;    // module maps into A
};

// ------------------------------------------------------------- reports ----

/* family: "jacobi" | "assoc" | "module" | "multilinear" | "derivation" |
   "leibniz" | "ce-degree" | "ce-derivation" | "ce-bracket" | "ce-total".
   k: identity arity (CE: derivation index or commutator weight).
   args: element names in evaluation order; module-style entries use "|"
   before the algebra argument and products are written "a*b" in place. */
struct HomotopyFailure {
    std::string family;
    int k = 0;
    std::vector<std::string> args;
    std::string residual;
};

struct HomotopyReport {
    bool ok = true;
    std::vector<HomotopyFailure> failures;
};

// ------------------------------------------------------------ checkers ----

// higher Jacobi identities on all basis tuples of size <= max_k
HomotopyReport check_l_infinity(const GradedSpace& V,
                                const std::vector<MultiBracket>& brackets,
                                int max_k);

// higher associativity conditions, ordered tuples up to length max_k
HomotopyReport check_a_infinity(const GradedSpace& U,
                                const std::vector<MultiBracket>& ops,
                                int max_k);

/* L-infinity identities for l, module identities for m, A-multilinearity
   in the first k-1 slots, derivation in the last slot, and the Leibniz
   rule linking l and m. */
HomotopyReport check_lr_infinity(const LrData& data, int max_k);

// degree +1 linear map on a graded space, basis index -> image
struct LinMap {
    std::map<int, KVec> entries;
};

KVec lin_apply(const LinMap& f, const KVec& v);

/* Verifies each d_r is a degree +1 derivation of the product, then
   sum_{r+s=k} [d_r, d_s] = 0 on every basis element for every k, and
   (sum_r d_r)^2 = 0. */
HomotopyReport check_ce_relations(const GradedSpace& S, const ProductTable& mul,
                                  const std::vector<LinMap>& ds);

// -------------------------------------------------------------- parsing ----

/* Table file syntax (letter 'l' symmetric, letter 'a' non-symmetric):
     basis: e1:-1, e2:-1, e3:0
     l2: (e1,e2) -> 3*e2
   Lines starting with '#' are comments. */
std::pair<GradedSpace, std::vector<MultiBracket>>
parse_bracket_table_text(const std::string& text, char letter);
std::pair<GradedSpace, std::vector<MultiBracket>>
parse_bracket_table_file(const std::string& path, char letter);

/* LR table syntax:
     abasis: one:0, th:1
     lbasis: y1:-1, y2:-1
     mul: (one,th) -> th
     act: (one,y1) -> y1
     l2: (y1,y2) -> 0
     m2: (y1 | th) -> 0       # arguments before '|' live in L, after in A
*/
LrData parse_lr_table_text(const std::string& text);
LrData parse_lr_table_file(const std::string& path);

} // namespace jetlab
