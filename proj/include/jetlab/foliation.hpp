#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jetlab/diffpoly.hpp"
#include "jetlab/homotopy.hpp"

namespace jetlab {

/* Finite-dimensional foliation testbed. A chart y^1..y^N carries a frame
   split into an involutive block C (e_1..e_c) and a complement V
   (e_{c+1}..e_N). Everything downstream -- coframe, structure functions,
   Bott connection, curvature, FN/NR brackets, the LR structure maps and
   the CE derivation triple -- is exact polynomial arithmetic in the frame
   coalgebra. Coefficients are DiffPoly values over a context with no
   dependent variables. */

using Poly = DiffPoly;

// ---- vector fields ----

struct VectorField {
    std::vector<Poly> comps; // coefficients of d/dy^i
};

Poly vf_apply(const Context& ctx, const VectorField& x, const Poly& f);
VectorField vf_bracket(const Context& ctx, const VectorField& x, const VectorField& y);

// ---- model ----

struct FoliationModel {
    Context ctx; // coordinates as independents, no dependents
    int c = 0;   // frame entries 0..c-1 span C
    int v = 0;   // frame entries c..c+v-1 span V
    std::vector<VectorField> frame;
    std::vector<std::vector<Poly>> coframe; // theta^a = sum_i coframe[a][i] dy^i
    // structure[a][b][k]: [e_a, e_b] = sum_k c^k_ab e_k
    std::vector<std::vector<std::vector<Poly>>> structure;

    int n() const { return (int)ctx.indep.size(); }
    bool in_c(int a) const { return a < c; }
};

/* Validates and completes a model: the combined frame must have constant
   nonzero determinant (so the coframe stays polynomial) and the C block
   must be involutive. */
FoliationModel build_model(const std::vector<std::string>& coords,
                           const std::vector<VectorField>& c_frame,
                           const std::vector<VectorField>& v_frame);

// frame expansion of a coordinate vector field: x = sum_a out[a] e_a
std::vector<Poly> frame_components(const FoliationModel& m, const VectorField& x);

// V-frame components of [X_a, Y_b]; a indexes the C block, b the V block
std::vector<Poly> bott_connection(const FoliationModel& m, int a, int b);

// ---- scalar forms in the frame coalgebra ----

/* Exterior form written on the coframe: components keyed by strictly
   increasing frame-index tuples. The C/V split of the legs gives the
   (q,p)-bidegree of each component. */
class BigradedForm {
public:
    BigradedForm() = default;
    explicit BigradedForm(int degree) : deg_(degree) {}
    static BigradedForm scalar(Poly f);

    int degree() const { return deg_; }
    bool is_zero() const { return comps_.empty(); }
    const std::map<std::vector<int>, Poly>& components() const { return comps_; }

    void add(std::vector<int> legs, Poly f); // normalizes order and sign
    Poly coefficient(const std::vector<int>& legs) const;

    BigradedForm operator+(const BigradedForm& o) const;
    BigradedForm operator-(const BigradedForm& o) const;
    BigradedForm operator-() const;
    BigradedForm operator*(const Poly& f) const;
    bool operator==(const BigradedForm& o) const = default;

private:
    int deg_ = 0;
    std::map<std::vector<int>, Poly> comps_;
};

// (#C legs, #V legs) of a leg tuple
std::pair<int, int> leg_bidegree(const FoliationModel& m, const std::vector<int>& legs);

BigradedForm wedge(const BigradedForm& a, const BigradedForm& b);

// exterior derivative in the coframe: df = (e_a f) theta^a and
// d theta^k = -sum_{a<b} c^k_ab theta^a ^ theta^b
BigradedForm frame_d(const FoliationModel& m, const BigradedForm& w);

// contraction with a vector given by frame components
BigradedForm contract(const FoliationModel& m, const std::vector<Poly>& vec,
                      const BigradedForm& w);

// components with all legs in C
BigradedForm horizontal_part(const FoliationModel& m, const BigradedForm& w);

std::string form_str(const FoliationModel& m, const BigradedForm& w);

// ---- vector valued forms ----

class VectorValuedForm {
public:
    VectorValuedForm() = default;
    explicit VectorValuedForm(int degree) : deg_(degree) {}

    int degree() const { return deg_; }
    bool is_zero() const { return comps_.empty(); }
    const std::map<std::vector<int>, std::vector<Poly>>& components() const { return comps_; }

    void add(std::vector<int> legs, int k, Poly f); // f theta^legs (x) e_k
    Poly value(const std::vector<int>& legs, int k) const;

    VectorValuedForm operator+(const VectorValuedForm& o) const;
    VectorValuedForm operator-(const VectorValuedForm& o) const;
    VectorValuedForm operator-() const;
    VectorValuedForm operator*(const Poly& f) const;
    bool operator==(const VectorValuedForm& o) const = default;

private:
    int deg_ = 0;
    std::map<std::vector<int>, std::vector<Poly>> comps_;
};

// vector field as a 0-form with values in the frame
VectorValuedForm vvf_of_field(const FoliationModel& m, const VectorField& x);

// i_K w for K = omega (x) X: omega ^ (i_X w), the algebraic insertion
BigradedForm contract(const FoliationModel& m, const VectorValuedForm& k,
                      const BigradedForm& w);
VectorValuedForm contract(const FoliationModel& m, const VectorValuedForm& k,
                          const VectorValuedForm& l);

// [K,L]^nr = i_K L - (-1)^{(k-1)(l-1)} i_L K
VectorValuedForm nr_bracket(const FoliationModel& m, const VectorValuedForm& k,
                            const VectorValuedForm& l);

// Lie derivative along a vector valued k-form: i_K d - (-1)^{k-1} d i_K
BigradedForm lie_derivative(const FoliationModel& m, const VectorValuedForm& k,
                            const BigradedForm& w);

/* Frolicher-Nijenhuis bracket via the decomposable formula
   [w(x)X, h(x)Y] = w^h (x) [X,Y] + w^L_X h (x) Y - L_Y w^h (x) X
                    + (-1)^deg(w) (dw ^ i_X h (x) Y + i_Y w ^ dh (x) X).
   Restricted to 0-forms this is the Lie bracket. */
VectorValuedForm fn_bracket(const FoliationModel& m, const VectorValuedForm& k,
                            const VectorValuedForm& l);

// R = sum_{a<b in V} theta^a ^ theta^b (x) (C-part of [e_a, e_b])
VectorValuedForm curvature(const FoliationModel& m);

// components with all legs in C and value in V
VectorValuedForm v_horizontal_part(const FoliationModel& m, const VectorValuedForm& w);

std::string vvf_str(const FoliationModel& m, const VectorValuedForm& w);

// ---- CE derivation triple ----

struct CeSplit {
    BigradedForm d1; // bidegree (1,0) part of d
    BigradedForm d2; // bidegree (0,1) part of d
    BigradedForm d3; // -i_R, computed independently of d
};

// d1 + d2 + d3 equals frame_d whenever the model is valid
CeSplit ce_derivations(const FoliationModel& m, const BigradedForm& w);

// ---- LR structure maps ----

/* The six structure maps on (horizontal forms, V-valued horizontal forms).
   L-arguments are graded by form degree minus one; the maps return the
   projection of the raw FN/NR expression onto the horizontal subspace.
   Arguments outside that subspace are rejected. */
class LrMaps {
public:
    explicit LrMaps(const FoliationModel& m);

    VectorValuedForm l1(const VectorValuedForm& w) const; // Bott-twisted d
    VectorValuedForm l2(const VectorValuedForm& w, const VectorValuedForm& u) const;
    VectorValuedForm l3(const VectorValuedForm& w, const VectorValuedForm& u,
                        const VectorValuedForm& z) const;
    BigradedForm m1(const BigradedForm& a) const;
    BigradedForm m2(const VectorValuedForm& w, const BigradedForm& a) const;
    BigradedForm m3(const VectorValuedForm& w, const VectorValuedForm& u,
                    const BigradedForm& a) const;

    const VectorValuedForm& r() const { return r_; }

private:
    const FoliationModel* m_;
    VectorValuedForm r_;
};

LrMaps lr_structure_maps(const FoliationModel& m);

// ---- finite truncations feeding the generic checkers ----

/* A hand-picked basis of horizontal forms and V-valued horizontal forms
   closed under the structure maps with rational constant coefficients.
   Sampling the maps over it yields tables for check_lr_infinity. */
struct LrTruncation {
    std::vector<std::string> a_names;
    std::vector<BigradedForm> a_elems;
    std::vector<std::string> l_names;
    std::vector<VectorValuedForm> l_elems;
};

LrData lr_truncation_tables(const FoliationModel& m, const LrTruncation& t);

/* All 2^N constant-coefficient frame monomials with wedge product and the
   sampled CE derivations; requires constant structure functions. */
struct CeTruncation {
    GradedSpace space;
    ProductTable mul;
    std::vector<LinMap> ds;
};

CeTruncation ce_truncation_tables(const FoliationModel& m);

bool constant_structure(const FoliationModel& m);

// ---- parsing ----

// sum of polynomial-coefficient d/d<coord> atoms, e.g. "d/dz + y*d/dx"
VectorField parse_vector_field(const Context& ctx, const std::string& text);

/* Model file: 'coords: x, y, z' first, then 'cframe:' and 'vframe:' lines
   listing comma-separated vector fields. '#' starts a comment. */
FoliationModel parse_model_text(const std::string& text);
FoliationModel parse_model_file(const std::string& path);

} // namespace jetlab
