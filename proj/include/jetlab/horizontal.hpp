#pragma once

#include <map>
#include <vector>

#include "jetlab/equation.hpp"

namespace jetlab {

/* Horizontal q-form: coefficients against strictly increasing dx-tuples.
   Tuples of length > n cannot exist, so overflow degrees are forced zero. */
class HorizontalForm {
public:
    explicit HorizontalForm(int degree = 0) : deg_(degree) {}
    static HorizontalForm scalar(DiffPoly f);

    int degree() const { return deg_; }
    bool is_zero() const { return comps_.empty(); }
    const std::map<std::vector<int>, DiffPoly>& components() const { return comps_; }
    DiffPoly coefficient(const std::vector<int>& tuple) const; // signed lookup

    // accumulate f dx^tuple, normalizing order and sign; repeats vanish
    void add(std::vector<int> tuple, DiffPoly f);

    HorizontalForm operator+(const HorizontalForm& o) const;
    HorizontalForm operator-(const HorizontalForm& o) const;
    HorizontalForm operator*(const Rat& c) const;
    bool operator==(const HorizontalForm& o) const;

    std::string str(const Context& ctx) const;

private:
    int deg_;
    std::map<std::vector<int>, DiffPoly> comps_;
};

HorizontalForm wedge(const HorizontalForm& a, const HorizontalForm& b);

// horizontal De Rham differential: d(f dx^T) = D_i f dx^i ^ dx^T
HorizontalForm hdiff(const Context& ctx, const HorizontalForm& w);

struct ConservationReport {
    bool ok = true;
    DiffPoly residual; // reduced coefficient of the top form
};

// is the (n-1)-form J closed on shell?
ConservationReport conservation_check(const PdeSystem& sys, const HorizontalForm& J);

/* Source form: E_alpha v^alpha (x) d^n x. */
struct SourceForm {
    std::vector<DiffPoly> comps;
    bool operator==(const SourceForm&) const = default;
};

// Euler-Lagrange operator of a Lagrangian top form
SourceForm euler_lagrange(const Context& ctx, const HorizontalForm& L);
SourceForm euler_lagrange(const Context& ctx, const DiffPoly& lagrangian);

// graded, then lexicographic: the display order for operator terms
struct MiGradedLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    }
};

/* Matrix of linear total-differential operators, entries in the normal
   form sum_I c_I D_I with coefficients on the left. */
using LinOp = std::map<MultiIndex, DiffPoly, MiGradedLess>;

struct LinOpMatrix {
    int rows = 0, cols = 0;
    std::vector<LinOp> entries; // row-major
    LinOp& at(int r, int c) { return entries[r * cols + c]; }
    const LinOp& at(int r, int c) const { return entries[r * cols + c]; }
    bool operator==(const LinOpMatrix&) const = default;
};

std::string linop_str(const Context& ctx, const LinOp& op);

// apply an operator entry to a differential polynomial
DiffPoly linop_apply(const Context& ctx, const LinOp& op, const DiffPoly& p);

// universal linearization of a source form: entry (a, alpha) is
// sum_I dE_a/du^alpha_I D_I
LinOpMatrix linearization_operator(const Context& ctx, const SourceForm& E);

// formal adjoint: entry (alpha, beta) = sum_I (-1)^|I| D_I ∘ (c_{beta,alpha,I} . )
LinOpMatrix formal_adjoint(const Context& ctx, const LinOpMatrix& M);

// Helmholtz variationality test: the linearization equals its adjoint
bool helmholtz_check(const Context& ctx, const SourceForm& E);

// form file syntax: "u dx + (1/2*u^2 + u_xx) dt"
HorizontalForm parse_form(const std::string& text, const Context& ctx);

} // namespace jetlab
