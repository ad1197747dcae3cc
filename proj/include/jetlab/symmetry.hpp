#pragma once

#include <vector>

#include "jetlab/equation.hpp"

namespace jetlab {

/* Generating section chi = (chi^1 .. chi^m): the coefficients of an
   evolutionary vector field in the dependent-variable frame. */
using Section = std::vector<DiffPoly>;

// apply the evolutionary field of chi: sum_I D_I(chi^alpha) d/du^alpha_I
DiffPoly evolutionary_apply(const Context& ctx, const Section& chi, const DiffPoly& p);

// higher Jacobi bracket {chi, psi}^alpha = E_chi psi^alpha - E_psi chi^alpha
Section jacobi_bracket(const Context& ctx, const Section& chi, const Section& psi);

// on-shell universal linearization: component a is reduce(E_chi F_a)
// with F_a = principal_a - rhs_a
std::vector<DiffPoly> linearization(const PdeSystem& sys, const Section& chi);

struct SymmetryReport {
    bool ok = true;
    std::vector<DiffPoly> residuals; // one per equation
};

SymmetryReport symmetry_check(const PdeSystem& sys, const Section& chi);

/* Linear symmetry ansatz: chi^alpha = sum of unknown coefficients times
   monomials of degree <= poly_degree in the independents and the jet
   variables of order <= jet_order. Returns a reduced-row-echelon basis of
   the solution space of the determining equations, leading coefficient 1,
   unknowns ordered by (component, monomial order). */
std::vector<Section> find_symmetries(const PdeSystem& sys, int jet_order,
                                     int poly_degree, size_t ansatz_cap = 4000);

std::string section_str(const Context& ctx, const Section& s);
Section parse_section(const std::string& text, const Context& ctx);

} // namespace jetlab
