#pragma once

#include <map>
#include <optional>
#include <string>

#include "jetlab/equation.hpp"
#include "jetlab/foliation.hpp"
#include "jetlab/horizontal.hpp"
#include "jetlab/symmetry.hpp"

namespace jetlab {

/* One parsed input file. A system workspace holds the PDE system plus any
   named sections, forms and Lagrangians declared next to it; a model file
   (first directive "coords") loads as a foliation model keyed by the file
   stem. Unnamed entries get ordinal names chi1, form1, ...; every name is
   unique across the whole workspace. */
struct Workspace {
    std::optional<PdeSystem> sys;
    std::map<std::string, Section> sections;     // chi / psi lines
    std::map<std::string, HorizontalForm> forms; // form lines
    std::map<std::string, HorizontalForm> lagrangians; // L lines
    std::map<std::string, FoliationModel> models;

    const PdeSystem& system() const; // throws SemanticError when absent
    const FoliationModel& model() const;
};

Workspace parse_workspace_text(const std::string& text, const std::string& stem,
                               long rewrite_cap = 10000);
Workspace load_workspace(const std::string& path, long rewrite_cap = 10000);

/* Command line front end. Subcommands: reduce, prolong, symmetry-check,
   symmetry-find, bracket, conserve, euler-lagrange, helmholtz,
   linfty-check, ainfty-check, lrinfty-check, foliation-check.
   Exit codes: 0 pass/computed, 1 checked property is false, 2 I/O or
   usage, 3 syntax error, 4 semantic error. */
int run_cli(int argc, char** argv);

} // namespace jetlab
