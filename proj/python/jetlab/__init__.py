"""Jet calculus, symmetry analysis and homotopy checkers."""

from jetlab._core import (
    BigradedForm,
    CeSplit,
    ConservationReport,
    Context,
    DiffPoly,
    FoliationModel,
    GradedSpace,
    HomotopyFailure,
    HomotopyReport,
    HorizontalForm,
    IoError,
    JetVar,
    LrData,
    MultiBracket,
    ParseError,
    PdeSystem,
    SemanticError,
    SourceForm,
    SymmetryReport,
    VectorValuedForm,
    ce_check,
    ce_derivations,
    check_a_infinity,
    check_l_infinity,
    check_lr_infinity,
    conservation_check,
    constant_structure,
    curvature,
    euler_lagrange,
    evolutionary_apply,
    find_symmetries,
    form_str,
    frame_d,
    hdiff,
    helmholtz_check,
    jacobi_bracket,
    lr_check,
    parse_bracket_table_file,
    parse_bracket_table_text,
    parse_expr,
    parse_form,
    parse_lr_table_file,
    parse_lr_table_text,
    parse_model_file,
    parse_model_text,
    parse_section,
    parse_system_file,
    parse_system_text,
    section_str,
    symmetry_check,
    total_derivative,
    total_derivative_multi,
    vvf_str,
)

__all__ = [name for name in dir() if not name.startswith("_")]
