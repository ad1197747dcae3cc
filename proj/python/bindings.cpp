#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jetlab/equation.hpp"
#include "jetlab/errors.hpp"
#include "jetlab/foliation.hpp"
#include "jetlab/homotopy.hpp"
#include "jetlab/horizontal.hpp"
#include "jetlab/parse.hpp"
#include "jetlab/symmetry.hpp"

namespace py = pybind11;
using namespace jetlab;

namespace {

std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "jet calculus, symmetry analysis and homotopy checkers";

    py::register_exception<IoError>(m, "IoError");
    py::register_exception<SyntaxError>(m, "ParseError");
    py::register_exception<SemanticError>(m, "SemanticError");

    // ---- jet layer ----

    py::class_<Context>(m, "Context")
        .def(py::init([](std::vector<std::string> indep, std::vector<std::string> dep) {
                 return Context{std::move(indep), std::move(dep)};
             }),
             py::arg("independent"), py::arg("dependent"))
        .def_readonly("independent", &Context::indep)
        .def_readonly("dependent", &Context::dep);

    py::class_<JetVar>(m, "JetVar")
        .def("order", &JetVar::order)
        .def("str", &JetVar::str, py::arg("ctx"));

    py::class_<DiffPoly>(m, "DiffPoly")
        .def("str", &DiffPoly::str, py::arg("ctx"))
        .def("is_zero", &DiffPoly::is_zero)
        .def("degree", &DiffPoly::degree)
        .def("jet_order", &DiffPoly::jet_order)
        .def("term_count", &DiffPoly::term_count)
        .def("__add__", [](const DiffPoly& a, const DiffPoly& b) { return a + b; })
        .def("__sub__", [](const DiffPoly& a, const DiffPoly& b) { return a - b; })
        .def("__mul__", [](const DiffPoly& a, const DiffPoly& b) { return a * b; })
        .def("__neg__", [](const DiffPoly& a) { return -a; })
        .def("__eq__", [](const DiffPoly& a, const DiffPoly& b) { return a == b; });

    m.def("parse_expr", &parse_expr, py::arg("text"), py::arg("ctx"));
    m.def("total_derivative", &total_derivative, py::arg("ctx"), py::arg("p"),
          py::arg("i"));
    m.def("total_derivative_multi", &total_derivative_multi, py::arg("ctx"),
          py::arg("p"), py::arg("index"));

    // ---- equations ----

    py::class_<PdeSystem>(m, "PdeSystem")
        .def_property_readonly("ctx", &PdeSystem::ctx,
                               py::return_value_policy::reference_internal)
        .def_property_readonly("size",
                               [](const PdeSystem& s) { return s.equations().size(); })
        .def("reduce", &PdeSystem::reduce, py::arg("p"))
        .def("is_zero_on_shell", &PdeSystem::is_zero_on_shell, py::arg("p"))
        .def("prolong", &PdeSystem::prolong, py::arg("eq"), py::arg("index"));

    m.def("parse_system_text", &parse_system_text, py::arg("text"),
          py::arg("rewrite_cap") = 10000);
    m.def("parse_system_file", &parse_system_file, py::arg("path"));

    // ---- symmetries ----

    py::class_<SymmetryReport>(m, "SymmetryReport")
        .def_readonly("ok", &SymmetryReport::ok)
        .def_readonly("residuals", &SymmetryReport::residuals);

    m.def("parse_section", &parse_section, py::arg("text"), py::arg("ctx"));
    m.def("section_str", &section_str, py::arg("ctx"), py::arg("s"));
    m.def("evolutionary_apply", &evolutionary_apply, py::arg("ctx"), py::arg("chi"),
          py::arg("p"));
    m.def("jacobi_bracket", &jacobi_bracket, py::arg("ctx"), py::arg("chi"),
          py::arg("psi"));
    m.def("symmetry_check", &symmetry_check, py::arg("sys"), py::arg("chi"));
    m.def("find_symmetries", &find_symmetries, py::arg("sys"), py::arg("jet_order"),
          py::arg("poly_degree"), py::arg("ansatz_cap") = 4000);

    // ---- horizontal calculus ----

    py::class_<HorizontalForm>(m, "HorizontalForm")
        .def(py::init<int>(), py::arg("degree") = 0)
        .def("degree", &HorizontalForm::degree)
        .def("add", &HorizontalForm::add, py::arg("tuple"), py::arg("f"))
        .def("coefficient", &HorizontalForm::coefficient, py::arg("tuple"))
        .def("str", &HorizontalForm::str, py::arg("ctx"))
        .def("__eq__", [](const HorizontalForm& a, const HorizontalForm& b) {
            return a == b;
        });

    py::class_<ConservationReport>(m, "ConservationReport")
        .def_readonly("ok", &ConservationReport::ok)
        .def_readonly("residual", &ConservationReport::residual);

    py::class_<SourceForm>(m, "SourceForm")
        .def(py::init([](std::vector<DiffPoly> comps) {
                 return SourceForm{std::move(comps)};
             }),
             py::arg("comps"))
        .def_readonly("comps", &SourceForm::comps);

    m.def("parse_form", &parse_form, py::arg("text"), py::arg("ctx"));
    m.def("hdiff", &hdiff, py::arg("ctx"), py::arg("w"));
    m.def("conservation_check", &conservation_check, py::arg("sys"), py::arg("J"));
    m.def("euler_lagrange",
          py::overload_cast<const Context&, const DiffPoly&>(&euler_lagrange),
          py::arg("ctx"), py::arg("lagrangian"));
    m.def("euler_lagrange",
          py::overload_cast<const Context&, const HorizontalForm&>(&euler_lagrange),
          py::arg("ctx"), py::arg("L"));
    m.def("helmholtz_check", &helmholtz_check, py::arg("ctx"), py::arg("E"));

    // ---- homotopy checkers ----

    py::class_<GradedSpace>(m, "GradedSpace")
        .def(py::init<>())
        .def("add", &GradedSpace::add, py::arg("name"), py::arg("degree"))
        .def("dim", &GradedSpace::dim)
        .def_readonly("names", &GradedSpace::names)
        .def_readonly("degrees", &GradedSpace::degrees);

    py::class_<MultiBracket>(m, "MultiBracket")
        .def(py::init<int, bool>(), py::arg("arity"), py::arg("symmetric"))
        .def("set",
             [](MultiBracket& b, const GradedSpace& V, std::vector<int> in,
                std::map<int, std::string> out) {
                 KVec kv;
                 for (auto& [i, c] : out)
                     kv[i] = Rat(c);
                 b.set(V, std::move(in), std::move(kv));
             },
             py::arg("space"), py::arg("inputs"), py::arg("out"))
        .def("eval", [](const MultiBracket& b, const GradedSpace& V,
                        std::vector<int> in) {
            std::map<int, std::string> out;
            for (auto& [i, c] : b.eval(V, std::move(in)))
                out[i] = rat_str(c);
            return out;
        },
             py::arg("space"), py::arg("inputs"));

    py::class_<HomotopyFailure>(m, "HomotopyFailure")
        .def_readonly("family", &HomotopyFailure::family)
        .def_readonly("k", &HomotopyFailure::k)
        .def_readonly("args", &HomotopyFailure::args)
        .def_readonly("residual", &HomotopyFailure::residual);

    py::class_<HomotopyReport>(m, "HomotopyReport")
        .def_readonly("ok", &HomotopyReport::ok)
        .def_readonly("failures", &HomotopyReport::failures);

    py::class_<LrData>(m, "LrData");

    m.def("check_l_infinity", &check_l_infinity, py::arg("space"),
          py::arg("brackets"), py::arg("max_k"));
    m.def("check_a_infinity", &check_a_infinity, py::arg("space"), py::arg("ops"),
          py::arg("max_k"));
    m.def("check_lr_infinity", &check_lr_infinity, py::arg("data"), py::arg("max_k"));
    m.def("parse_bracket_table_text", &parse_bracket_table_text, py::arg("text"),
          py::arg("letter"));
    m.def("parse_bracket_table_file", &parse_bracket_table_file, py::arg("path"),
          py::arg("letter"));
    m.def("parse_lr_table_text", &parse_lr_table_text, py::arg("text"));
    m.def("parse_lr_table_file", &parse_lr_table_file, py::arg("path"));

    // ---- foliation testbed ----

    py::class_<FoliationModel>(m, "FoliationModel")
        .def_readonly("ctx", &FoliationModel::ctx)
        .def_readonly("c", &FoliationModel::c)
        .def_readonly("v", &FoliationModel::v)
        .def_property_readonly("n", &FoliationModel::n);

    py::class_<BigradedForm>(m, "BigradedForm")
        .def(py::init<int>(), py::arg("degree") = 0)
        .def("degree", &BigradedForm::degree)
        .def("is_zero", &BigradedForm::is_zero)
        .def("add", &BigradedForm::add, py::arg("legs"), py::arg("f"))
        .def("coefficient", &BigradedForm::coefficient, py::arg("legs"));

    py::class_<VectorValuedForm>(m, "VectorValuedForm")
        .def(py::init<int>(), py::arg("degree") = 0)
        .def("degree", &VectorValuedForm::degree)
        .def("is_zero", &VectorValuedForm::is_zero)
        .def("add", &VectorValuedForm::add, py::arg("legs"), py::arg("k"),
             py::arg("f"))
        .def("value", &VectorValuedForm::value, py::arg("legs"), py::arg("k"));

    py::class_<CeSplit>(m, "CeSplit")
        .def_readonly("d1", &CeSplit::d1)
        .def_readonly("d2", &CeSplit::d2)
        .def_readonly("d3", &CeSplit::d3);

    m.def("parse_model_text", &parse_model_text, py::arg("text"));
    m.def("parse_model_file", &parse_model_file, py::arg("path"));
    m.def("frame_d", &frame_d, py::arg("model"), py::arg("w"));
    m.def("curvature", &curvature, py::arg("model"));
    m.def("ce_derivations", &ce_derivations, py::arg("model"), py::arg("w"));
    m.def("constant_structure", &constant_structure, py::arg("model"));
    m.def("form_str", &form_str, py::arg("model"), py::arg("w"));
    m.def("vvf_str", &vvf_str, py::arg("model"), py::arg("w"));
    m.def("lr_check", [](const FoliationModel& model, py::object trunc, int max_k) {
        LrTruncation t;
        py::dict d = trunc.cast<py::dict>();
        for (auto& [name, elem] : d["a"].cast<std::map<std::string, BigradedForm>>()) {
            t.a_names.push_back(name);
            t.a_elems.push_back(elem);
        }
        for (auto& [name, elem] :
             d["l"].cast<std::map<std::string, VectorValuedForm>>()) {
            t.l_names.push_back(name);
            t.l_elems.push_back(elem);
        }
        return check_lr_infinity(lr_truncation_tables(model, t), max_k);
    },
          py::arg("model"), py::arg("truncation"), py::arg("max_k") = 4);
    m.def("ce_check", [](const FoliationModel& model) {
        CeTruncation ce = ce_truncation_tables(model);
        return check_ce_relations(ce.space, ce.mul, ce.ds);
    },
          py::arg("model"));
}
