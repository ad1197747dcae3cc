#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "jetlab/workspace.hpp"

using namespace jetlab;

namespace {

const char* kdv_text =
    "independent: x, t\n"
    "dependent: u\n"
    "eq: u_t = u*u_x + u_xxx\n"
    "chi flow: u*u_x + u_xxx\n"
    "chi: u_x\n"
    "form mass: u dx + (1/2*u^2 + u_xx) dt\n"
    "L vol: dx dt\n";

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = "ws_" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

// run the CLI in-process, capturing stdout and muting stderr
int run(std::vector<std::string> args, std::string* out = nullptr) {
    static std::string prog = "jetlab";
    std::vector<char*> argv;
    argv.push_back(prog.data());
    for (std::string& a : args)
        argv.push_back(a.data());
    std::ostringstream captured, muted;
    std::streambuf* old_out = std::cout.rdbuf(captured.rdbuf());
    std::streambuf* old_err = std::cerr.rdbuf(muted.rdbuf());
    int code = run_cli((int)argv.size(), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    if (out)
        *out = captured.str();
    return code;
}

} // namespace

// ---------------------------------------------------------- workspaces ----

TEST_CASE("workspace parsing: systems with named entries") {
    Workspace ws = parse_workspace_text(kdv_text, "kdv");
    REQUIRE(ws.sys.has_value());
    CHECK(ws.system().equations().size() == 1);
    CHECK(ws.sections.size() == 2);
    CHECK(ws.sections.count("flow") == 1);
    CHECK(ws.sections.count("chi1") == 1); // unnamed entries get ordinals
    CHECK(ws.forms.count("mass") == 1);
    CHECK(ws.lagrangians.count("vol") == 1);
    CHECK(ws.models.empty());
    CHECK_THROWS_AS(ws.model(), SemanticError);
}

TEST_CASE("workspace parsing: model files") {
    Workspace ws = parse_workspace_text("# comment first\n"
                                        "coords: x, y\n"
                                        "cframe: d/dx\n"
                                        "vframe: d/dy\n",
                                        "flat");
    CHECK(ws.models.count("flat") == 1);
    CHECK(ws.model().n() == 2);
    CHECK(!ws.sys.has_value());
    CHECK_THROWS_AS(ws.system(), SemanticError);
}

TEST_CASE("workspace parsing: error taxonomy") {
    // left side of an equation must be a bare derivative
    CHECK_THROWS_AS(parse_workspace_text("independent: x\ndependent: u\n"
                                         "eq: u_x + 1 = 0\n",
                                         "t"),
                    SyntaxError);
    // undeclared variable in a section is a semantic error
    CHECK_THROWS_AS(parse_workspace_text("independent: x\ndependent: u\n"
                                         "eq: u_x = u\nchi: v_x\n",
                                         "t"),
                    SemanticError);
    CHECK_THROWS_AS(parse_workspace_text("independent: x\ndependent: u\n"
                                         "eq: u_x = u\nquux: 1\n",
                                         "t"),
                    SyntaxError);
    CHECK_THROWS_AS(parse_workspace_text("independent: x\ndependent: u\n"
                                         "eq: u_x = u\nno colon here\n",
                                         "t"),
                    SyntaxError);
    // names: equations take none, entry names stay unique
    CHECK_THROWS_AS(parse_workspace_text("independent: x\ndependent: u\n"
                                         "eq one: u_x = u\n",
                                         "t"),
                    SyntaxError);
    CHECK_THROWS_AS(parse_workspace_text("independent: x\ndependent: u\n"
                                         "eq: u_x = u\nchi a: u\nform a: u dx\n",
                                         "t"),
                    SemanticError);
    CHECK_THROWS_AS(load_workspace("no_such_file.sys"), IoError);
}

// ------------------------------------------------------------------ CLI ----

TEST_CASE("cli: subcommands, outputs and exit codes") {
    std::string kdv = write_temp("kdv.sys", kdv_text);
    std::string wave = write_temp("wave.sys", "independent: x, t\ndependent: u\n"
                                              "eq: u_tt = u_xx\n");
    std::string out;

    CHECK(run({"symmetry-check", kdv, "--chi", "u_x"}, &out) == 0);
    CHECK(out == "symmetry = yes\nresidual[1] = 0\n");

    CHECK(run({"symmetry-check", kdv, "--chi", "@flow"}) == 0);
    CHECK(run({"symmetry-check", kdv, "--chi", "u"}, &out) == 1);
    CHECK(out.find("symmetry = no") == 0);

    CHECK(run({"euler-lagrange", wave, "--L", "(1/2*u_t^2 - 1/2*u_x^2) dx dt"},
              &out) == 0);
    CHECK(out == "E[1] = -u_tt + u_xx\n");

    CHECK(run({"helmholtz", kdv, "--source", "u_t - u*u_x - u_xxx"}, &out) == 1);
    CHECK(out.find("variational = no") == 0);
    CHECK(out.find("mismatch[1,1]") != std::string::npos);
    CHECK(run({"helmholtz", wave, "--source", "u_tt - u_xx"}) == 0);

    CHECK(run({"conserve", kdv, "--form", "@mass"}, &out) == 0);
    CHECK(out == "conserved = yes\nresidual = 0\n");
    CHECK(run({"conserve", kdv, "--form", "u_x dx"}) == 1);

    CHECK(run({"reduce", kdv, "--expr", "u_xt", "--format", "machine"}, &out) == 0);
    CHECK(out == "reduced=u*u_xx + u_x^2 + u_xxxx\n");

    CHECK(run({"prolong", kdv, "--eq", "1", "--by", "x"}, &out) == 0);
    CHECK(out == "lhs = u_xt\nrhs = u*u_xx + u_x^2 + u_xxxx\n");

    CHECK(run({"bracket", kdv, "--chi", "@chi1", "--psi", "@flow"}, &out) == 0);
    CHECK(out == "bracket = 0\n");

    std::remove(kdv.c_str());
    std::remove(wave.c_str());
}

TEST_CASE("cli: homotopy and foliation subcommands") {
    std::string good = write_temp("sl2.ltab", "basis: e:-1, f:-1, h:-1\n"
                                              "l2: (e,f) -> h\n"
                                              "l2: (h,e) -> 2*e\n"
                                              "l2: (h,f) -> -2*f\n");
    std::string bad = write_temp("sl2bad.ltab", "basis: e:-1, f:-1, h:-1\n"
                                                "l2: (e,f) -> h\n"
                                                "l2: (h,e) -> 3*e\n"
                                                "l2: (h,f) -> -2*f\n");
    std::string fol = write_temp("flat.fol", "coords: x, y\ncframe: d/dx\n"
                                             "vframe: d/dy\n");
    std::string out;

    CHECK(run({"linfty-check", good, "--max-k", "5"}, &out) == 0);
    CHECK(out == "ok = yes\nmax_k = 5\n");
    CHECK(run({"linfty-check", bad}, &out) == 1);
    CHECK(out.find("ok = no") == 0);
    CHECK(out.find("jacobi k=3") != std::string::npos);

    CHECK(run({"foliation-check", fol}, &out) == 0);
    CHECK(out.find("model = ok") == 0);
    CHECK(out.find("curvature = 0") != std::string::npos);
    CHECK(out.find("ce_relations = pass") != std::string::npos);

    std::remove(good.c_str());
    std::remove(bad.c_str());
    std::remove(fol.c_str());
}

TEST_CASE("cli: error exit codes") {
    CHECK(run({"reduce", "no_such.sys", "--expr", "u"}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({}) == 2);

    std::string bad_lhs = write_temp("bad1.sys", "independent: x\ndependent: u\n"
                                                 "eq: u_x + 1 = 0\n");
    CHECK(run({"reduce", bad_lhs, "--expr", "u"}) == 3);
    std::remove(bad_lhs.c_str());

    std::string bad_chi = write_temp("bad2.sys", "independent: x\ndependent: u\n"
                                                 "eq: u_x = u\nchi: v_x\n");
    CHECK(run({"reduce", bad_chi, "--expr", "u"}) == 4);
    std::remove(bad_chi.c_str());

    // ad-hoc expressions hit the same taxonomy
    std::string sys = write_temp("ok.sys", "independent: x\ndependent: u\n"
                                           "eq: u_x = u\n");
    CHECK(run({"reduce", sys, "--expr", "v + 1"}) == 4);
    CHECK(run({"reduce", sys, "--expr", "(u"}) == 3);
    CHECK(run({"symmetry-check", sys, "--chi", "@nope"}) == 4);
    std::remove(sys.c_str());
}
