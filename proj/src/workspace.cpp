#include "jetlab/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jetlab/errors.hpp"
#include "jetlab/homotopy.hpp"
#include "jetlab/parse.hpp"

namespace jetlab {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    size_t hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(')
            ++depth;
        if (c == ')')
            --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

} // namespace

// ---------------------------------------------------------- workspaces ----

const PdeSystem& Workspace::system() const {
    if (!sys)
        throw SemanticError("workspace does not contain a PDE system");
    return *sys;
}

const FoliationModel& Workspace::model() const {
    if (models.empty())
        throw SemanticError("workspace does not contain a foliation model");
    return models.begin()->second;
}

Workspace parse_workspace_text(const std::string& text, const std::string& stem,
                               long rewrite_cap) {
    Workspace ws;

    // model files are recognized by their leading directive
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            std::string t = trim(strip_comment(line));
            if (t.empty())
                continue;
            if (t.rfind("coords", 0) == 0) {
                ws.models.emplace(stem, parse_model_text(text));
                return ws;
            }
            break;
        }
    }

    struct Entry {
        int lineno;
        std::string kind, name, body;
    };
    std::string sys_text;
    std::vector<Entry> entries;
    std::map<std::string, int> counters;
    std::set<std::string> names;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(strip_comment(line));
        if (t.empty())
            continue;
        size_t colon = t.find(':');
        if (colon == std::string::npos)
            throw SyntaxError("line " + std::to_string(lineno) + ": expected 'keyword: ...'");
        std::string head = trim(t.substr(0, colon));
        std::string body = trim(t.substr(colon + 1));
        size_t sp = head.find_first_of(" \t");
        std::string kind = sp == std::string::npos ? head : head.substr(0, sp);
        std::string name = sp == std::string::npos ? "" : trim(head.substr(sp));
        if (kind == "independent" || kind == "dependent" || kind == "eq") {
            if (!name.empty())
                throw SyntaxError("line " + std::to_string(lineno) + ": '" + kind +
                                  "' does not take a name");
            sys_text += t + "\n";
        } else if (kind == "chi" || kind == "psi" || kind == "form" || kind == "L") {
            if (name.empty())
                name = kind + std::to_string(++counters[kind]);
            else
                check_name(name);
            if (!names.insert(name).second)
                throw SemanticError("line " + std::to_string(lineno) +
                                    ": duplicate name '" + name + "'");
            entries.push_back({lineno, kind, name, body});
        } else {
            throw SyntaxError("line " + std::to_string(lineno) + ": unknown directive '" +
                              kind + "'");
        }
    }

    ws.sys = parse_system_text(sys_text, rewrite_cap);
    const Context& ctx = ws.sys->ctx();
    for (const Entry& e : entries) {
        try {
            if (e.kind == "chi" || e.kind == "psi")
                ws.sections.emplace(e.name, parse_section(e.body, ctx));
            else if (e.kind == "form")
                ws.forms.emplace(e.name, parse_form(e.body, ctx));
            else
                ws.lagrangians.emplace(e.name, parse_form(e.body, ctx));
        } catch (const SyntaxError& err) {
            throw SyntaxError("line " + std::to_string(e.lineno) + ": " + err.what());
        } catch (const CapError&) {
            throw;
        } catch (const SemanticError& err) {
            throw SemanticError("line " + std::to_string(e.lineno) + ": " + err.what());
        }
    }
    return ws;
}

Workspace load_workspace(const std::string& path, long rewrite_cap) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    std::string stem = dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
    return parse_workspace_text(ss.str(), stem, rewrite_cap);
}

// ------------------------------------------------------------- reports ----

namespace {

struct Report {
    std::vector<std::pair<std::string, std::string>> rows;
    void add(const std::string& k, const std::string& v) { rows.emplace_back(k, v); }
};

void render(const Report& r, const std::string& format) {
    for (auto& [k, v] : r.rows)
        std::cout << k << (format == "machine" ? "=" : " = ") << v << "\n";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

void add_failures(Report& rep, const std::vector<HomotopyFailure>& fails) {
    int i = 0;
    for (const HomotopyFailure& f : fails)
        rep.add("failure[" + std::to_string(++i) + "]",
                f.family + " k=" + std::to_string(f.k) + " at (" + join(f.args, ", ") +
                    "): " + f.residual);
}

Section resolve_section(const Workspace& ws, const std::string& text) {
    if (!text.empty() && text[0] == '@') {
        auto it = ws.sections.find(text.substr(1));
        if (it == ws.sections.end())
            throw SemanticError("no section named '" + text.substr(1) + "'");
        return it->second;
    }
    return parse_section(text, ws.system().ctx());
}

HorizontalForm resolve_form(const Workspace& ws, const std::string& text,
                            bool prefer_lagrangian) {
    if (!text.empty() && text[0] == '@') {
        std::string name = text.substr(1);
        const auto& first = prefer_lagrangian ? ws.lagrangians : ws.forms;
        const auto& second = prefer_lagrangian ? ws.forms : ws.lagrangians;
        auto it = first.find(name);
        if (it != first.end())
            return it->second;
        it = second.find(name);
        if (it != second.end())
            return it->second;
        throw SemanticError("no form named '" + name + "'");
    }
    return parse_form(text, ws.system().ctx());
}

// ------------------------------------------------- deterministic sampling ----

int pick(std::mt19937_64& rng, int lo, int hi) {
    return lo + (int)(rng() % (unsigned long long)(hi - lo + 1));
}

Poly sample_poly(std::mt19937_64& rng, const Context& ctx) {
    std::string s;
    int terms = pick(rng, 1, 2);
    for (int t = 0; t < terms; ++t) {
        int c = pick(rng, -3, 3);
        if (c == 0)
            c = 2;
        if (c < 0)
            s += s.empty() ? "-" : " - ";
        else if (!s.empty())
            s += " + ";
        s += std::to_string(c < 0 ? -c : c);
        int factors = pick(rng, 0, 2);
        for (int f = 0; f < factors; ++f)
            s += "*" + ctx.indep[pick(rng, 0, (int)ctx.indep.size() - 1)] +
                 "^" + std::to_string(pick(rng, 1, 2));
    }
    return parse_expr(s, ctx);
}

BigradedForm sample_form(std::mt19937_64& rng, const FoliationModel& m, int deg) {
    BigradedForm w(deg);
    int terms = pick(rng, 1, 2);
    for (int t = 0; t < terms; ++t) {
        std::vector<int> legs;
        for (int j = 0; j < deg; ++j)
            legs.push_back(pick(rng, 0, m.n() - 1));
        w.add(std::move(legs), sample_poly(rng, m.ctx));
    }
    return w;
}

// ------------------------------------------------------------ dispatch ----

int cmd_foliation_check(const FoliationModel& m, int samples, Report& rep) {
    rep.add("model", "ok");
    rep.add("n", std::to_string(m.n()));
    rep.add("c", std::to_string(m.c));
    rep.add("v", std::to_string(m.v));
    bool constant = constant_structure(m);
    rep.add("structure", constant ? "constant" : "variable");
    rep.add("curvature", vvf_str(m, curvature(m)));

    std::mt19937_64 rng(20240817ULL);
    int checked = 0;
    bool d2_ok = true, split_ok = true;
    for (int round = 0; round < samples; ++round)
        for (int deg = 0; deg < m.n(); ++deg) {
            BigradedForm w = sample_form(rng, m, deg);
            if (!frame_d(m, frame_d(m, w)).is_zero())
                d2_ok = false;
            CeSplit s = ce_derivations(m, w);
            if (!(s.d1 + s.d2 + s.d3 == frame_d(m, w)))
                split_ok = false;
            ++checked;
        }
    rep.add("samples", std::to_string(checked));
    rep.add("d_squared", d2_ok ? "pass" : "fail");
    rep.add("splitting", split_ok ? "pass" : "fail");

    bool ce_ok = true;
    if (constant && m.n() <= 9) {
        CeTruncation ce = ce_truncation_tables(m);
        HomotopyReport hr = check_ce_relations(ce.space, ce.mul, ce.ds);
        rep.add("ce_relations", hr.ok ? "pass" : "fail");
        add_failures(rep, hr.failures);
        ce_ok = hr.ok;
    } else {
        rep.add("ce_relations", "skipped");
    }
    return d2_ok && split_ok && ce_ok ? 0 : 1;
}

} // namespace

// -------------------------------------------------------------- run_cli ----

int run_cli(int argc, char** argv) {
    CLI::App app{"jetlab: differential polynomials, symmetries, variational "
                 "calculus and homotopy checkers"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "report style: text or machine")
        ->check(CLI::IsMember({"text", "machine"}));

    struct {
        std::string file, expr, chi, psi, form, lagrangian, source, by;
        int eq = 1, max_order = 1, max_degree = 1, max_k = 4, samples = 8;
        long rewrite_cap = 10000;
        std::size_t ansatz_cap = 4000;
    } opt;

    auto system_sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->fallthrough();
        sub->add_option("file", opt.file, "workspace file")->required();
        sub->add_option("--rewrite-cap", opt.rewrite_cap,
                        "on-shell rewrite budget (default 10000)");
        return sub;
    };
    auto table_sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->fallthrough();
        sub->add_option("file", opt.file, "table file")->required();
        sub->add_option("--max-k", opt.max_k, "largest identity arity (default 4)");
        return sub;
    };

    CLI::App* reduce = system_sub("reduce", "on-shell normal form of an expression");
    reduce->add_option("--expr", opt.expr, "expression to reduce")->required();

    CLI::App* prolong = system_sub("prolong", "total-derivative consequence of one equation");
    prolong->add_option("--eq", opt.eq, "equation index, 1-based (default 1)");
    prolong->add_option("--by", opt.by, "comma-separated independent variables")->required();

    CLI::App* sym_check = system_sub("symmetry-check", "is chi a higher symmetry?");
    sym_check->add_option("--chi", opt.chi, "generating section or @name")->required();

    CLI::App* sym_find = system_sub("symmetry-find", "solve the determining equations");
    sym_find->add_option("--max-order", opt.max_order, "ansatz jet order (default 1)");
    sym_find->add_option("--max-degree", opt.max_degree, "ansatz degree (default 1)");
    sym_find->add_option("--ansatz-cap", opt.ansatz_cap,
                         "largest ansatz size (default 4000)");

    CLI::App* bracket = system_sub("bracket", "higher Jacobi bracket of two sections");
    bracket->add_option("--chi", opt.chi, "first section or @name")->required();
    bracket->add_option("--psi", opt.psi, "second section or @name")->required();

    CLI::App* conserve = system_sub("conserve", "is the form a conserved current?");
    conserve->add_option("--form", opt.form, "horizontal (n-1)-form or @name")->required();

    CLI::App* el = system_sub("euler-lagrange", "Euler-Lagrange source form");
    el->add_option("--L", opt.lagrangian, "Lagrangian top form or @name")->required();

    CLI::App* helm = system_sub("helmholtz", "is the source form variational?");
    helm->add_option("--source", opt.source, "comma-separated source components")
        ->required();

    table_sub("linfty-check", "L-infinity identities on a bracket table");
    table_sub("ainfty-check", "A-infinity identities on an operation table");
    table_sub("lrinfty-check", "LR-infinity identities on a Lie-Rinehart table");

    CLI::App* fol = app.add_subcommand("foliation-check",
                                       "validate a foliation model and its calculus");
    fol->fallthrough();
    fol->add_option("file", opt.file, "model file")->required();
    fol->add_option("--samples", opt.samples, "sample rounds per degree (default 8)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    Report rep;
    int code = 0;
    try {
        if (app.got_subcommand(reduce)) {
            Workspace ws = load_workspace(opt.file, opt.rewrite_cap);
            const PdeSystem& sys = ws.system();
            rep.add("reduced", sys.reduce(parse_expr(opt.expr, sys.ctx())).str(sys.ctx()));
        } else if (app.got_subcommand(prolong)) {
            Workspace ws = load_workspace(opt.file, opt.rewrite_cap);
            const PdeSystem& sys = ws.system();
            if (opt.eq < 1 || opt.eq > (int)sys.equations().size())
                throw SemanticError("equation index out of range");
            MultiIndex J;
            for (const std::string& name : split_commas(opt.by)) {
                int i = sys.ctx().indep_index(name);
                if (i < 0)
                    throw SemanticError("unknown independent variable '" + name + "'");
                J.push_back(i);
            }
            std::sort(J.begin(), J.end());
            auto [lhs, rhs] = sys.prolong(opt.eq - 1, J);
            rep.add("lhs", lhs.str(sys.ctx()));
            rep.add("rhs", rhs.str(sys.ctx()));
        } else if (app.got_subcommand(sym_check)) {
            Workspace ws = load_workspace(opt.file, opt.rewrite_cap);
            SymmetryReport sr = symmetry_check(ws.system(), resolve_section(ws, opt.chi));
            rep.add("symmetry", sr.ok ? "yes" : "no");
            for (size_t i = 0; i < sr.residuals.size(); ++i)
                rep.add("residual[" + std::to_string(i + 1) + "]",
                        sr.residuals[i].str(ws.system().ctx()));
            code = sr.ok ? 0 : 1;
        } else if (app.got_subcommand(sym_find)) {
            Workspace ws = load_workspace(opt.file, opt.rewrite_cap);
            std::vector<Section> basis = find_symmetries(ws.system(), opt.max_order,
                                                         opt.max_degree, opt.ansatz_cap);
            rep.add("count", std::to_string(basis.size()));
            for (size_t i = 0; i < basis.size(); ++i)
                rep.add("chi[" + std::to_string(i + 1) + "]",
                        section_str(ws.system().ctx(), basis[i]));
        } else if (app.got_subcommand(bracket)) {
            Workspace ws = load_workspace(opt.file, opt.rewrite_cap);
            Section out = jacobi_bracket(ws.system().ctx(), resolve_section(ws, opt.chi),
                                         resolve_section(ws, opt.psi));
            rep.add("bracket", section_str(ws.system().ctx(), out));
        } else if (app.got_subcommand(conserve)) {
            Workspace ws = load_workspace(opt.file, opt.rewrite_cap);
            ConservationReport cr =
                conservation_check(ws.system(), resolve_form(ws, opt.form, false));
            rep.add("conserved", cr.ok ? "yes" : "no");
            rep.add("residual", cr.residual.str(ws.system().ctx()));
            code = cr.ok ? 0 : 1;
        } else if (app.got_subcommand(el)) {
            Workspace ws = load_workspace(opt.file, opt.rewrite_cap);
            SourceForm E =
                euler_lagrange(ws.system().ctx(), resolve_form(ws, opt.lagrangian, true));
            for (size_t a = 0; a < E.comps.size(); ++a)
                rep.add("E[" + std::to_string(a + 1) + "]",
                        E.comps[a].str(ws.system().ctx()));
        } else if (app.got_subcommand(helm)) {
            Workspace ws = load_workspace(opt.file, opt.rewrite_cap);
            const Context& ctx = ws.system().ctx();
            SourceForm E{resolve_section(ws, opt.source)};
            bool ok = helmholtz_check(ctx, E);
            rep.add("variational", ok ? "yes" : "no");
            if (!ok) {
                LinOpMatrix M = linearization_operator(ctx, E);
                LinOpMatrix Mt = formal_adjoint(ctx, M);
                for (int a = 0; a < M.rows; ++a)
                    for (int b = 0; b < M.cols; ++b)
                        if (!(M.at(a, b) == Mt.at(a, b)))
                            rep.add("mismatch[" + std::to_string(a + 1) + "," +
                                        std::to_string(b + 1) + "]",
                                    linop_str(ctx, M.at(a, b)) + "  !=  " +
                                        linop_str(ctx, Mt.at(a, b)));
            }
            code = ok ? 0 : 1;
        } else if (app.got_subcommand("linfty-check") || app.got_subcommand("ainfty-check")) {
            bool lie = app.got_subcommand("linfty-check");
            auto [space, brackets] = parse_bracket_table_file(opt.file, lie ? 'l' : 'a');
            HomotopyReport hr = lie ? check_l_infinity(space, brackets, opt.max_k)
                                    : check_a_infinity(space, brackets, opt.max_k);
            rep.add("ok", hr.ok ? "yes" : "no");
            rep.add("max_k", std::to_string(opt.max_k));
            add_failures(rep, hr.failures);
            code = hr.ok ? 0 : 1;
        } else if (app.got_subcommand("lrinfty-check")) {
            LrData data = parse_lr_table_file(opt.file);
            HomotopyReport hr = check_lr_infinity(data, opt.max_k);
            rep.add("ok", hr.ok ? "yes" : "no");
            rep.add("max_k", std::to_string(opt.max_k));
            add_failures(rep, hr.failures);
            code = hr.ok ? 0 : 1;
        } else if (app.got_subcommand(fol)) {
            Workspace ws = load_workspace(opt.file);
            code = cmd_foliation_check(ws.model(), opt.samples, rep);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SemanticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    render(rep, format);
    return code;
}

} // namespace jetlab
