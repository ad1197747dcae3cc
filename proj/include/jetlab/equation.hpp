#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "jetlab/diffpoly.hpp"

namespace jetlab {

struct Equation {
    JetVar principal; // a derivative u^alpha_I
    DiffPoly rhs;
};

struct PassivityFailure {
    int a, b;      // equation indices
    MultiIndex at; // the shared principal derivative's multi-index
    DiffPoly ra, rb;
};

struct PassivityReport {
    bool ok = true;
    std::vector<PassivityFailure> failures;
};

// All multi-indices over n letters of order 0..max_order, by (order, lex).
std::vector<MultiIndex> all_multiindices(int n, int max_order);

/* Well-foundedness: search for nonnegative integer letter weights under
   which every right-hand side sits strictly below its principal. Such a
   ranking makes on-shell rewriting terminate. Returns nullopt when the
   constraint system is infeasible (circular systems). */
std::optional<std::vector<long>> ranking_weights(const Context& ctx,
                                                 const std::vector<Equation>& eqs);

/* A PDE in solved orthonomic form u^alpha_{I_a} = rhs_a. Construction
   validates the shape and the ranking; reduce rewrites to the on-shell
   normal form in parametric derivatives. */
class PdeSystem {
public:
    PdeSystem(Context ctx, std::vector<Equation> eqs, long rewrite_cap = 10000);

    const Context& ctx() const { return ctx_; }
    const std::vector<Equation>& equations() const { return eqs_; }
    const std::vector<long>& weights() const { return weights_; }
    long rewrite_cap() const { return rewrite_cap_; }
    void set_rewrite_cap(long cap) { rewrite_cap_ = cap; }

    DiffPoly reduce(const DiffPoly& p) const;
    bool is_zero_on_shell(const DiffPoly& p) const;
    std::pair<JetVar, DiffPoly> prolong(int a, const MultiIndex& J) const;
    PassivityReport check_passivity(int up_to_order) const;

private:
    // best matching equation for a derivative, or -1 when parametric
    int match(const JetVar& v) const;
    DiffPoly reduce_impl(const DiffPoly& p, std::map<JetVar, DiffPoly>& memo,
                         long& budget) const;

    Context ctx_;
    std::vector<Equation> eqs_;
    std::vector<long> weights_;
    long rewrite_cap_;
};

// System file: "independent:", "dependent:" and "eq:" lines.
PdeSystem parse_system_file(const std::string& path);
PdeSystem parse_system_text(const std::string& text, long rewrite_cap = 10000);

} // namespace jetlab
