#pragma once

#include <random>

#include "jetlab/diffpoly.hpp"
#include "jetlab/equation.hpp"

// shared helpers for the test suites: deterministic RNG and random inputs

namespace testutil {

using namespace jetlab;

inline std::mt19937_64 make_rng(unsigned seed = 20240817) { return std::mt19937_64(seed); }

inline int pick(std::mt19937_64& rng, int lo, int hi) {
    return (int)(lo + rng() % (unsigned long)(hi - lo + 1));
}

// random jet variable of order <= max_order
inline JetVar random_var(std::mt19937_64& rng, const Context& ctx, int max_order) {
    if (ctx.m() == 0 || (ctx.n() > 0 && rng() % 5 == 0))
        return JetVar::x(pick(rng, 0, ctx.n() - 1));
    int alpha = pick(rng, 0, ctx.m() - 1);
    MultiIndex mi;
    int ord = pick(rng, 0, max_order);
    for (int k = 0; k < ord; ++k)
        mi.push_back(pick(rng, 0, ctx.n() - 1));
    return JetVar::u(alpha, mi_sorted(std::move(mi)));
}

// random differential polynomial: <= nterms terms, jet order and degree bounded
inline DiffPoly random_poly(std::mt19937_64& rng, const Context& ctx, int max_order,
                            int max_degree, int nterms) {
    DiffPoly p;
    int terms = pick(rng, 1, nterms);
    for (int t = 0; t < terms; ++t) {
        Monomial m;
        int deg = pick(rng, 0, max_degree);
        DiffPoly factor = DiffPoly::constant(Rat(pick(rng, -4, 4)));
        for (int d = 0; d < deg; ++d)
            factor = factor * DiffPoly::var(random_var(rng, ctx, max_order));
        p += factor;
    }
    return p;
}

} // namespace testutil
