// Monic primitive moduli for F_(p^n), p in {2,3,5}, n <= 12,
// coefficients low to high.  Each entry of degree n is the word-order
// least primitive polynomial whose roots are norm-compatible with the
// entries at every proper divisor of n, so the power maps
// g_r -> g_R^((p^R-1)/(p^r-1)) give commuting subfield embeddings.
// Generated by scripts/gen_field_tables.cpp; do not edit by hand.
#pragma once

namespace padiclab::tables {

inline constexpr int kMaxDegree = 12;

inline constexpr int kModuli_p2[13][13] = {
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0},
    {1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0},
    {1, 0, 1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0},
    {1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0},
    {1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1, 0, 0},
    {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0},
    {1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1},
};

inline constexpr int kModuli_p3[13][13] = {
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 2, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 0, 0, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
    {2, 2, 1, 0, 2, 0, 1, 0, 0, 0, 0, 0, 0},
    {1, 0, 2, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0},
    {2, 2, 2, 0, 1, 2, 0, 0, 1, 0, 0, 0, 0},
    {1, 1, 2, 2, 0, 0, 0, 0, 0, 1, 0, 0, 0},
    {2, 1, 0, 0, 2, 2, 2, 0, 0, 0, 1, 0, 0},
    {1, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0},
    {2, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 1},
};

inline constexpr int kModuli_p5[13][13] = {
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {3, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 4, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {3, 3, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 4, 4, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {3, 4, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
    {2, 0, 1, 4, 1, 0, 1, 0, 0, 0, 0, 0, 0},
    {3, 3, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0},
    {2, 4, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0},
    {3, 1, 0, 2, 0, 0, 0, 0, 0, 1, 0, 0, 0},
    {2, 1, 4, 2, 3, 3, 0, 0, 0, 0, 1, 0, 0},
    {3, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0},
    {2, 2, 3, 4, 4, 0, 1, 1, 0, 0, 0, 0, 1},
};

} // namespace padiclab::tables
