#include "doctest.h"

#include <random>

#include "padiclab/tilt.hpp"

using namespace padiclab;

namespace {

// random element with 1..4 known terms, exponents in (1/p^3)Z, optionally cut
TiltElement random_tilt(const FqFieldPtr& F, std::mt19937_64& rng, bool integral = false,
                        bool exact = false) {
    std::uint64_t q = 1;
    for (int i = 0; i < F->r(); ++i) q *= std::uint64_t(F->p());
    std::vector<TiltTerm> ts;
    int nterms = 1 + int(rng() % 4);
    for (int i = 0; i < nterms; ++i) {
        long long num = integral ? (long long)(rng() % 40) : (long long)(rng() % 60) - 20;
        int dlog = int(rng() % 3);
        boost::multiprecision::cpp_int den = 1;
        for (int j = 0; j < dlog; ++j) den *= F->p();
        FqElement c = F->element_at(1 + rng() % (q - 1)); // nonzero
        ts.push_back({BigRat(num, den), c});
    }
    std::optional<BigRat> cut;
    if (!exact) {
        BigRat top = ts[0].exp;
        for (const auto& t : ts) top = std::max(top, t.exp);
        cut = top + BigRat(1 + (long long)(rng() % 20));
    }
    TiltElement out = tilt_make(F, std::move(ts), cut);
    if (out.is_zero_at_precision()) return tilt_one(F); // merge killed everything
    return out;
}

} // namespace

TEST_CASE("tilt construction and normal form") {
    auto F2 = fq_field(2, 1);
    auto t = tilt_t(F2);
    CHECK((t + t).is_exact_zero()); // characteristic 2
    auto half = tilt_monomial(F2->one(), BigRat(1, 2));
    CHECK(indistinguishable(half * half, t));
    CHECK((half * half).terms().size() == 1);
    CHECK((half * half).terms()[0].exp == BigRat(1));

    CHECK_THROWS_AS(tilt_monomial(F2->one(), BigRat(1, 3)), ConfigError);
    CHECK_THROWS_AS(tilt_make(nullptr, {}), Error);

    // merge and zero-drop
    auto F4 = fq_field(2, 2);
    auto w = F4->gen();
    auto a = tilt_make(F4, {{BigRat(1), w}, {BigRat(0), F4->one()}, {BigRat(1), w}});
    CHECK(a.terms().size() == 1); // the two t-terms cancelled
    CHECK(a.terms()[0].exp == BigRat(0));
}

TEST_CASE("tilt valuation and norm strings") {
    auto F2 = fq_field(2, 1);
    auto t = tilt_t(F2);
    CHECK(t.val() == BigRat(1));
    CHECK(t.norm_str() == "2^-1");
    CHECK(tilt_monomial(F2->one(), BigRat(1, 2)).norm_str() == "2^-1/2");
    CHECK(t.inv().norm_str() == "2^1");
    CHECK(tilt_one(F2).norm_str() == "1");
    CHECK(tilt_zero(F2).norm_str() == "0");

    auto fog = tilt_monomial(F2->one(), BigRat(2)).truncated(BigRat(1));
    CHECK(fog.is_zero_at_precision());
    CHECK(!fog.is_exact_zero());
    CHECK(fog.norm_str() == "O(2^-1)");
    CHECK_THROWS_AS(fog.val(), PrecisionLoss);
    CHECK_THROWS_AS(tilt_zero(F2).val(), ZeroVector);

    // exact norm multiplicativity and the ultrametric inequality
    std::mt19937_64 rng(2024);
    auto F9 = fq_field(3, 2);
    for (int it = 0; it < 200; ++it) {
        auto x = random_tilt(F9, rng);
        auto y = random_tilt(F9, rng);
        CHECK((x * y).val() == x.val() + y.val()); // leading coeffs cannot cancel
        auto s = x + y;
        if (x.val() != y.val()) {
            CHECK(s.val() == std::min(x.val(), y.val()));
        } else if (!s.is_zero_at_precision()) {
            CHECK(s.val() >= x.val());
        }
    }
}

TEST_CASE("tilt cutoff propagation") {
    auto F2 = fq_field(2, 1);
    auto t = tilt_t(F2);
    auto a = tilt_one(F2).truncated(BigRat(5)); // 1 + O(t^5)
    CHECK(a.cutoff() == BigRat(5));
    auto prod = a * t;
    CHECK(prod.cutoff() == BigRat(6));
    CHECK(prod.terms().size() == 1);
    auto sum = a + t;
    CHECK(sum.cutoff() == BigRat(5));
    CHECK(sum.terms().size() == 2);

    // exact zero absorbs even foggy factors
    auto z = tilt_zero(F2) * a;
    CHECK(z.is_exact_zero());
    auto foggy = tilt_monomial(F2->one(), BigRat(7)).truncated(BigRat(3));
    CHECK((foggy * t).is_zero_at_precision());
    CHECK((foggy * t).cutoff() == BigRat(4));
}

TEST_CASE("tilt frobenius forward and inverse") {
    auto F4 = fq_field(2, 2);
    auto w = F4->gen();
    auto a = tilt_from_residue(w) + tilt_t(F4); // w + t
    auto fa = tilt_frobenius(a, 1);
    auto expect = tilt_from_residue(w * w) + tilt_monomial(F4->one(), BigRat(2));
    CHECK(fa.str() == expect.str()); // w^2 + t^2 exactly

    CHECK(tilt_frobenius(tilt_t(F4), -1).str() ==
          tilt_monomial(F4->one(), BigRat(1, 2)).str());

    std::mt19937_64 rng(31);
    auto F8 = fq_field(2, 3);
    for (int it = 0; it < 120; ++it) {
        auto x = random_tilt(F8, rng);
        auto y = random_tilt(F8, rng);
        long long s = 1 + (long long)(rng() % 3);
        CHECK(tilt_frobenius(tilt_frobenius(x, s), -s).str() == x.str()); // exact roundtrip
        CHECK(tilt_frobenius(x * y, s).str() == (tilt_frobenius(x, s) * tilt_frobenius(y, s)).str());
        CHECK(tilt_frobenius(x + y, s).str() == (tilt_frobenius(x, s) + tilt_frobenius(y, s)).str());
    }
    CHECK(tilt_frobenius(a, 0).str() == a.str());
}

TEST_CASE("tilt reduction to the residue field") {
    auto F4 = fq_field(2, 2);
    auto w = F4->gen();
    CHECK(tilt_reduce(tilt_from_residue(w) + tilt_monomial(F4->one(), BigRat(1, 2))) == w);
    CHECK(tilt_reduce(tilt_t(F4)).is_zero());

    auto neg = tilt_monomial(F4->one(), BigRat(-1));
    CHECK_THROWS_AS(tilt_reduce(neg), NegativeValuation);
    auto uncertified = tilt_one(F4).truncated(BigRat(0));
    CHECK_THROWS_AS(tilt_reduce(uncertified), PrecisionLoss);

    std::mt19937_64 rng(99);
    auto F9 = fq_field(3, 2);
    for (int it = 0; it < 200; ++it) {
        auto x = random_tilt(F9, rng, /*integral=*/true);
        auto y = random_tilt(F9, rng, /*integral=*/true);
        CHECK(tilt_reduce(x * y) == tilt_reduce(x) * tilt_reduce(y));
        CHECK(tilt_reduce(x + y) == tilt_reduce(x) + tilt_reduce(y));
        long long s = (long long)(rng() % 3);
        CHECK(tilt_reduce(tilt_frobenius(x, s)) == frobenius_s(tilt_reduce(x), s));
    }
}

TEST_CASE("tilt inversion") {
    auto F2 = fq_field(2, 1);
    auto t = tilt_t(F2);

    // exact monomials invert exactly
    auto ti = t.inv();
    CHECK(ti.cutoff_infinite());
    CHECK(ti.val() == BigRat(-1));
    CHECK((t * ti).str() == tilt_one(F2).str());

    // geometric series: 1/(1+t) = 1 + t + t^2 + ... in characteristic 2
    auto g = (tilt_one(F2) + t).inv();
    CHECK(g.val() == BigRat(0));
    for (const auto& term : g.terms()) CHECK(term.coeff == F2->one());
    CHECK(g.terms().size() == 32); // default relative window
    CHECK(((tilt_one(F2) + t) * g - tilt_one(F2)).is_zero_at_precision());

    CHECK_THROWS_AS(tilt_zero(F2).inv(), DivisionByZero);
    CHECK_THROWS_AS(tilt_one(F2).truncated(BigRat(0)).inv(), PrecisionLoss);

    std::mt19937_64 rng(555);
    auto F9 = fq_field(3, 2);
    for (int it = 0; it < 200; ++it) {
        auto x = random_tilt(F9, rng);
        auto prod = x * x.inv();
        CHECK((prod - tilt_one(F9)).is_zero_at_precision());
        auto y = random_tilt(F9, rng);
        CHECK(((x / y) * y - x).is_zero_at_precision());
    }
}

TEST_CASE("tilt powers") {
    auto F2 = fq_field(2, 1);
    auto one_plus_t = tilt_one(F2) + tilt_t(F2);
    auto p4 = one_plus_t.pow(4);
    CHECK(p4.terms().size() == 2); // 1 + t^4 by the freshman's dream
    CHECK(p4.terms()[1].exp == BigRat(4));
    CHECK(one_plus_t.pow(0).str() == tilt_one(F2).str());

    std::mt19937_64 rng(808);
    auto F4 = fq_field(2, 2);
    for (int it = 0; it < 50; ++it) {
        auto x = random_tilt(F4, rng);
        auto direct = x * x * x;
        CHECK((x.pow(3) - direct).is_zero_at_precision());
    }
}

TEST_CASE("gauss valuation over tilt coefficients") {
    auto F2 = fq_field(2, 1);
    Poly<TiltElement> P(2);
    P.add_term({1, 0}, tilt_t(F2));
    P.add_term({0, 1}, tilt_monomial(F2->one(), BigRat(1, 2)));
    CHECK(tilt_gauss_val(P) == BigRat(1, 2));
    CHECK(tilt_gauss_val_lower_bound(P) == BigRat(1, 2));

    Poly<TiltElement> Q = P;
    // O(t^(1/4)): all terms dropped, cutoff under the certified minimum
    Q.add_term({2, 0}, tilt_monomial(F2->one(), BigRat(1)).truncated(BigRat(1, 4)));
    CHECK_THROWS_AS(tilt_gauss_val(Q), PrecisionLoss);
    CHECK(tilt_gauss_val_lower_bound(Q) == BigRat(1, 4));

    Poly<TiltElement> R = P;
    // O(t^2): fog dominated by the certified minimum
    R.add_term({2, 0}, tilt_monomial(F2->one(), BigRat(3)).truncated(BigRat(2)));
    CHECK(tilt_gauss_val(R) == BigRat(1, 2));

    CHECK_THROWS_AS(tilt_gauss_val(Poly<TiltElement>(2)), ZeroVector);
}

TEST_CASE("eisenstein-style splitting") {
    auto F4 = fq_field(2, 2);
    auto w = F4->gen();

    // (w + t)*x0 + t^(1/2)*x1 at threshold 1/p^2
    Poly<TiltElement> G(2);
    G.add_term({1, 0}, tilt_from_residue(w) + tilt_t(F4));
    G.add_term({0, 1}, tilt_monomial(F4->one(), BigRat(1, 2)));
    auto sp = eisenstein_split(G, BigRat(2));
    CHECK(sp.common_denominator == 2);
    CHECK(sp.m == 4);
    CHECK(sp.u.val() == BigRat(1, 2));
    REQUIRE(sp.g.size() == 5);
    auto F4poly = [&](const char* s) { return parse_poly(F4, 2, s); };
    CHECK(poly_equal(sp.g[0], F4poly("x0").scaled(w)));
    CHECK(poly_equal(sp.g[1], F4poly("x1")));
    CHECK(poly_equal(sp.g[2], F4poly("x0")));
    CHECK(sp.g[3].is_exact_zero());
    CHECK(sp.g[4].is_exact_zero());
    CHECK(!sp.residual_val.has_value());

    // exact reconstruction when nothing is dropped
    Poly<TiltElement> back(2);
    for (long long i = 0; i <= sp.m; ++i)
        back = back + tilt_poly_of_residue(sp.g[i]).scaled(sp.u.pow(std::uint64_t(i)));
    CHECK(poly_equal(back, G));

    // residue-field coefficients: a single group at u-power 0
    Poly<TiltElement> G2(2);
    G2.add_term({1, 0}, tilt_from_residue(w));
    G2.add_term({0, 1}, tilt_one(F4));
    auto sp2 = eisenstein_split(G2, BigRat(1, 2));
    CHECK(sp2.common_denominator == 1);
    CHECK(sp2.m == 0);
    REQUIRE(sp2.g.size() == 1);
    CHECK(poly_equal(sp2.g[0], F4poly("x0").scaled(w) + F4poly("x1")));

    // a dropped tail sits strictly above the threshold
    Poly<TiltElement> G3(1);
    G3.add_term({1}, tilt_t(F4) + tilt_monomial(F4->one(), BigRat(5)));
    auto sp3 = eisenstein_split(G3, BigRat(2));
    CHECK(sp3.m == 2);
    REQUIRE(sp3.residual_val.has_value());
    CHECK(*sp3.residual_val == BigRat(5));
    Poly<TiltElement> back3(1);
    for (long long i = 0; i <= sp3.m; ++i)
        back3 = back3 + tilt_poly_of_residue(sp3.g[i]).scaled(sp3.u.pow(std::uint64_t(i)));
    CHECK(tilt_gauss_val(G3 - back3) == BigRat(5)); // residual norm < p^-2

    // random reconstruction property
    std::mt19937_64 rng(1234);
    auto F9 = fq_field(3, 2);
    for (int it = 0; it < 60; ++it) {
        Poly<TiltElement> H(2);
        int nt = 1 + int(rng() % 3);
        for (int k = 0; k < nt; ++k) {
            Mono m = {int(rng() % 3), int(rng() % 3)};
            H.add_term(std::move(m), random_tilt(F9, rng, /*integral=*/true, /*exact=*/true));
        }
        if (H.is_exact_zero()) continue;
        BigRat eps(1 + (long long)(rng() % 8), 2);
        auto s = eisenstein_split(H, eps);
        Poly<TiltElement> rec(2);
        for (long long i = 0; i <= s.m; ++i)
            rec = rec + tilt_poly_of_residue(s.g[i]).scaled(s.u.pow(std::uint64_t(i)));
        auto diff = H - rec;
        if (!diff.is_zero_at_precision()) CHECK(tilt_gauss_val(diff) > eps);
        if (s.residual_val) CHECK(*s.residual_val > eps);
    }

    // guards
    Poly<TiltElement> bad(1);
    bad.add_term({0}, tilt_monomial(F4->one(), BigRat(-1)));
    CHECK_THROWS_AS(eisenstein_split(bad, BigRat(1)), NegativeValuation);
    Poly<TiltElement> foggy(1);
    foggy.add_term({0}, tilt_one(F4).truncated(BigRat(1)));
    CHECK_THROWS_AS(eisenstein_split(foggy, BigRat(2)), PrecisionLoss);
    CHECK_THROWS_AS(eisenstein_split(Poly<TiltElement>(1), BigRat(1)), ZeroVector);
}

TEST_CASE("tilt serialization") {
    auto F2 = fq_field(2, 1);
    auto t = tilt_t(F2);
    CHECK(t.str() == "[1]*t^(1); cutoff=inf");
    auto mixed = (tilt_one(F2) + tilt_monomial(F2->one(), BigRat(1, 2))).truncated(BigRat(3, 2));
    CHECK(mixed.str() == "[1]*t^(0) + [1]*t^(1/2); cutoff=3/2");
    CHECK(tilt_zero(F2).str() == "0; cutoff=inf");

    // mixed-field arithmetic promotes coefficients
    auto F4 = fq_field(2, 2);
    auto sum = tilt_t(F2) + tilt_from_residue(F4->gen());
    CHECK(sum.field()->r() == 2);
    auto F9 = fq_field(3, 2);
    CHECK_THROWS_AS(tilt_t(F2) + tilt_t(F9), IncompatibleFields);
}
