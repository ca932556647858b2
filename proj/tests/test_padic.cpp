#include "padiclab/padic.hpp"

#include <random>

#include "doctest.h"
#include "padiclab/errors.hpp"
#include "padiclab/fq.hpp"

using namespace padiclab;

namespace {

PadicNumber random_integral(const LocalFieldPtr& F, std::mt19937_64& rng, int digits = 8) {
    std::vector<cpp_int> c(static_cast<size_t>(F->r()) * F->e());
    cpp_int cap = 1;
    for (int i = 0; i < digits; ++i) cap *= F->p();
    std::uniform_int_distribution<long long> d(0, 1L << 30);
    for (auto& x : c) x = cpp_int(d(rng)) % cap;
    return F->from_coords(c);
}

PadicNumber random_regular(const LocalFieldPtr& F, std::mt19937_64& rng) {
    for (int tries = 0; tries < 64; ++tries) {
        PadicNumber x = random_integral(F, rng);
        if (x.state() == PadicNumber::State::kRegular) return x;
    }
    return F->one();
}

} // namespace

TEST_CASE("integer arithmetic embeds exactly") {
    std::mt19937_64 rng(11);
    for (long long p : {2LL, 3LL, 5LL}) {
        auto F = local_field(p, 1);
        std::uniform_int_distribution<long long> d(-1000000, 1000000);
        for (int i = 0; i < 300; ++i) {
            long long a = d(rng), b = d(rng);
            CHECK(indistinguishable(F->from_int(a) + F->from_int(b), F->from_int(a + b)));
            CHECK(indistinguishable(F->from_int(a) * F->from_int(b), F->from_int(a * b)));
            CHECK(indistinguishable(F->from_int(a) - F->from_int(b), F->from_int(a - b)));
        }
        // digits visible through integral coordinates
        auto x = F->from_int(1234567);
        auto c = integral_coords(x, 12);
        cpp_int pk = 1;
        for (int i = 0; i < 12; ++i) pk *= p;
        CHECK(c[0] == cpp_int(1234567) % pk);
    }
}

TEST_CASE("valuation and norm strings") {
    auto Q2 = local_field(2, 1);
    CHECK(Q2->from_int(48).val() == Valu(Rat(4)));
    CHECK(Q2->from_int(48).norm_str() == "2^-4");
    CHECK(Q2->from_int(1).norm_str() == "1");
    CHECK(Q2->zero().val().is_infinite());
    CHECK(Q2->zero().norm_str() == "0");
    auto inv48 = Q2->from_int(48).inv();
    CHECK(inv48.val() == Valu(Rat(-4)));
    CHECK(inv48.norm_str() == "2^4");
    auto vn = valuation_norm(Q2->from_int(40));
    CHECK(vn.val == Valu(Rat(3)));
    CHECK(vn.norm == "2^-3");
}

TEST_CASE("ultrametric and multiplicativity of the valuation") {
    std::mt19937_64 rng(12);
    for (auto [p, r] : std::vector<std::pair<long long, int>>{{2, 3}, {3, 2}, {5, 1}}) {
        auto F = local_field(p, r);
        for (int i = 0; i < 400; ++i) {
            PadicNumber a = random_regular(F, rng);
            PadicNumber b = random_regular(F, rng);
            Valu va = a.val(), vb = b.val();
            PadicNumber s = a + b;
            CHECK(std::min(va, vb) <= s.val_lower_bound());
            if (va != vb) {
                REQUIRE(s.state() == PadicNumber::State::kRegular);
                CHECK(s.val() == std::min(va, vb));
            }
            PadicNumber prod = a * b;
            REQUIRE(prod.state() == PadicNumber::State::kRegular);
            CHECK(prod.val() == va + vb);
        }
    }
}

TEST_CASE("division and inversion round trips") {
    std::mt19937_64 rng(13);
    for (auto [p, r] : std::vector<std::pair<long long, int>>{{2, 1}, {2, 2}, {3, 4}, {5, 2}}) {
        auto F = local_field(p, r);
        for (int i = 0; i < 120; ++i) {
            PadicNumber a = random_regular(F, rng);
            PadicNumber b = random_regular(F, rng);
            CHECK(indistinguishable(a / b * b, a));
            CHECK(indistinguishable(b * b.inv(), F->one()));
        }
    }
    auto Q2 = local_field(2, 1);
    CHECK_THROWS_AS((void)Q2->zero().inv(), DivisionByZero);
}

TEST_CASE("generator satisfies the lifted modulus exactly") {
    for (auto [p, r] : std::vector<std::pair<long long, int>>{{2, 2}, {2, 6}, {3, 3}, {5, 4}}) {
        auto F = local_field(p, r);
        std::vector<PadicNumber> f;
        for (int i = 0; i <= r; ++i) f.push_back(F->from_cpp(F->modulus_lift()[i]));
        CHECK(poly_eval(f, F->theta()).is_zero_at_precision());
        CHECK(reduce_residue(F->theta()) == F->residue_field()->gen());
    }
}

TEST_CASE("hensel root against exhaustive square-root oracles") {
    // x^2 = 17 over Q_2: the unique root congruent to 1 mod 8, checked mod 2^11
    auto Q2 = local_field(2, 1);
    std::vector<PadicNumber> f{Q2->from_int(-17), Q2->zero(), Q2->one()};
    PadicNumber root = hensel_root(f, Q2->one());
    long long oracle = -1;
    for (long long x = 0; x < (1LL << 13); ++x) {
        if ((x * x - 17) % (1LL << 13) == 0 && x % 8 == 1) {
            oracle = x % (1LL << 11);
            break;
        }
    }
    REQUIRE(oracle != -1);
    CHECK(integral_coords(root, 11)[0] == cpp_int(oracle));
    CHECK(poly_eval(f, root).is_zero_at_precision());

    // x^2 = 7 over Q_3: root congruent to 1 mod 3, checked mod 3^6
    auto Q3 = local_field(3, 1);
    std::vector<PadicNumber> g{Q3->from_int(-7), Q3->zero(), Q3->one()};
    PadicNumber root3 = hensel_root(g, Q3->one());
    long long m7 = 2187; // 3^7
    long long oracle3 = -1;
    for (long long x = 0; x < m7; ++x) {
        if ((x * x - 7) % m7 == 0 && x % 3 == 1) {
            oracle3 = x % 729;
            break;
        }
    }
    REQUIRE(oracle3 != -1);
    CHECK(integral_coords(root3, 6)[0] == cpp_int(oracle3));

    // preconditions: no 2-adic square roots of 3 or 2 from the unit seed
    std::vector<PadicNumber> h{Q2->from_int(-3), Q2->zero(), Q2->one()};
    CHECK_THROWS_AS((void)hensel_root(h, Q2->one()), HenselPreconditionFailed);
    std::vector<PadicNumber> h2{Q2->from_int(-2), Q2->zero(), Q2->one()};
    CHECK_THROWS_AS((void)hensel_root(h2, Q2->one()), HenselPreconditionFailed);
}

TEST_CASE("teichmuller lifts are the multiplicative section") {
    auto F4 = fq_field(2, 2);
    auto Q4 = local_field(2, 2);
    PadicNumber T = teichmuller_lift(F4->gen(), Q4);
    CHECK(indistinguishable(T.pow(3), Q4->one()));
    // a primitive cube root of unity kills x^2 + x + 1
    CHECK((T * T + T + Q4->one()).is_zero_at_precision());
    CHECK(reduce_residue(T) == F4->gen());
    CHECK(indistinguishable(T * T, teichmuller_lift(F4->gen().pow(2), Q4)));

    CHECK(teichmuller_lift(F4->zero(), Q4).is_exact_zero());
    CHECK(indistinguishable(teichmuller_lift(F4->one(), Q4), Q4->one()));

    std::mt19937_64 rng(14);
    for (auto [p, r] : std::vector<std::pair<long long, int>>{{2, 3}, {3, 2}, {5, 2}}) {
        auto K = fq_field(p, r);
        auto F = local_field(p, r);
        std::uniform_int_distribution<std::uint64_t> d(0, K->size() - 1);
        for (int i = 0; i < 60; ++i) {
            FqElement a = K->element_at(d(rng)), b = K->element_at(d(rng));
            CHECK(indistinguishable(teichmuller_lift(a, F) * teichmuller_lift(b, F),
                                    teichmuller_lift(a * b, F)));
            CHECK(reduce_residue(teichmuller_lift(a, F)) == a);
        }
        // q-power stability: T^(p^r) = T
        FqElement a = K->element_at(d(rng));
        PadicNumber t = teichmuller_lift(a, F);
        std::uint64_t q = 1;
        for (int i = 0; i < r; ++i) q *= static_cast<std::uint64_t>(p);
        CHECK(indistinguishable(t.pow(q), t));
    }
}

TEST_CASE("frobenius automorphism acts as residue frobenius") {
    auto Q4 = local_field(2, 2);
    auto F4 = fq_field(2, 2);
    PadicNumber T = teichmuller_lift(F4->gen(), Q4);
    CHECK(indistinguishable(frobenius_automorphism_sigma(T, 1),
                            teichmuller_lift(F4->gen().pow(2), Q4)));
    std::mt19937_64 rng(15);
    for (int i = 0; i < 80; ++i) {
        PadicNumber a = random_regular(Q4, rng);
        PadicNumber b = random_regular(Q4, rng);
        PadicNumber sa = frobenius_automorphism_sigma(a, 1);
        CHECK(indistinguishable(frobenius_automorphism_sigma(sa, 1), a)); // order 2
        CHECK(indistinguishable(frobenius_automorphism_sigma(a + b, 1),
                                sa + frobenius_automorphism_sigma(b, 1)));
        CHECK(indistinguishable(frobenius_automorphism_sigma(a * b, 1),
                                sa * frobenius_automorphism_sigma(b, 1)));
        CHECK(reduce_residue(sa) == frobenius_s(reduce_residue(a), 1));
        CHECK(indistinguishable(frobenius_automorphism_sigma(sa, -1), a));
        CHECK(a.val() == sa.val());
    }
    // the prime field is fixed
    CHECK(indistinguishable(frobenius_automorphism_sigma(Q4->from_int(22), 1),
                            Q4->from_int(22)));

    auto U3 = local_field(3, 3);
    for (int i = 0; i < 30; ++i) {
        PadicNumber a = random_regular(U3, rng);
        PadicNumber s3 = frobenius_automorphism_sigma(
            frobenius_automorphism_sigma(frobenius_automorphism_sigma(a, 1), 1), 1);
        CHECK(indistinguishable(s3, a)); // order 3
        CHECK(indistinguishable(frobenius_automorphism_sigma(a, 2),
                                frobenius_automorphism_sigma(frobenius_automorphism_sigma(a, 1), 1)));
    }
}

TEST_CASE("eisenstein step: square root of 2 over Q_2") {
    auto Q2 = local_field(2, 1);
    auto E = eisenstein_step(Q2, {Q2->from_int(-2), Q2->zero(), Q2->one()});
    PadicNumber pi = E->uniformizer();
    CHECK(pi.val() == Valu(Rat(1, 2)));
    CHECK(pi.norm_str() == "2^-1/2");
    CHECK(indistinguishable(pi * pi, E->from_int(2)));
    CHECK(indistinguishable(pi * pi * pi * pi, E->from_int(4)));
    CHECK((pi + pi).val() == Valu(Rat(3, 2)));
    CHECK((pi - pi).is_zero_at_precision());

    PadicNumber ipi = pi.inv();
    CHECK(ipi.val() == Valu(Rat(-1, 2)));
    CHECK(indistinguishable(ipi * pi, E->one()));
    CHECK(indistinguishable(ipi * ipi, E->from_int(2).inv()));

    // (1+pi)(1-pi) = 1 - pi^2 = -1
    PadicNumber u = E->one() + pi;
    PadicNumber v = E->one() - pi;
    CHECK(indistinguishable(u * v, E->from_int(-1)));
    CHECK(reduce_residue(u) == E->residue_field()->one());

    // mixed arithmetic with the base field promotes into E
    PadicNumber mixed = Q2->from_int(3) + pi;
    CHECK(mixed.field() == E);
    CHECK(mixed.val() == Valu(Rat(0)));
    CHECK(indistinguishable(mixed - pi, E->from_int(3)));

    // coordinates: 1 + pi has columns [1],[1]
    auto c = integral_coords(E->one() + pi, 3);
    CHECK(c[0] == 1);
    CHECK(c[1] == 1);
    auto back = E->from_coords({cpp_int(3), cpp_int(5)});
    CHECK(back.val() == Valu(Rat(0)));
    CHECK(indistinguishable(back, E->from_int(3) + E->from_int(5) * pi));

    CHECK_THROWS_AS((void)frobenius_automorphism_sigma(pi, 1), RamifiedFieldUnsupported);
}

TEST_CASE("eisenstein step over an unramified base") {
    auto U = local_field(2, 2);
    PadicNumber t = U->theta();
    auto E = eisenstein_step(U, {U->from_int(-2) * t, U->zero(), U->one()});
    PadicNumber pi = E->uniformizer();
    CHECK(pi.val() == Valu(Rat(1, 2)));
    CHECK(indistinguishable(pi * pi, padic_embed(U->from_int(2) * t, E)));
    // theta still satisfies its modulus inside E
    std::vector<PadicNumber> f;
    for (int i = 0; i <= E->r(); ++i) f.push_back(E->from_cpp(E->modulus_lift()[i]));
    CHECK(poly_eval(f, E->theta()).is_zero_at_precision());

    // validation
    auto Q2 = local_field(2, 1);
    CHECK_THROWS_AS((void)eisenstein_step(Q2, {Q2->from_int(-4), Q2->zero(), Q2->one()}),
                    ConfigError);
    CHECK_THROWS_AS((void)eisenstein_step(Q2, {Q2->from_int(-1), Q2->zero(), Q2->one()}),
                    ConfigError);
    CHECK_THROWS_AS((void)eisenstein_step(Q2, {Q2->from_int(-2), Q2->zero(), Q2->from_int(3)}),
                    ConfigError);
    CHECK_THROWS_AS((void)eisenstein_step(Q2, {Q2->from_int(-2), Q2->one()}), ConfigError);
}

TEST_CASE("precision bookkeeping") {
    auto Q2 = local_field(2, 1);
    PadicNumber a = Q2->from_int(1234567);
    PadicNumber d = a - a;
    CHECK(d.is_zero_at_precision());
    CHECK(!d.is_exact_zero());
    CHECK_THROWS_AS((void)d.val(), PrecisionLoss);
    CHECK_THROWS_AS((void)valuation_norm(d), PrecisionLoss);
    CHECK_THROWS_AS((void)d.inv(), PrecisionLoss);
    CHECK_THROWS_AS((void)(a / d), PrecisionLoss);

    // the certified window is 32 digits for fresh integers
    PadicNumber big = Q2->from_cpp(cpp_int(1) << 31);
    PadicNumber bigger = Q2->from_cpp(cpp_int(1) << 32);
    CHECK(!indistinguishable(Q2->one() + big, Q2->one()));
    CHECK(indistinguishable(Q2->one() + bigger, Q2->one()));

    PadicNumber t = a.truncated(Rat(5));
    CHECK(t.abs_prec() == Valu(Rat(5)));
    CHECK(integral_coords(t, 5)[0] == cpp_int(1234567 % 32));
    CHECK_THROWS_AS((void)integral_coords(t, 6), PrecisionLoss);
    CHECK(a.truncated(Rat(0)).is_zero_at_precision());

    // exact zeros propagate exactly
    CHECK((a * Q2->zero()).is_exact_zero());
    CHECK((Q2->zero() + Q2->zero()).is_exact_zero());
    CHECK(indistinguishable(a + Q2->zero(), a));
}

TEST_CASE("tower embeddings are homomorphic and compatible with residues") {
    std::mt19937_64 rng(16);
    auto U2 = local_field(2, 2);
    auto U3 = local_field(2, 3);
    auto U6 = local_field(2, 6);
    for (int i = 0; i < 50; ++i) {
        PadicNumber a = random_regular(U2, rng);
        PadicNumber b = random_regular(U2, rng);
        PadicNumber ea = padic_embed(a, U6), eb = padic_embed(b, U6);
        CHECK(indistinguishable(padic_embed(a + b, U6), ea + eb));
        CHECK(indistinguishable(padic_embed(a * b, U6), ea * eb));
        CHECK(a.val() == ea.val());
        CHECK(fq_embed(reduce_residue(a), U6->residue_field()) == reduce_residue(ea));
    }
    // mixed operands land in the compositum
    PadicNumber x = random_regular(U2, rng);
    PadicNumber y = random_regular(U3, rng);
    CHECK((x + y).field() == U6);
    CHECK((x * y).field() == U6);
    // negative valuations embed too
    PadicNumber z = U2->from_int(3) / U2->from_int(4);
    CHECK(padic_embed(z, U6).val() == Valu(Rat(-2)));

    auto Q3 = local_field(3, 1);
    CHECK_THROWS_AS((void)(U2->one() + Q3->one()), IncompatibleFields);

    auto Q2 = local_field(2, 1);
    auto E1 = eisenstein_step(Q2, {Q2->from_int(-2), Q2->zero(), Q2->one()});
    auto E2 = eisenstein_step(Q2, {Q2->from_int(2), Q2->zero(), Q2->one()});
    CHECK_THROWS_AS((void)(E1->uniformizer() + E2->uniformizer()), IncompatibleFields);
    // unramified into ramified works when the residue tower allows it
    PadicNumber w = padic_embed(Q2->from_int(10), E1);
    CHECK(w.val() == Valu(Rat(1)));
    CHECK(indistinguishable(w, E1->from_int(10)));
}

TEST_CASE("residue reduction guards") {
    auto Q2 = local_field(2, 1);
    CHECK_THROWS_AS((void)reduce_residue(Q2->from_int(1) / Q2->from_int(2)), NegativeValuation);
    CHECK(reduce_residue(Q2->from_int(6)) == Q2->residue_field()->zero());
    CHECK(reduce_residue(Q2->from_int(5)) == Q2->residue_field()->one());
    CHECK(reduce_residue(Q2->zero()) == Q2->residue_field()->zero());
    PadicNumber d = Q2->from_int(7) - Q2->from_int(7);
    CHECK(reduce_residue(d) == Q2->residue_field()->zero()); // val >= 32 > 0
}

TEST_CASE("printing is deterministic and masks uncertified digits") {
    auto Q2 = local_field(2, 1);
    PadicNumber a = Q2->from_int(100) / Q2->from_int(7);
    PadicNumber b = Q2->from_int(100) / Q2->from_int(7);
    CHECK(a.str() == b.str());
    CHECK(Q2->zero().str() == "0");
    PadicNumber below = Q2->from_int(3) - Q2->from_int(3);
    CHECK(below.str() == "O(2^32)");
}
