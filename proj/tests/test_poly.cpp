#include "doctest.h"

#include <optional>
#include <random>

#include "padiclab/poly.hpp"

using namespace padiclab;

namespace {

template <class S>
std::optional<S> coeff_of(const Poly<S>& P, const Mono& m) {
    auto it = P.terms().find(m);
    if (it == P.terms().end()) return std::nullopt;
    return it->second;
}

Poly<FqElement> random_fq_poly(const FqFieldPtr& F, int nvars, int max_deg, int nterms,
                               std::mt19937_64& rng) {
    Poly<FqElement> P(nvars);
    std::uint64_t q = 1;
    for (int i = 0; i < F->r(); ++i) q *= std::uint64_t(F->p());
    for (int t = 0; t < nterms; ++t) {
        Mono m(nvars);
        for (int i = 0; i < nvars; ++i) m[i] = int(rng() % std::uint64_t(max_deg + 1));
        P.add_term(std::move(m), F->element_at(rng() % q));
    }
    return P;
}

Poly<PadicNumber> random_padic_poly(const LocalFieldPtr& F, int nvars, int max_deg,
                                    int nterms, std::mt19937_64& rng) {
    Poly<PadicNumber> P(nvars);
    for (int t = 0; t < nterms; ++t) {
        Mono m(nvars);
        for (int i = 0; i < nvars; ++i) m[i] = int(rng() % std::uint64_t(max_deg + 1));
        P.add_term(std::move(m), F->from_int((long long)(rng() % 200) - 100));
    }
    return P;
}

} // namespace

TEST_CASE("graded lexicographic term order") {
    auto F = fq_field(3, 1);
    // descending: x0^2, x0*x1, x1^2, x0, x1, 1
    std::vector<Mono> expect = {{2, 0}, {1, 1}, {0, 2}, {1, 0}, {0, 1}, {0, 0}};
    Poly<FqElement> P(2);
    // insert shuffled
    for (const Mono& m : {expect[3], expect[0], expect[5], expect[1], expect[4], expect[2]})
        P.add_term(m, F->one());
    std::vector<Mono> got;
    for (const auto& [m, c] : P.terms()) got.push_back(m);
    CHECK(got == expect);
    CHECK(P.leading().first == Mono{2, 0});
    CHECK(P.degree() == 2);

    MonoGreater lt;
    CHECK(lt(Mono{1, 1}, Mono{0, 2}));  // same degree, lex
    CHECK(lt(Mono{0, 2}, Mono{1, 0}));  // degree dominates
    CHECK(!lt(Mono{0, 0}, Mono{0, 0}));
}

TEST_CASE("parser: terms, coefficients, and rejections") {
    auto Q5 = local_field(5, 1);
    auto P = parse_poly(Q5, 3, "x0^2*x1 - 3*x2^3 + 7");
    CHECK(P.nvars() == 3);
    std::vector<Mono> order;
    for (const auto& [m, c] : P.terms()) order.push_back(m);
    CHECK(order == std::vector<Mono>{{2, 1, 0}, {0, 0, 3}, {0, 0, 0}});
    std::vector<PadicNumber> one111 = {Q5->one(), Q5->one(), Q5->one()};
    CHECK(P.eval(one111).val() == Valu(1)); // 1 - 3 + 7 = 5

    auto F5 = fq_field(5, 1);
    auto Pf = parse_poly(F5, 3, "x0^2*x1 - 3*x2^3 + 7");
    std::vector<FqElement> ones = {F5->one(), F5->one(), F5->one()};
    CHECK(Pf.eval(ones).is_zero());

    // integer factors multiply into the coefficient
    auto Q2 = local_field(2, 1);
    auto P2 = parse_poly(Q2, 2, "2*x0*3 - x1");
    CHECK(indistinguishable(*coeff_of(P2, {1, 0}), Q2->from_int(6)));
    CHECK(indistinguishable(*coeff_of(P2, {0, 1}), Q2->from_int(-1)));

    // repeated variables accumulate exponents
    auto P3 = parse_poly(Q2, 1, "x0*x0^2");
    CHECK(P3.leading().first == Mono{3});

    CHECK_THROWS_AS(parse_poly(Q2, 3, "x3"), ConfigError);
    CHECK_THROWS_AS(parse_poly(Q2, 2, "x0^"), ConfigError);
    CHECK_THROWS_AS(parse_poly(Q2, 2, ""), ConfigError);
    CHECK_THROWS_AS(parse_poly(Q2, 2, "+x0"), ConfigError);
    CHECK_THROWS_AS(parse_poly(Q2, 2, "x0 x1"), ConfigError);
    CHECK_THROWS_AS(parse_poly(Q2, 2, "x0 - - x1"), ConfigError);
}

TEST_CASE("ring arithmetic and cancellation") {
    auto Q3 = local_field(3, 1);
    auto A = parse_poly(Q3, 2, "x0 + x1");
    CHECK(poly_equal(A * A, parse_poly(Q3, 2, "x0^2 + 2*x0*x1 + x1^2")));

    // characteristic 2 drops the cross term outright
    auto F2 = fq_field(2, 1);
    auto Af = parse_poly(F2, 2, "x0 + x1");
    auto sq = Af * Af;
    CHECK(sq.terms().size() == 2);
    CHECK(poly_equal(sq, parse_poly(F2, 2, "x0^2 + x1^2")));

    // p-adic cancellation is honest: zero at precision, never certified exact
    auto D = A - A;
    CHECK(!D.is_exact_zero());
    CHECK(D.is_zero_at_precision());
    // finite-field cancellation is exact and empties the term map
    CHECK((Af - Af).is_exact_zero());

    std::mt19937_64 rng(411);
    auto F9 = fq_field(3, 2);
    for (int it = 0; it < 50; ++it) {
        auto X = random_fq_poly(F9, 2, 3, 4, rng);
        auto Y = random_fq_poly(F9, 2, 3, 4, rng);
        auto Z = random_fq_poly(F9, 2, 3, 4, rng);
        CHECK(poly_equal((X + Y) * Z, X * Z + Y * Z));
        CHECK(poly_equal(X * Y, Y * X));
    }
    for (int it = 0; it < 25; ++it) {
        auto X = random_padic_poly(Q3, 2, 3, 4, rng);
        auto Y = random_padic_poly(Q3, 2, 3, 4, rng);
        auto Z = random_padic_poly(Q3, 2, 3, 4, rng);
        CHECK(poly_equal((X + Y) * Z, X * Z + Y * Z));
    }
}

TEST_CASE("homogeneity and scaling") {
    auto Q2 = local_field(2, 1);
    auto H = parse_poly(Q2, 2, "x0^3 - 2*x0*x1^2 + x1^3");
    CHECK(H.is_homogeneous());
    CHECK(H.homogeneous_degree() == 3);

    std::mt19937_64 rng(77);
    for (int it = 0; it < 20; ++it) {
        auto lam = Q2->from_int(2 * (long long)(rng() % 50) + 1); // odd unit
        auto a = Q2->from_int((long long)(rng() % 100) - 50);
        auto b = Q2->from_int((long long)(rng() % 100) - 50);
        auto lhs = H.eval({lam * a, lam * b});
        auto rhs = lam.pow(3) * H.eval({a, b});
        CHECK(indistinguishable(lhs, rhs));
    }

    auto G = parse_poly(Q2, 2, "x0^2 + x1");
    CHECK(!G.is_homogeneous());
    CHECK_THROWS_AS(G.homogeneous_degree(), InvalidDegree);
}

TEST_CASE("composition with map components") {
    auto Q2 = local_field(2, 1);
    std::vector<Poly<PadicNumber>> Fsq = {parse_poly(Q2, 2, "x0^2"),
                                          parse_poly(Q2, 2, "x1^2")};
    auto H = parse_poly(Q2, 2, "x0 - x1");
    auto HF = compose_endo(H, Fsq);
    CHECK(poly_equal(HF, parse_poly(Q2, 2, "x0^2 - x1^2")));
    CHECK(poly_equal(compose_endo(HF, Fsq), parse_poly(Q2, 2, "x0^4 - x1^4")));
    CHECK(compose_endo(HF, Fsq).homogeneous_degree() == 4);

    std::vector<Poly<PadicNumber>> Fpert = {parse_poly(Q2, 2, "x0^2 + 2*x0*x1"),
                                            parse_poly(Q2, 2, "x1^2")};
    CHECK(poly_equal(compose_endo(H, Fpert),
                     parse_poly(Q2, 2, "x0^2 + 2*x0*x1 - x1^2")));

    // evaluation compatibility at random points
    std::mt19937_64 rng(909);
    auto F4 = fq_field(2, 2);
    std::vector<Poly<FqElement>> Gf = {parse_poly(F4, 2, "x0^2 + x0*x1"),
                                       parse_poly(F4, 2, "x1^2")};
    auto Hf = random_fq_poly(F4, 2, 3, 4, rng);
    for (int it = 0; it < 40; ++it) {
        std::vector<FqElement> x = {F4->element_at(rng() % 4), F4->element_at(rng() % 4)};
        auto direct = compose_endo(Hf, Gf).eval(x);
        auto via = Hf.eval({Gf[0].eval(x), Gf[1].eval(x)});
        CHECK(direct == via);
    }
}

TEST_CASE("exact division: witnesses and refusals") {
    auto Q5 = local_field(5, 1);
    auto q1 = exact_divide(parse_poly(Q5, 2, "x0^2 - x1^2"), parse_poly(Q5, 2, "x0 - x1"));
    REQUIRE(q1.has_value());
    CHECK(poly_equal(*q1, parse_poly(Q5, 2, "x0 + x1")));

    // the conic under coordinate squaring: quotient has the sign flipped
    auto Q2 = local_field(2, 1);
    auto H = parse_poly(Q2, 3, "x0*x2 - x1^2");
    std::vector<Poly<PadicNumber>> Fsq = {parse_poly(Q2, 3, "x0^2"),
                                          parse_poly(Q2, 3, "x1^2"),
                                          parse_poly(Q2, 3, "x2^2")};
    auto HF = compose_endo(H, Fsq); // x0^2*x2^2 - x1^4
    auto q2 = exact_divide(HF, H);
    REQUIRE(q2.has_value());
    CHECK(poly_equal(*q2, parse_poly(Q2, 3, "x0*x2 + x1^2")));

    // x0^2 + x1^2 is not a multiple of x0 - x1 away from characteristic 2 ...
    auto Q3 = local_field(3, 1);
    CHECK(!exact_divide(parse_poly(Q3, 2, "x0^2 + x1^2"),
                        parse_poly(Q3, 2, "x0 - x1")).has_value());
    // ... but is one in characteristic 2
    auto F2 = fq_field(2, 1);
    auto q3 = exact_divide(parse_poly(F2, 2, "x0^2 + x1^2"), parse_poly(F2, 2, "x0 - x1"));
    REQUIRE(q3.has_value());
    CHECK(poly_equal(*q3, parse_poly(F2, 2, "x0 + x1")));

    std::mt19937_64 rng(5150);
    auto F9 = fq_field(3, 2);
    int done = 0;
    while (done < 30) {
        auto A = random_fq_poly(F9, 2, 2, 3, rng);
        auto B = random_fq_poly(F9, 2, 2, 3, rng);
        if (B.is_exact_zero()) continue;
        auto q = exact_divide(A * B, B);
        REQUIRE(q.has_value());
        CHECK(poly_equal(*q, A));
        ++done;
    }
    done = 0;
    while (done < 15) {
        auto A = random_padic_poly(Q2, 2, 2, 3, rng);
        auto B = random_padic_poly(Q2, 2, 2, 3, rng);
        if (B.is_exact_zero()) continue;
        auto q = exact_divide(A * B, B);
        REQUIRE(q.has_value());
        CHECK(poly_equal(*q, A));
        ++done;
    }

    CHECK_THROWS_AS(exact_divide(H, Poly<PadicNumber>(3)), DivisionByZero);
    auto zq = exact_divide(Poly<PadicNumber>(3), H);
    REQUIRE(zq.has_value());
    CHECK(zq->is_exact_zero());
}

TEST_CASE("dehomogenization and derivatives") {
    auto Q5 = local_field(5, 1);
    auto P = parse_poly(Q5, 2, "x0^2*x1 - x1^3");
    auto c1 = dehomogenize(P, 1);
    CHECK(c1.nvars() == 1);
    CHECK(poly_equal(c1, parse_poly(Q5, 1, "x0^2 - 1")));
    auto c0 = dehomogenize(P, 0);
    CHECK(poly_equal(c0, parse_poly(Q5, 1, "x0 - x0^3"))); // x1 renamed to x0

    auto D = poly_derivative_var(parse_poly(Q5, 2, "x0^3*x1 + x0"), 0);
    CHECK(poly_equal(D, parse_poly(Q5, 2, "3*x0^2*x1 + 1")));

    // characteristic kills matching exponents
    auto F3 = fq_field(3, 1);
    CHECK(poly_derivative_var(parse_poly(F3, 1, "x0^3"), 0).is_exact_zero());
    CHECK_THROWS_AS(poly_derivative_var(D, 5), InvalidDegree);
}

TEST_CASE("coefficient frobenius twist") {
    auto U = local_field(2, 2); // unramified quadratic over Q_2
    Poly<PadicNumber> P(2);
    P.add_term({1, 0}, U->theta(1));
    P.add_term({0, 1}, U->from_int(3));
    auto Ps = poly_sigma(P, 1);
    CHECK(indistinguishable(*coeff_of(Ps, {1, 0}),
                            frobenius_automorphism_sigma(U->theta(1), 1)));
    CHECK(indistinguishable(*coeff_of(Ps, {0, 1}), U->from_int(3)));
    CHECK(poly_equal(poly_sigma(Ps, 1), P));   // order two
    CHECK(poly_equal(poly_sigma(P, -1), Ps));  // inverse equals the other power

    auto F4 = fq_field(2, 2);
    Poly<FqElement> Pf(1);
    Pf.add_term({1}, F4->gen());
    auto Pfs = poly_sigma(Pf, 1);
    CHECK(*coeff_of(Pfs, {1}) == F4->gen().pow(2));
    CHECK(poly_equal(poly_sigma(Pfs, -1), Pf));
}

TEST_CASE("residue reduction of integral polynomials") {
    auto Q2 = local_field(2, 1);
    auto F2 = fq_field(2, 1);
    auto P = parse_poly(Q2, 2, "2*x0^2 + 3*x0*x1");
    auto Pbar = reduce_poly(P);
    CHECK(Pbar.terms().size() == 1); // the even coefficient vanishes
    CHECK(poly_equal(Pbar, parse_poly(F2, 2, "x0*x1")));

    Poly<PadicNumber> bad(1);
    bad.add_term({1}, Q2->one() / Q2->from_int(2));
    CHECK_THROWS_AS(reduce_poly(bad), NegativeValuation);
}

TEST_CASE("gauss valuation and normalization") {
    auto Q2 = local_field(2, 1);
    auto P = parse_poly(Q2, 2, "4*x0^2 + 6*x1^2");
    CHECK(gauss_val(P) == Valu(1));
    CHECK(gauss_val_lower_bound(P) == Valu(1));
    auto N = gauss_normalize(P);
    CHECK(gauss_val(N) == Valu(0));
    CHECK(indistinguishable(*coeff_of(N, {0, 2}), Q2->one()));
    CHECK(indistinguishable(*coeff_of(N, {2, 0}), Q2->from_int(4) / Q2->from_int(6)));

    // tie on valuation: the graded-lex-first minimal coefficient wins
    auto T = parse_poly(Q2, 2, "2*x0 + 6*x1");
    auto NT = gauss_normalize(T);
    CHECK(indistinguishable(*coeff_of(NT, {1, 0}), Q2->one()));
    CHECK(indistinguishable(*coeff_of(NT, {0, 1}), Q2->from_int(3)));

    Poly<PadicNumber> Z(2);
    CHECK(gauss_val(Z).is_infinite());
    CHECK_THROWS_AS(gauss_normalize(Z), ZeroVector);

    // sub-precision coefficients poison the valuation unless dominated
    auto a = Q2->from_int(7);
    Poly<PadicNumber> fog(1);
    fog.add_term({1}, a - a); // below precision, bound 32
    CHECK_THROWS_AS(gauss_val(fog), PrecisionLoss);
    CHECK(gauss_val_lower_bound(fog) == Valu(32));
    fog.add_term({0}, Q2->from_int(2));
    CHECK(gauss_val(fog) == Valu(1)); // dominated by a certified coefficient
}

TEST_CASE("arity mismatches are rejected") {
    auto Q2 = local_field(2, 1);
    auto A = parse_poly(Q2, 2, "x0 + x1");
    auto B = parse_poly(Q2, 3, "x0 + x2");
    CHECK_THROWS_AS(A + B, InvalidDegree);
    CHECK_THROWS_AS(A * B, InvalidDegree);
    CHECK_THROWS_AS(A.eval({Q2->one()}), InvalidDegree);
    CHECK_THROWS_AS(compose_endo(A, {B}), InvalidDegree);
    CHECK_THROWS_AS(dehomogenize(A, 2), InvalidDegree);
}
