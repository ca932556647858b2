#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padiclab/errors.hpp"
#include "padiclab/fq.hpp"
#include "padiclab/poly.hpp"

namespace padiclab {

/// Exponents of the variable t live in Z[1/p]: arbitrary-precision rationals
/// whose denominators are validated to be p-powers at the construction edges.
using BigRat = boost::multiprecision::cpp_rational;

bool is_p_power_denominator(const BigRat& e, long long p);

struct TiltTerm {
    BigRat exp;
    FqElement coeff;
};

/// Truncated element of the characteristic-p perfectoid field: a finite
/// ascending sum of coeff*t^exp with exponents in Z[1/p] and coefficients in
/// a finite field, plus a cutoff below which the terms are certified.  Terms
/// at or beyond the cutoff are unknown.  No terms with a finite cutoff means
/// "zero at this precision"; no terms with an infinite cutoff is exact zero.
/// The norm is p^(-leading exponent), so |t| = 1/p.
class TiltElement {
  public:
    TiltElement() = default;

    const FqFieldPtr& field() const { return field_; }
    const std::vector<TiltTerm>& terms() const { return terms_; }
    bool cutoff_infinite() const { return !cutoff_.has_value(); }
    const BigRat& cutoff() const; // throws on infinite cutoff
    bool is_exact_zero() const { return terms_.empty() && !cutoff_.has_value(); }
    bool is_zero_at_precision() const { return terms_.empty(); }

    /// Leading exponent e_0 (the valuation); raises PrecisionLoss when no
    /// term is known below a finite cutoff and ZeroVector on exact zero
    /// (whose valuation is not a rational number).
    BigRat val() const;
    /// Exact norm string "p^-e" / "1" / "0"; "O(p^-c)" below precision.
    std::string norm_str() const;

    TiltElement operator-() const;
    friend TiltElement operator+(const TiltElement& a, const TiltElement& b);
    friend TiltElement operator-(const TiltElement& a, const TiltElement& b);
    friend TiltElement operator*(const TiltElement& a, const TiltElement& b);
    friend TiltElement operator/(const TiltElement& a, const TiltElement& b);
    TiltElement inv() const;
    TiltElement pow(std::uint64_t n) const;

    /// Coefficient-wise scaling, exponents untouched.
    TiltElement scaled(const FqElement& c) const;
    /// Multiplication by the exact monomial t^d: exponents and cutoff shift.
    TiltElement shifted(const BigRat& d) const;
    /// Drop terms at or beyond E and lower the cutoff to at most E.
    TiltElement truncated(const BigRat& E) const;

    std::string str() const;

  private:
    friend TiltElement tilt_make(FqFieldPtr field, std::vector<TiltTerm> terms,
                                 std::optional<BigRat> cutoff);
    FqFieldPtr field_;
    std::vector<TiltTerm> terms_;
    std::optional<BigRat> cutoff_;
};

/// Normalizing factory: sorts, merges equal exponents, drops zeros and terms
/// beyond the cutoff, validates p-power denominators and coefficient fields.
TiltElement tilt_make(FqFieldPtr field, std::vector<TiltTerm> terms,
                      std::optional<BigRat> cutoff = std::nullopt);

TiltElement tilt_zero(const FqFieldPtr& field);
TiltElement tilt_one(const FqFieldPtr& field);
/// coeff * t^exp, exact (infinite cutoff) by default.
TiltElement tilt_monomial(const FqElement& coeff, const BigRat& exp,
                          std::optional<BigRat> cutoff = std::nullopt);
TiltElement tilt_from_residue(const FqElement& c);
TiltElement tilt_t(const FqFieldPtr& field);

/// The tilt-side Frobenius power: exponents scale by p^s, coefficients by the
/// s-fold p-power map.  Negative s is the exact inverse; both directions are
/// ring isomorphisms on represented data.
TiltElement tilt_frobenius(const TiltElement& a, long long s);

/// Reduction of an integral element to the residue field: the coefficient of
/// t^0.  Raises NegativeValuation on terms with negative exponent and
/// PrecisionLoss when the cutoff does not certify the t^0 coefficient.
FqElement tilt_reduce(const TiltElement& a);

/// True when a - b has no known terms (equal at the shared precision).
bool indistinguishable(const TiltElement& a, const TiltElement& b);

// scalar traits so Poly<TiltElement> works
inline bool scalar_is_exact_zero(const TiltElement& a) { return a.is_exact_zero(); }
inline bool scalar_is_zero_at_precision(const TiltElement& a) {
    return a.is_zero_at_precision();
}
inline bool scalar_eq(const TiltElement& a, const TiltElement& b) {
    return indistinguishable(a, b);
}
inline TiltElement scalar_zero_like(const TiltElement& s) { return tilt_zero(s.field()); }
inline TiltElement scalar_one_like(const TiltElement& s) { return tilt_one(s.field()); }
inline TiltElement scalar_from_int_like(const TiltElement& s, long long n) {
    return tilt_from_residue(s.field()->from_int(n));
}
inline TiltElement scalar_sigma(const TiltElement& a, long long s) {
    return tilt_frobenius(a, s);
}

/// Gauss valuation of a polynomial with tilt coefficients: min over the
/// coefficient valuations.  PrecisionLoss when a below-precision coefficient
/// could undercut every certified one; the lower-bound variant never raises.
BigRat tilt_gauss_val(const Poly<TiltElement>& P); // throws ZeroVector on 0
BigRat tilt_gauss_val_lower_bound(const Poly<TiltElement>& P); // throws ZeroVector on exact 0

/// Lift a residue-coefficient polynomial to exact tilt coefficients.
inline Poly<TiltElement> tilt_poly_of_residue(const Poly<FqElement>& P) {
    Poly<TiltElement> out(P.nvars());
    for (const auto& [m, c] : P.terms()) out.add_term(m, tilt_from_residue(c));
    return out;
}

struct EisensteinSplit {
    TiltElement u;                    // t^(1/e')
    long long common_denominator;     // e'
    long long m;                      // largest power with |u|^m >= p^-eps_val
    std::vector<Poly<FqElement>> g;   // g_0 .. g_m, residue-field coefficients
    std::optional<BigRat> residual_val; // valuation of the dropped tail, if any
};

/// Regroup a polynomial with integral tilt coefficients sharing the exponent
/// denominator e' as sum_{i=0..m} u^i g_i with u = t^(1/e') and finite-field
/// g_i, where m = floor(eps_val * e').  The dropped tail has Gauss valuation
/// strictly above eps_val, so its norm is < p^-eps_val.
EisensteinSplit eisenstein_split(const Poly<TiltElement>& G, const BigRat& eps_val);

} // namespace padiclab
