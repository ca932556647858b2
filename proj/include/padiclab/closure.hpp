#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "padiclab/fq.hpp"
#include "padiclab/poly.hpp"
#include "padiclab/proj.hpp"
#include "padiclab/tilt.hpp"

namespace padiclab {

/// Basis of a bounded-degree vanishing ideal slice over a finite coefficient
/// field.  The basis is held in reduced row echelon form with respect to
/// graded-lex monomial order (leading coefficients one, each leading monomial
/// absent from every other row), and echelon form is unique per span, so
/// equal ideals carry identical bases.
struct IdealBasis {
    int d = 0;          // degree bound of the slice
    int N = 0;          // ambient affine dimension
    FqFieldPtr coeff_field;
    std::vector<Poly<FqElement>> basis; // echelon rows, leading monomial descending

    // rank-nullity bookkeeping of the elimination, counted over F_p: the
    // kernel is a coeff_field-subspace, so both numbers carry the factor r
    long long fp_rank = 0;
    long long fp_kernel_dim = 0;

    /// Coefficient field header line followed by one polynomial per line.
    std::vector<std::string> str_lines() const;
};

/// All monomials of total degree <= d in N variables, graded-lex descending
/// (the column order of every elimination here).  The count is C(N+d, d);
/// counts above `cap` raise ResourceLimit.
std::vector<Mono> monomials_upto_degree(int N, int d, std::uint64_t cap = 1u << 14);

/// Coefficient twist: every coefficient raised to the p^m-th power, exactly
/// inverted for negative m.  Pairs with root extraction on points: for a
/// residue point y and q = p^(s),
///     f(y^(1/q^i)) = sigma_twist(f, s*i)(y)^(1/q^i),
/// which is the identity the stability notion below rests on.
Poly<FqElement> sigma_twist(const Poly<FqElement>& f, long long m);

/// Basis of {f in K[x_1..x_N] : deg f <= d, f(P) = 0 for every point}: the
/// kernel of the monomial evaluation matrix.  The system is expanded over
/// the F_p coordinates of K (unknowns ordered monomial major, basis
/// coordinate minor) and eliminated to reduced echelon form; the kernel is a
/// K-subspace, so it is re-echelonized over K into the canonical basis.
/// Points may live in subfields of K.  Points must be nonempty and share
/// arity (ConfigError); the monomial cap raises ResourceLimit.
IdealBasis vanishing_ideal_upto_degree(const std::vector<std::vector<FqElement>>& points,
                                       int d, const FqFieldPtr& K,
                                       std::uint64_t cap = 1u << 14);

/// True when f (over coeff_field or a subfield, degree <= I.d, same arity)
/// lies in the span of the basis: linear reduction against the echelon rows
/// leaves zero.  This is membership in the degree-bounded slice, not full
/// ideal membership.
bool in_span(const IdealBasis& I, const Poly<FqElement>& f);

struct StabilityReport {
    bool stable = false; // the span recurs within the searched bound
    long long r = 0;     // least r >= 1 with the twist by p^(s*r) preserving it
};

/// Least r <= r_bound such that the coefficient twist by p^(s*r) maps the
/// span of I onto itself, i.e. the zero set is fixed by that power of the
/// arithmetic Frobenius.  Twisted and original bases are mutually reduced by
/// comparing canonical echelon forms.  Some r always works: the twist by the
/// coefficient field's own degree is the identity.
StabilityReport frobenius_stability_check(const IdealBasis& I, long long s,
                                          long long r_bound = 64);

struct ClosureReport {
    IdealBasis ideal;
    StabilityReport stability;
    long long residue_period = 1; // least n >= 1 with the sample tuple recurring
    bool saturated = false;       // one more period of samples left the ideal unchanged
};

/// Residue-level closure of the root orbit {w^(1/q^n)}, q = p^s: reduce w in
/// the affine chart, apply the inverse q-power Frobenius n_samples times,
/// and return the bounded-degree vanishing ideal of the sample together with
/// its Frobenius stability and sample-saturation report.  The point must be
/// integral in the chart: a zero chart coordinate raises ConfigError on the
/// residue overload; on the tilt overload the chart division surfaces
/// naturally (NegativeValuation / DivisionByZero / PrecisionLoss).
ClosureReport closure_of_root_orbit(const ProjPoint<FqElement>& w, int chart, long long s,
                                    int d, int n_samples, std::uint64_t cap = 1u << 14);
ClosureReport closure_of_root_orbit(const ProjPoint<TiltElement>& w, int chart, long long s,
                                    int d, int n_samples, std::uint64_t cap = 1u << 14);

} // namespace padiclab
