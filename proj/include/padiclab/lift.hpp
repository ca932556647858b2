#pragma once

#include <optional>
#include <string>
#include <vector>

#include "padiclab/padic.hpp"
#include "padiclab/poly.hpp"
#include "padiclab/proj.hpp"

namespace padiclab {

/// A lift of the q-power Frobenius on P^N: component i is x_i^q + p * P_i
/// where every perturbation P_i is homogeneous of degree q = p^s with
/// integral coefficients (or the zero polynomial).  Reduction mod p is then
/// exactly the coordinate-wise q-power map, which makes every residue disk
/// attracting: the derivative of any component has valuation >= 1
/// everywhere, so one application of the map gains at least one certified
/// digit toward the unique periodic point of the disk.
class FrobeniusLift {
  public:
    /// `perturbations` holds P_0..P_N, each in N+1 variables.  Rejects
    /// degree != q (InvalidDegree), a coefficient with val < 0
    /// (NonIntegralCoefficient), arity mismatches and s < 1 (ConfigError).
    FrobeniusLift(LocalFieldPtr field, long long s, std::vector<Poly<PadicNumber>> perturbations);

    const LocalFieldPtr& field() const { return field_; }
    long long s() const { return s_; }
    long long q() const { return q_; }
    int dim() const { return N_; }
    const std::vector<Poly<PadicNumber>>& perturbations() const { return pert_; }
    /// The assembled components x_i^q + p * P_i.
    const std::vector<Poly<PadicNumber>>& components() const { return comps_; }

    /// True when the base field is unramified and every perturbation
    /// coefficient is fixed by sigma to its certified precision, i.e. the
    /// map commutes with the arithmetic Frobenius as far as we can tell.
    bool sigma_compatible() const { return sigma_ok_; }

    std::string str() const;

  private:
    LocalFieldPtr field_;
    long long s_ = 1;
    long long q_ = 0;
    int N_ = 0;
    std::vector<Poly<PadicNumber>> pert_;
    std::vector<Poly<PadicNumber>> comps_;
    bool sigma_ok_ = false;
};

/// Normalized n-th forward image of x.  n = 0 returns x unchanged.
ProjPoint<PadicNumber> apply(const FrobeniusLift& F, const ProjPoint<PadicNumber>& x,
                             long long n = 1);

/// The map in the affine chart x_i = 1, coordinate j, as z_j^q + p * Q with
/// Q returned here: expanding F_j / F_i by the geometric series of
/// 1 / (1 + p * P_i(..,1,..)) and keeping everything modulo p^M.  The
/// result is a polynomial in the N chart variables z_0..z_{N-1} (variable t
/// of the chart is x_t for t < i, x_{t+1} for t >= i), every coefficient
/// integral and truncated to certified precision M.
Poly<PadicNumber> chart_series(const FrobeniusLift& F, int i, int j, long long M);

/// The unique periodic point in the residue disk of y, computed by iterating
/// F^m (m = the field of definition of y over F_q) on the Teichmueller lift
/// of y until the representation is fixed, at most M iterations.  Each
/// iteration of F^m gains at least m digits, so M iterations certify the
/// point mod p^M at the very least; if the last comparison still moved,
/// that contradicts the attraction bound and NonConvergence is raised.
ProjPoint<PadicNumber> periodic_point_in_disk(const FrobeniusLift& F,
                                              const ProjPoint<FqElement>& y, long long M);

struct PeriodicEntry {
    ProjPoint<FqElement> residue;
    ProjPoint<PadicNumber> point;
    int period = 1; // exact period divisor: the field of definition of the residue
};

/// One periodic point per residue point of P^N(F_{q^m}), paired with its
/// residue and exact period.  The census size is (q^{m(N+1)} - 1)/(q^m - 1);
/// counts above `cap` raise ResourceLimit before any lifting starts.
std::vector<PeriodicEntry> enumerate_periodic(const FrobeniusLift& F, int m, long long M,
                                              std::uint64_t cap = 1u << 20);

struct GaloisCheck {
    bool periodic = false;    // F(x) and sigma(x) agree at certified precision
    Valu discrepancy;         // val lower bound of the largest disagreeing coordinate
    int witness_coord = -1;   // coordinate attaining it, -1 when periodic
};

/// Tests F(x) = sigma(x) after canonical normalization of both sides; this
/// characterizes membership in the closure of the periodic points.  Needs an
/// unramified field (RamifiedFieldUnsupported) and sigma-compatible map
/// coefficients (SigmaInapplicable).
GaloisCheck galois_periodicity_check(const FrobeniusLift& F, const ProjPoint<PadicNumber>& x);

/// All preimages of b under F inside b's declared field, certified mod p^M,
/// canonical branch first.  Preimages share b's pivot chart, and their
/// common residue is the inverse Frobenius of red(b); the remaining digits
/// are found level by level from additive-polynomial equations solved as
/// F_p-linear systems, branching on the solution set.  When every branch
/// dies the point has no preimage over the field and ExtensionRequired is
/// raised carrying the first obstructed digit index.  More than
/// `branch_cap` simultaneously live branches raises ResourceLimit.
std::vector<ProjPoint<PadicNumber>> backward_step(const FrobeniusLift& F,
                                                  const ProjPoint<PadicNumber>& b, long long M,
                                                  std::size_t branch_cap = 4096);

struct InvarianceResult {
    bool invariant = false;
    long long l = 0;                      // least l with H o F^l divisible by H
    Poly<PadicNumber> quotient;           // the certified quotient when invariant
    std::optional<std::string> witness_point;  // a point on V(H) leaving V(H)
    std::optional<PadicNumber> witness_value;  // H(F^l(witness)), nonzero
};

/// Total invariance test for the hypersurface H = 0: searches the least
/// l <= l_bound with H o F^l = H * (certified quotient).  When no l works,
/// reports NotInvariant together with an evaluation witness when one exists
/// among Teichmueller lifts of residue points of the hypersurface (a point
/// where H vanishes but H o F^l does not).
InvarianceResult invariance_check_hypersurface(const FrobeniusLift& F,
                                               const Poly<PadicNumber>& H, long long l_bound = 6);

} // namespace padiclab
