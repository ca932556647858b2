#pragma once

#include <string>
#include <vector>

#include "padiclab/lift.hpp"
#include "padiclab/tilt.hpp"

namespace padiclab {

/// A finite stretch b_0, b_1, ..., b_D of a backward orbit: F(b_i) = b_{i-1}
/// certified at the shared precision for every link.  The residue sequence is
/// then automatically the inverse-Frobenius orbit of red(b_0), and the pivot
/// chart never changes along the stretch (residue supports are stable under
/// the q-power map).
class CoherentOrbit {
  public:
    /// Validates arity and every link; rejects with ConfigError otherwise.
    CoherentOrbit(FrobeniusLift F, std::vector<ProjPoint<PadicNumber>> points);

    const FrobeniusLift& map() const { return F_; }
    const std::vector<ProjPoint<PadicNumber>>& points() const { return pts_; }
    /// D: the number of backward steps the stretch witnesses.
    long long depth() const { return static_cast<long long>(pts_.size()) - 1; }

  private:
    FrobeniusLift F_;
    std::vector<ProjPoint<PadicNumber>> pts_;
};

/// A point with tilt-side coordinates: truncated t-series over the residue
/// field, normalized so the pivot is an exact 1 and every norm is at most 1.
using TiltPoint = ProjPoint<TiltElement>;

/// The tilt of a coherent orbit, coordinate by coordinate in the shared
/// pivot chart.  The level-0 sharp sequence z(b_m)^(q^m) stabilizes one
/// p-digit per p-power, so depth D certifies the limit mod p^(s*D + 1); two
/// digits are kept as a guard and the rest is re-read through the digit
/// identification mod p = mod t as a t-series with exponents in (1/e)Z.
/// The certified cutoff is recorded on every coordinate.
///
/// Orbits that stay in a declared field always tilt to constant series (the
/// residue embedding of red(b_0)); the computation takes the limit honestly
/// and the constancy is a checked outcome, not an assumption.
///
/// Raises ChartInstability if the points do not share a pivot (impossible
/// for orbits built through the validating constructor, kept as a guard) and
/// DepthInsufficient when s*D + 1 - 2 < 1, i.e. not even the residue digit
/// of the limit is certified.
TiltPoint tilt_of_orbit(const CoherentOrbit& orbit);

/// [red(b_0), ..., red(b_D)]: the inverse-Frobenius orbit of red(b_0).
std::vector<ProjPoint<FqElement>> residue_orbit(const CoherentOrbit& orbit);

/// The canonical coherent orbit through a periodic point: walks forward to
/// find the least period n <= period_bound (NotPeriodic otherwise) and reads
/// the backward orbit off the cycle, b_i = F^((n - i mod n) mod n)(x).
CoherentOrbit periodic_orbit_of(const FrobeniusLift& F, const ProjPoint<PadicNumber>& x,
                                long long depth, long long period_bound = 12);

/// Outcome of the shift/Frobenius equivariance audit.
struct ConjugacyReport {
    bool clean = false;              // every coordinate agreed below the cutoff
    BigRat cutoff;                   // t-exponent both sides were compared to
    std::string max_discrepancy_norm;
};

/// Audits the tilt equivariance on the orbit's own data: prepending F(b_0)
/// shifts the orbit forward, and its tilt must equal the q-power Frobenius
/// of the original tilt.  Reports the worst coordinate discrepancy at the
/// common cutoff.  DepthInsufficient below depth 2.
ConjugacyReport conjugacy_audit(const CoherentOrbit& orbit);

} // namespace padiclab
