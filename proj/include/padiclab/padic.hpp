#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <string>
#include <vector>

#include "padiclab/fq.hpp"
#include "padiclab/rat.hpp"

namespace padiclab {

using cpp_int = boost::multiprecision::cpp_int;

class LocalField;
using LocalFieldPtr = std::shared_ptr<const LocalField>;

/// Coordinates of an element of the unramified part: the coefficient vector
/// over the power basis of the residue generator's lift, entries reduced
/// modulo p^P for the field's storage window P.
using UVec = std::vector<cpp_int>;

/// Element of a p-adic field (Q_p, an unramified extension U of degree r, or
/// one Eisenstein step E/U of degree e), with exact rational valuation and a
/// tracked absolute precision: the element is known modulo valuation >=
/// abs_prec.  Stored as pi^shift * unit, where the unit's pi-adic columns
/// hold UVec coordinates.  Digits beyond the certified precision are
/// deterministic but carry no meaning; comparisons and printing mask them.
class PadicNumber {
  public:
    enum class State { kExactZero, kBelowPrecision, kRegular };

    PadicNumber() = default;

    const LocalFieldPtr& field() const { return field_; }
    State state() const { return state_; }
    bool is_exact_zero() const { return state_ == State::kExactZero; }
    /// True for exact zeros and for values whose digits all vanish within the
    /// certified window.
    bool is_zero_at_precision() const { return state_ != State::kRegular; }

    /// Valuation, normalized so val(p) = 1.  Exact zero gives +infinity;
    /// a below-precision value raises PrecisionLoss (nothing is known).
    Valu val() const;
    /// Lower bound on the valuation that never raises: abs_prec for
    /// below-precision values, +infinity for exact zeros.
    Valu val_lower_bound() const;
    /// |x| = p^(-val) as an exact string.
    std::string norm_str() const;

    /// Absolute precision in p-valuation units (infinite for exact zeros).
    Valu abs_prec() const;

    PadicNumber operator-() const;
    friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b);

    PadicNumber inv() const;
    PadicNumber pow(std::uint64_t e) const;

    /// Truncate the certified precision down to `prec` (p-valuation units).
    PadicNumber truncated(const Rat& prec) const;

    std::string str() const;

  private:
    friend class LocalField;
    friend struct PadicOps;

    LocalFieldPtr field_;
    State state_ = State::kExactZero;
    Rat abs_prec_;                // meaningful unless exact zero
    long long shift_ = 0;         // pi-power; valuation = shift/e
    std::vector<UVec> unit_;      // e columns of UVec, column 0 is a unit
};

/// Descriptor of Q_p, of the unramified extension of degree r (residue field
/// from the modulus table, modulus lifted coefficient-wise by Teichmueller
/// digits), or of one Eisenstein step on top.  Immutable after construction;
/// obtain instances through local_field() / eisenstein_step().
class LocalField : public std::enable_shared_from_this<LocalField> {
  public:
    long long p() const { return p_; }
    int r() const { return r_; }
    int e() const { return e_; }
    bool ramified() const { return e_ > 1; }
    const FqFieldPtr& residue_field() const { return residue_; }
    /// Storage window: coordinates are carried modulo p^storage_digits.
    int storage_digits() const { return p_store_; }
    /// Default certified precision of freshly made elements, in p-valuation
    /// units (= prec_pi / e for the configured pi-digit count).
    Rat default_prec() const { return Rat(prec_pi_, e_); }

    // --- element constructors (certified to the field's precision cap)
    PadicNumber zero() const;
    PadicNumber one() const;
    PadicNumber from_int(long long n) const;
    PadicNumber from_cpp(const cpp_int& n) const;
    /// theta^k, the k-th power of the unramified generator.
    PadicNumber theta(int k = 1) const;
    /// The uniformizer: p when unramified, the Eisenstein root otherwise.
    PadicNumber uniformizer() const;
    /// Element from raw integral coordinates c[j*r + i] (theta^i pi^j).
    PadicNumber from_coords(const std::vector<cpp_int>& c) const;

    std::string str() const;

    // internal arithmetic helpers (exposed for the implementation files)
    const std::vector<cpp_int>& modulus_lift() const { return modulus_lift_; }
    const cpp_int& pmod() const { return pmod_; } // p^storage_digits

    ~LocalField();

  private:
    friend class PadicNumber;
    friend struct PadicOps;
    friend LocalFieldPtr local_field(long long p, int r, int prec_pi);
    friend LocalFieldPtr eisenstein_step(const LocalFieldPtr& U,
                                         const std::vector<PadicNumber>& coeffs, int prec_pi);

    struct Impl;
    LocalField(long long p, int r, int e, int prec_pi);

    long long p_ = 0;
    int r_ = 1;
    int e_ = 1;
    int prec_pi_ = 32; // certified window in pi-digits
    int p_store_ = 34; // storage window in p-digits
    FqFieldPtr residue_;
    cpp_int pmod_;                    // p^p_store_
    std::vector<cpp_int> modulus_lift_; // r+1 Teichmueller-lifted coefficients
    std::unique_ptr<Impl> impl_;      // Eisenstein data, sigma images, caches
};

/// The unramified field of degree r over Q_p at the given pi-digit precision
/// (r = 1 gives Q_p itself).  Instances are cached per (p, r, prec).
LocalFieldPtr local_field(long long p, int r, int prec_pi = 32);

/// One Eisenstein step over an unramified field: coeffs are the monic
/// polynomial's coefficients low to high (length e+1), all with positive
/// valuation except the leading 1, and val(coeffs[0]) exactly 1.
LocalFieldPtr eisenstein_step(const LocalFieldPtr& U, const std::vector<PadicNumber>& coeffs,
                              int prec_pi = 32);

/// Valuation and norm of a, both exact.  Raises PrecisionLoss when a is
/// indistinguishable from zero at its precision (and not exactly zero).
struct ValNorm {
    Valu val;
    std::string norm;
};
ValNorm valuation_norm(const PadicNumber& a);

/// Image in the residue field; requires val(a) >= 0.
FqElement reduce_residue(const PadicNumber& a);

/// Multiplicative lift: the unique root of unity (or zero) over a with
/// T^(p^r_a) = T, computed by iterating x -> x^(p^r_a).  a's field must embed
/// into F's residue field.
PadicNumber teichmuller_lift(const FqElement& a, const LocalFieldPtr& F);

/// Newton iteration for a simple root: requires val(f(x0)) > 2 val(f'(x0)).
/// `f` holds the coefficients low to high.
PadicNumber hensel_root(const std::vector<PadicNumber>& f, const PadicNumber& x0);

/// The unramified Frobenius automorphism applied s times: the unique field
/// automorphism over Q_p inducing x -> x^(p^s) on the residue field.
/// Ramified fields are rejected.
PadicNumber frobenius_automorphism_sigma(const PadicNumber& a, long long s);

/// Embed along the constructed tower (Q_p -> U_d -> U_r -> E).
PadicNumber padic_embed(const PadicNumber& a, const LocalFieldPtr& target);

/// Lift both operands to a common field along the tower.
std::pair<PadicNumber, PadicNumber> padic_promote(const PadicNumber& a, const PadicNumber& b);

/// True when val(a - b) >= min of the certified precisions (so the two are
/// equal as far as their digits are known).
bool indistinguishable(const PadicNumber& a, const PadicNumber& b);

/// Coordinates c[j*r + i] of an integral element modulo p^k (theta^i pi^j).
/// Requires val(a) >= 0 and abs_prec >= k.
std::vector<cpp_int> integral_coords(const PadicNumber& a, int k);

/// Evaluate a one-variable coefficient list at x (Horner).
PadicNumber poly_eval(const std::vector<PadicNumber>& f, const PadicNumber& x);

/// Formal derivative of a one-variable coefficient list.
std::vector<PadicNumber> poly_derivative(const std::vector<PadicNumber>& f);

} // namespace padiclab
