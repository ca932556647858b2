#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "padiclab/errors.hpp"
#include "padiclab/poly.hpp"
#include "padiclab/tilt.hpp"

namespace padiclab {

// ------------------------------------------------------------------
// scalar state and valuation traits shared by the three coefficient fields

enum class ScalarState { kRegular, kFog, kExactZero };

inline ScalarState scalar_state(const FqElement& a) {
    return a.is_zero() ? ScalarState::kExactZero : ScalarState::kRegular;
}
inline ScalarState scalar_state(const PadicNumber& a) {
    switch (a.state()) {
        case PadicNumber::State::kExactZero: return ScalarState::kExactZero;
        case PadicNumber::State::kBelowPrecision: return ScalarState::kFog;
        default: return ScalarState::kRegular;
    }
}
inline ScalarState scalar_state(const TiltElement& a) {
    if (!a.terms().empty()) return ScalarState::kRegular;
    return a.cutoff_infinite() ? ScalarState::kExactZero : ScalarState::kFog;
}

// valuation of a regular scalar, and the lower bound that covers fog
inline int scalar_val(const FqElement&) { return 0; }
inline int scalar_vlb(const FqElement&) { return 0; }
inline Valu scalar_val(const PadicNumber& a) { return a.val(); }
inline Valu scalar_vlb(const PadicNumber& a) { return a.val_lower_bound(); }
inline BigRat scalar_val(const TiltElement& a) { return a.val(); }
inline BigRat scalar_vlb(const TiltElement& a) {
    if (!a.terms().empty()) return a.terms().front().exp;
    return a.cutoff();
}

// ------------------------------------------------------------------

/// Projective point in canonical form: the maximum coordinate norm is 1 and
/// the first coordinate achieving it is exactly 1 (the pivot).  Construct
/// through normalize_point; equal points at equal precision get identical
/// representations.
template <class S>
class ProjPoint {
  public:
    const std::vector<S>& coords() const { return coords_; }
    int pivot() const { return pivot_; }
    int dim() const { return static_cast<int>(coords_.size()) - 1; }

    std::string str() const {
        std::ostringstream os;
        os << "[";
        for (size_t i = 0; i < coords_.size(); ++i)
            os << (i ? " : " : "") << coords_[i].str();
        os << "]";
        return os.str();
    }

  private:
    template <class T>
    friend ProjPoint<T> normalize_point(std::vector<T> raw);
    std::vector<S> coords_;
    int pivot_ = 0;
};

/// Canonical representative of [raw_0 : ... : raw_N].  The pivot is the first
/// coordinate of maximal norm; everything is divided by it and the pivot slot
/// is set to an exact 1.  Raises ZeroVector when all coordinates are exactly
/// zero and PrecisionLoss when fog could hide the maximal coordinate or move
/// the pivot.
template <class S>
ProjPoint<S> normalize_point(std::vector<S> raw) {
    if (raw.size() < 2) throw ConfigError("projective point needs at least 2 coordinates");
    bool any_regular = false;
    bool all_exact_zero = true;
    decltype(scalar_val(raw[0])) vmin{};
    for (const S& c : raw) {
        ScalarState st = scalar_state(c);
        if (st != ScalarState::kExactZero) all_exact_zero = false;
        if (st == ScalarState::kRegular) {
            auto v = scalar_val(c);
            if (!any_regular || v < vmin) vmin = v;
            any_regular = true;
        }
    }
    if (all_exact_zero) throw ZeroVector("all projective coordinates are zero");
    if (!any_regular)
        throw PrecisionLoss("no coordinate with a certified norm");
    int pivot = -1;
    for (size_t i = 0; i < raw.size(); ++i) {
        ScalarState st = scalar_state(raw[i]);
        if (st == ScalarState::kRegular && scalar_val(raw[i]) == vmin) {
            pivot = static_cast<int>(i);
            break;
        }
        if (st == ScalarState::kFog && !(vmin < scalar_vlb(raw[i])))
            throw PrecisionLoss("fog ahead of the would-be pivot coordinate");
    }
    for (const S& c : raw)
        if (scalar_state(c) == ScalarState::kFog && scalar_vlb(c) < vmin)
            throw PrecisionLoss("a coordinate below precision could dominate the norm");
    ProjPoint<S> out;
    out.pivot_ = pivot;
    out.coords_.reserve(raw.size());
    const S& piv = raw[pivot];
    for (size_t i = 0; i < raw.size(); ++i) {
        if (static_cast<int>(i) == pivot) out.coords_.push_back(scalar_one_like(piv));
        else out.coords_.push_back(raw[i] / piv);
    }
    return out;
}

template <class S>
bool indistinguishable(const ProjPoint<S>& a, const ProjPoint<S>& b) {
    if (a.coords().size() != b.coords().size() || a.pivot() != b.pivot()) return false;
    for (size_t i = 0; i < a.coords().size(); ++i)
        if (!scalar_eq(a.coords()[i], b.coords()[i])) return false;
    return true;
}

/// Coordinate-wise residue reduction of a normalized point; well defined on
/// projective classes because the pivot coordinate is a unit.
ProjPoint<FqElement> reduction_map(const ProjPoint<PadicNumber>& x);

// ------------------------------------------------------------------

/// Closed subvariety of P^N presented by homogeneous generators over a local
/// field, each stored Gauss-normalized (norm exactly 1).
class Variety {
  public:
    explicit Variety(std::vector<Poly<PadicNumber>> generators);
    const std::vector<Poly<PadicNumber>>& generators() const { return gens_; }
    int nvars() const { return nvars_; }

  private:
    std::vector<Poly<PadicNumber>> gens_;
    int nvars_;
};

/// Certified distance d(y, V) = max_i |H_i(y)|.
struct Distance {
    enum class Kind { kExactZero, kZeroAtPrecision, kPositive };
    Kind kind;
    // kPositive: the exact valuation of the largest generator value
    // kZeroAtPrecision: a certified lower bound on every generator valuation
    // kExactZero: infinite
    Valu val;
    Rat threshold;  // membership threshold the verdict was measured against
    long long p;

    bool is_zero_at_precision() const { return kind != Kind::kPositive; }
    std::string norm_str() const;
};

/// Distance of a normalized point to a variety.  Values at or above the
/// certify threshold are reported as indistinguishable from zero, never as
/// zero.  The default threshold is the working precision minus two guard
/// digits of the uniformizer.  Raises PrecisionLoss when fog prevents
/// certifying the maximum.
Distance distance_to_variety(const ProjPoint<PadicNumber>& y, const Variety& V,
                             std::optional<Rat> certify_threshold = std::nullopt);

} // namespace padiclab
