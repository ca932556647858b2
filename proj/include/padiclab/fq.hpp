#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "padiclab/errors.hpp"
#include "padiclab/rat.hpp"

namespace padiclab {

class FqField;
using FqFieldPtr = std::shared_ptr<const FqField>;

/// Element of a finite field F_(p^r), stored as the coefficient vector of
/// its polynomial representative in the field's generator, low degree first,
/// entries in [0, p).
class FqElement {
  public:
    FqElement() = default;
    FqElement(FqFieldPtr field, std::vector<int> coeffs);

    const FqFieldPtr& field() const { return field_; }
    const std::vector<int>& coeffs() const { return coeffs_; }

    bool is_zero() const;
    bool is_one() const;
    /// 0 for nonzero elements, +infinity for zero.
    Valu val() const { return is_zero() ? Valu::infinity() : Valu(0); }

    FqElement operator-() const;
    friend FqElement operator+(const FqElement& a, const FqElement& b);
    friend FqElement operator-(const FqElement& a, const FqElement& b);
    friend FqElement operator*(const FqElement& a, const FqElement& b);
    friend FqElement operator/(const FqElement& a, const FqElement& b);
    friend bool operator==(const FqElement& a, const FqElement& b);
    friend bool operator!=(const FqElement& a, const FqElement& b) { return !(a == b); }

    FqElement inv() const;
    FqElement pow(std::uint64_t e) const;

    /// Index within the field's deterministic element order: the coefficient
    /// vector read as base-p digits with c_0 most significant, so ascending
    /// index is ascending lexicographic order on (c_0, ..., c_{r-1}).
    std::uint64_t index() const;

    std::string str() const; // "[c0,c1,...]"

  private:
    FqFieldPtr field_;
    std::vector<int> coeffs_;
};

/// F_(p^r) with a fixed monic modulus over F_p.  Construct through fq_field()
/// so that subfield embeddings exist and are cached; fields are immutable
/// once built.
class FqField : public std::enable_shared_from_this<FqField> {
  public:
    long long p() const { return p_; }
    int r() const { return r_; }
    bool table_field() const { return table_; }
    const std::vector<int>& modulus() const { return modulus_; }
    std::uint64_t size() const { return size_; } // p^r

    FqElement zero() const;
    FqElement one() const;
    FqElement gen() const;
    FqElement from_int(long long n) const;
    FqElement from_coeffs(std::vector<int> c) const;
    FqElement element_at(std::uint64_t index) const;

    std::string str() const;

    // use fq_field()/fq_field_override(); direct construction skips the
    // embedding bookkeeping
    FqField(long long p, int r, std::vector<int> modulus, bool table);

    std::vector<int> reduce(std::vector<int> raw) const; // mod modulus, mod p
    std::vector<int> mul_raw(const std::vector<int>& a, const std::vector<int>& b) const;

  private:

    long long p_ = 0;
    int r_ = 0;
    bool table_ = false;
    std::uint64_t size_ = 0;
    std::vector<int> modulus_; // length r+1, monic
};

/// Fetch (or build) the table field F_(p^r).  p in {2,3,5}, 1 <= r <= 12.
/// Construction eagerly materialises every divisor field and the power
/// embeddings between them.
FqFieldPtr fq_field(long long p, int r);

/// Field with a caller-supplied monic irreducible modulus (length r+1,
/// coefficients in [0,p)).  Embeddings to and from table fields are found by
/// root search with the lexicographically least root; towers through
/// overridden fields are not guaranteed to commute.
FqFieldPtr fq_field_override(long long p, int r, const std::vector<int>& modulus);

/// Image of `a` under the cached embedding into `target`; the source degree
/// must divide the target degree. Raises IncompatibleFields otherwise.
FqElement fq_embed(const FqElement& a, const FqFieldPtr& target);

/// Lift both operands into the smallest common table field (degree
/// lcm(r_a, r_b)).
std::pair<FqElement, FqElement> fq_promote(const FqElement& a, const FqElement& b);

/// s-fold p-power Frobenius x -> x^(p^s), or its inverse.  Exact in both
/// directions.
FqElement frobenius_s(const FqElement& a, long long s, bool inverse = false);

/// All points of P^N over `field`, each as a normalized coordinate vector
/// (first nonzero coordinate equals 1), in a fixed deterministic order.
/// Raises ResourceLimit when the count would exceed `cap`.
std::vector<std::vector<FqElement>> enumerate_proj_points(const FqFieldPtr& field, int N,
                                                          std::uint64_t cap = 1u << 22);

/// Least m >= 1 such that every coordinate of the normalized tuple is fixed
/// by x -> x^(p^(s*m)).
int field_of_definition(const std::vector<FqElement>& coords, long long s);

/// Parse "[c0,c1,...]" into an element of `field`.
FqElement fq_parse(const FqFieldPtr& field, const std::string& text);

} // namespace padiclab
