#pragma once

#include <boost/rational.hpp>

#include <ostream>
#include <sstream>
#include <string>

#include "padiclab/errors.hpp"

namespace padiclab {

// Exact rational used for valuations and precisions.  All norms in the
// library are powers p^(-v) with v a Rat, so comparisons stay exact.
//
// Under C++20 the reversed-argument rewriting of == and < makes boost 1.74's
// mixed rational/integer comparisons call themselves; always compare Rat with
// Rat (wrap literals in Rat(..)), never with a bare integer.
using Rat = boost::rational<long long>;

inline std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

// Valuation with +infinity (the valuation of an exact zero).
class Valu {
  public:
    static Valu infinity() {
        Valu v;
        v.inf_ = true;
        return v;
    }
    Valu() : v_(0) {}
    Valu(const Rat& v) : v_(v) {} // NOLINT: implicit by design
    Valu(long long v) : v_(v) {}  // NOLINT

    bool is_infinite() const { return inf_; }
    const Rat& finite() const {
        if (inf_) throw Error("valuation is infinite");
        return v_;
    }

    friend bool operator==(const Valu& a, const Valu& b) {
        if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
        return a.v_ == b.v_;
    }
    friend bool operator!=(const Valu& a, const Valu& b) { return !(a == b); }
    friend bool operator<(const Valu& a, const Valu& b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator>(const Valu& a, const Valu& b) { return b < a; }
    friend bool operator<=(const Valu& a, const Valu& b) { return !(b < a); }
    friend bool operator>=(const Valu& a, const Valu& b) { return !(a < b); }

    friend Valu operator+(const Valu& a, const Valu& b) {
        if (a.inf_ || b.inf_) return infinity();
        return Valu(a.v_ + b.v_);
    }

    // Norm |x| = p^(-v) rendered exactly, e.g. "2^-3/2", "1", "0".
    std::string norm_str(long long p) const {
        if (inf_) return "0";
        if (v_.numerator() == 0) return "1";
        std::ostringstream os;
        os << p << "^" << rat_str(-v_);
        return os.str();
    }

  private:
    bool inf_ = false;
    Rat v_;
};

inline std::ostream& operator<<(std::ostream& os, const Valu& v) {
    if (v.is_infinite()) return os << "inf";
    return os << rat_str(v.finite());
}

// Smallest integer >= r.
inline long long rat_ceil(const Rat& r) {
    long long q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
    return q;
}

// Largest integer <= r.
inline long long rat_floor(const Rat& r) {
    long long q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return q;
}

} // namespace padiclab
