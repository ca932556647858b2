#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "padiclab/errors.hpp"
#include "padiclab/fq.hpp"
#include "padiclab/padic.hpp"

namespace padiclab {

// ------------------------------------------------------------------
// scalar traits: the polynomial layer is generic over FqElement and
// PadicNumber, which disagree about what "zero" means.  Exact zeros are
// dropped from term maps; below-precision p-adic coefficients are kept
// because they still carry a valuation bound.

inline bool scalar_is_exact_zero(const FqElement& a) { return a.is_zero(); }
inline bool scalar_is_exact_zero(const PadicNumber& a) { return a.is_exact_zero(); }

inline bool scalar_is_zero_at_precision(const FqElement& a) { return a.is_zero(); }
inline bool scalar_is_zero_at_precision(const PadicNumber& a) {
    return a.is_zero_at_precision();
}

inline bool scalar_eq(const FqElement& a, const FqElement& b) { return a == b; }
inline bool scalar_eq(const PadicNumber& a, const PadicNumber& b) {
    return indistinguishable(a, b);
}

inline FqElement scalar_zero_like(const FqElement& s) { return s.field()->zero(); }
inline PadicNumber scalar_zero_like(const PadicNumber& s) { return s.field()->zero(); }

inline FqElement scalar_one_like(const FqElement& s) { return s.field()->one(); }
inline PadicNumber scalar_one_like(const PadicNumber& s) { return s.field()->one(); }

inline FqElement scalar_from_int_like(const FqElement& s, long long n) {
    return s.field()->from_int(n);
}
inline PadicNumber scalar_from_int_like(const PadicNumber& s, long long n) {
    return s.field()->from_int(n);
}

inline FqElement scalar_sigma(const FqElement& a, long long s) {
    return s < 0 ? frobenius_s(a, -s, true) : frobenius_s(a, s);
}
inline PadicNumber scalar_sigma(const PadicNumber& a, long long s) {
    return frobenius_automorphism_sigma(a, s);
}

inline FqElement field_scalar_from_cpp(const FqFieldPtr& f, const cpp_int& n) {
    cpp_int m = n % f->p();
    if (m < 0) m += f->p();
    return f->from_int(static_cast<long long>(m));
}
inline PadicNumber field_scalar_from_cpp(const LocalFieldPtr& f, const cpp_int& n) {
    return f->from_cpp(n);
}

// ------------------------------------------------------------------
// monomials under graded lexicographic order, leading term first

using Mono = std::vector<int>;

inline int mono_degree(const Mono& m) {
    int d = 0;
    for (int e : m) d += e;
    return d;
}

// "a before b" in term maps: higher total degree first, then lex with x_0
// heaviest.  This is a strict weak order, so std::map stays deterministic.
struct MonoGreater {
    bool operator()(const Mono& a, const Mono& b) const {
        int da = mono_degree(a), db = mono_degree(b);
        if (da != db) return da > db;
        return a > b; // lexicographic on exponent vectors
    }
};

inline std::string mono_str(const Mono& m) {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (!first) os << "*";
        os << "x" << i;
        if (m[i] > 1) os << "^" << m[i];
        first = false;
    }
    if (first) os << "1";
    return os.str();
}

// ------------------------------------------------------------------

/// Multivariate polynomial with scalar coefficients, terms kept in graded-lex
/// order with the leading term first.  Exact-zero coefficients are never
/// stored; below-precision p-adic coefficients are genuine terms.
template <class S>
class Poly {
  public:
    using TermMap = std::map<Mono, S, MonoGreater>;

    explicit Poly(int nvars = 0) : nvars_(nvars) {}

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_exact_zero() const { return terms_.empty(); }
    bool is_zero_at_precision() const {
        for (const auto& [m, c] : terms_)
            if (!scalar_is_zero_at_precision(c)) return false;
        return true;
    }

    void add_term(Mono m, const S& c) {
        if (static_cast<int>(m.size()) != nvars_)
            throw InvalidDegree("monomial arity does not match the polynomial");
        if (scalar_is_exact_zero(c)) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(std::move(m), c);
            return;
        }
        S sum = it->second + c;
        if (scalar_is_exact_zero(sum)) terms_.erase(it);
        else it->second = sum;
    }

    /// Leading (graded-lex greatest) term; the polynomial must be nonzero.
    const std::pair<const Mono, S>& leading() const {
        if (terms_.empty()) throw Error("leading term of the zero polynomial");
        return *terms_.begin();
    }

    void erase_term(const Mono& m) { terms_.erase(m); }

    int degree() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, mono_degree(m));
        return d;
    }

    /// Common total degree of all terms; raises if the terms mix degrees.
    int homogeneous_degree() const {
        int d = -1;
        for (const auto& [m, c] : terms_) {
            int dm = mono_degree(m);
            if (d == -1) d = dm;
            else if (d != dm) throw InvalidDegree("polynomial is not homogeneous");
        }
        return d; // -1 for the zero polynomial
    }

    bool is_homogeneous() const {
        int d = -1;
        for (const auto& [m, c] : terms_) {
            int dm = mono_degree(m);
            if (d == -1) d = dm;
            else if (d != dm) return false;
        }
        return true;
    }

    Poly operator-() const {
        Poly r(nvars_);
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        if (a.nvars_ != b.nvars_) throw InvalidDegree("adding polynomials of different arity");
        Poly r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }

    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.nvars_ != b.nvars_)
            throw InvalidDegree("multiplying polynomials of different arity");
        Poly r(a.nvars_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Mono m(a.nvars_);
                for (int i = 0; i < a.nvars_; ++i) m[i] = ma[i] + mb[i];
                r.add_term(std::move(m), ca * cb);
            }
        }
        return r;
    }

    Poly scaled(const S& c) const {
        Poly r(nvars_);
        for (const auto& [m, co] : terms_) r.add_term(m, co * c);
        return r;
    }

    S eval(const std::vector<S>& x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw InvalidDegree("evaluation point arity mismatch");
        if (x.empty()) throw InvalidDegree("evaluation needs at least one coordinate");
        // per-variable power caches
        std::vector<std::vector<S>> pows(nvars_);
        for (int i = 0; i < nvars_; ++i) pows[i].push_back(scalar_one_like(x[0]));
        S acc = scalar_zero_like(x[0]);
        for (const auto& [m, c] : terms_) {
            S t = c;
            for (int i = 0; i < nvars_; ++i) {
                if (m[i] == 0) continue;
                auto& pw = pows[i];
                while (static_cast<int>(pw.size()) <= m[i]) pw.push_back(pw.back() * x[i]);
                t = t * pw[m[i]];
            }
            acc = acc + t;
        }
        return acc;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (!first) os << " + ";
            os << "(" << c.str() << ")*" << mono_str(m);
            first = false;
        }
        return os.str();
    }

  private:
    int nvars_;
    TermMap terms_;
};

template <class S>
bool poly_equal(const Poly<S>& a, const Poly<S>& b) {
    return (a - b).is_zero_at_precision();
}

// ------------------------------------------------------------------
// free operations

/// Substitute comps[i] for variable i of H.  All comps must share one arity.
template <class S>
Poly<S> compose_endo(const Poly<S>& H, const std::vector<Poly<S>>& comps) {
    if (static_cast<int>(comps.size()) != H.nvars())
        throw InvalidDegree("composition needs one polynomial per variable");
    int out_vars = comps.empty() ? 0 : comps[0].nvars();
    for (const auto& c : comps)
        if (c.nvars() != out_vars) throw InvalidDegree("composition arity mismatch");
    Poly<S> acc(out_vars);
    // cache of comps[i]^k for k >= 1
    std::vector<std::vector<Poly<S>>> pows(comps.size());
    for (const auto& [m, c] : H.terms()) {
        Poly<S> t(out_vars);
        t.add_term(Mono(out_vars, 0), c);
        for (int i = 0; i < H.nvars(); ++i) {
            if (m[i] == 0) continue;
            auto& pw = pows[i];
            while (static_cast<int>(pw.size()) < m[i])
                pw.push_back(pw.empty() ? comps[i] : pw.back() * comps[i]);
            t = t * pw[m[i] - 1];
        }
        acc = acc + t;
    }
    return acc;
}

/// Quotient Q with A = B * Q, when it exists.  Graded-lex long division; the
/// step-by-step leading cancellation is erased outright (the quotient term is
/// chosen so it cancels identically), which keeps p-adic remainders clean.
template <class S>
std::optional<Poly<S>> exact_divide(const Poly<S>& A, const Poly<S>& B) {
    if (B.is_exact_zero()) throw DivisionByZero("polynomial division by zero");
    if (A.nvars() != B.nvars()) throw InvalidDegree("division arity mismatch");
    Poly<S> Q(A.nvars());
    Poly<S> R = A;
    const auto& [bm, bc] = B.leading();
    int guard = 0;
    while (!R.is_zero_at_precision()) {
        if (++guard > 100000) throw ResourceLimit("polynomial division did not terminate");
        // skip sub-precision leading junk
        while (!R.is_exact_zero() && scalar_is_zero_at_precision(R.leading().second))
            R.erase_term(R.leading().first);
        if (R.is_exact_zero()) break;
        const auto& [rm, rc] = R.leading();
        Mono qm(A.nvars());
        bool div = true;
        for (int i = 0; i < A.nvars() && div; ++i) {
            qm[i] = rm[i] - bm[i];
            if (qm[i] < 0) div = false;
        }
        if (!div) return std::nullopt;
        S qc = rc / bc;
        Mono rm_copy = rm;
        Poly<S> t(A.nvars());
        t.add_term(qm, qc);
        Q = Q + t;
        R = R - t * B;
        R.erase_term(rm_copy); // cancels by construction
    }
    return Q;
}

/// Set variable `chart` to 1, producing a polynomial in one fewer variable.
template <class S>
Poly<S> dehomogenize(const Poly<S>& P, int chart) {
    if (chart < 0 || chart >= P.nvars()) throw InvalidDegree("chart index out of range");
    Poly<S> r(P.nvars() - 1);
    for (const auto& [m, c] : P.terms()) {
        Mono n;
        n.reserve(m.size() - 1);
        for (size_t i = 0; i < m.size(); ++i)
            if (static_cast<int>(i) != chart) n.push_back(m[i]);
        r.add_term(std::move(n), c);
    }
    return r;
}

template <class S>
Poly<S> poly_derivative_var(const Poly<S>& P, int var) {
    if (var < 0 || var >= P.nvars()) throw InvalidDegree("variable index out of range");
    Poly<S> r(P.nvars());
    for (const auto& [m, c] : P.terms()) {
        if (m[var] == 0) continue;
        Mono n = m;
        n[var] -= 1;
        r.add_term(std::move(n), c * scalar_from_int_like(c, m[var]));
    }
    return r;
}

/// Apply the s-fold residue frobenius (or its unramified lift) to every
/// coefficient.
template <class S>
Poly<S> poly_sigma(const Poly<S>& P, long long s) {
    Poly<S> r(P.nvars());
    for (const auto& [m, c] : P.terms()) r.add_term(m, scalar_sigma(c, s));
    return r;
}

/// Coefficient-wise residue reduction; every coefficient must be integral.
inline Poly<FqElement> reduce_poly(const Poly<PadicNumber>& P) {
    Poly<FqElement> r(P.nvars());
    for (const auto& [m, c] : P.terms()) r.add_term(m, reduce_residue(c));
    return r;
}

/// Gauss valuation: min over coefficient valuations (the norm is p^-that).
/// Raises PrecisionLoss when below-precision coefficients could change the
/// minimum; gauss_val_lower_bound never raises.
inline Valu gauss_val(const Poly<PadicNumber>& P) {
    Valu best = Valu::infinity();
    Valu regular_best = Valu::infinity();
    bool fog = false; // a below-precision coefficient at or under the best bound
    for (const auto& [m, c] : P.terms()) {
        Valu lb = c.val_lower_bound();
        if (lb < best) best = lb;
        if (c.state() == PadicNumber::State::kRegular && lb < regular_best) regular_best = lb;
        if (c.state() == PadicNumber::State::kBelowPrecision) fog = true;
    }
    if (!fog) return regular_best; // infinity for the zero polynomial
    // determined only if no fog bound sits strictly under the certified minimum
    for (const auto& [m, c] : P.terms())
        if (c.state() == PadicNumber::State::kBelowPrecision &&
            c.val_lower_bound() < regular_best)
            throw PrecisionLoss("gauss valuation hidden below coefficient precision");
    return regular_best;
}

inline Valu gauss_val_lower_bound(const Poly<PadicNumber>& P) {
    Valu best = Valu::infinity();
    for (const auto& [m, c] : P.terms()) {
        Valu lb = c.val_lower_bound();
        if (lb < best) best = lb;
    }
    return best;
}

/// Divide by the graded-lex-first coefficient of minimal valuation, making
/// the Gauss valuation 0 with a distinguished coefficient exactly 1.
inline Poly<PadicNumber> gauss_normalize(const Poly<PadicNumber>& P) {
    Valu v = gauss_val(P);
    if (v.is_infinite()) throw ZeroVector("normalizing the zero polynomial");
    for (const auto& [m, c] : P.terms()) {
        if (c.state() == PadicNumber::State::kRegular && Valu(c.val()) == v)
            return P.scaled(c.inv());
    }
    throw Error("internal: minimal coefficient not found");
}

// ------------------------------------------------------------------
// parsing: integer-coefficient polynomials in variables x0, x1, ...
// grammar: term (('+'|'-') term)*, term: factor ('*' factor)*,
// factor: integer | xK | xK^E.  Whitespace is free.

template <class FieldPtr>
auto parse_poly(const FieldPtr& field, int nvars, const std::string& text)
    -> Poly<decltype(field_scalar_from_cpp(field, cpp_int()))> {
    using S = decltype(field_scalar_from_cpp(field, cpp_int()));
    Poly<S> out(nvars);
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto parse_uint = [&]() -> cpp_int {
        size_t start = i;
        cpp_int v = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            v = v * 10 + (text[i] - '0');
            ++i;
        }
        if (i == start) throw ConfigError("expected a number at position " +
                                          std::to_string(start) + " in '" + text + "'");
        return v;
    };
    skip_ws();
    if (i >= text.size()) throw ConfigError("empty polynomial");
    bool first_term = true;
    while (true) {
        skip_ws();
        if (i >= text.size()) break;
        int sign = 1;
        if (text[i] == '+' || text[i] == '-') {
            if (first_term && text[i] == '+')
                throw ConfigError("polynomial cannot start with '+'");
            sign = text[i] == '-' ? -1 : 1;
            ++i;
            skip_ws();
        } else if (!first_term) {
            throw ConfigError("expected '+' or '-' at position " + std::to_string(i) +
                              " in '" + text + "'");
        }
        first_term = false;
        cpp_int coeff = sign;
        Mono m(nvars, 0);
        bool want_factor = true;
        while (want_factor) {
            skip_ws();
            if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                coeff *= parse_uint();
            } else if (i < text.size() && text[i] == 'x') {
                ++i;
                cpp_int idx = parse_uint();
                if (idx >= nvars)
                    throw ConfigError("variable x" + idx.str() + " out of range (nvars=" +
                                      std::to_string(nvars) + ")");
                int exp = 1;
                if (i < text.size() && text[i] == '^') {
                    ++i;
                    cpp_int e = parse_uint();
                    if (e > 64) throw ConfigError("exponent too large");
                    exp = static_cast<int>(e);
                }
                m[static_cast<int>(idx)] += exp;
            } else {
                throw ConfigError("expected a factor at position " + std::to_string(i) +
                                  " in '" + text + "'");
            }
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                ++i;
            } else {
                want_factor = false;
            }
        }
        out.add_term(std::move(m), field_scalar_from_cpp(field, coeff));
    }
    return out;
}

} // namespace padiclab
