#include "padiclab/tilt.hpp"

#include <algorithm>
#include <sstream>

namespace padiclab {

namespace {

using boost::multiprecision::cpp_int;

cpp_int br_num(const BigRat& x) { return boost::multiprecision::numerator(x); }
cpp_int br_den(const BigRat& x) { return boost::multiprecision::denominator(x); }

std::string br_str(const BigRat& x) {
    if (br_den(x) == 1) return br_num(x).str();
    return br_num(x).str() + "/" + br_den(x).str();
}

void require_init(const TiltElement& a) {
    if (!a.field()) throw Error("uninitialized tilt element; use the factories");
}

FqFieldPtr common_field(const FqFieldPtr& fa, const FqFieldPtr& fb) {
    if (fa.get() == fb.get()) return fa;
    auto pr = fq_promote(fa->zero(), fb->zero());
    return pr.first.field();
}

std::vector<TiltTerm> embed_terms(const std::vector<TiltTerm>& ts, const FqFieldPtr& target) {
    std::vector<TiltTerm> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back({t.exp, fq_embed(t.coeff, target)});
    return out;
}

std::optional<BigRat> min_cut(const std::optional<BigRat>& x, const std::optional<BigRat>& y) {
    if (!x) return y;
    if (!y) return x;
    return std::min(*x, *y);
}

// valuation lower bound: leading exponent, or the cutoff when no term is
// known, or nullopt (meaning +infinity) for exact zero
std::optional<BigRat> vlb(const TiltElement& a) {
    if (!a.terms().empty()) return a.terms().front().exp;
    if (!a.cutoff_infinite()) return a.cutoff();
    return std::nullopt;
}

constexpr long long kTiltDefaultRelPrec = 32;

} // namespace

bool is_p_power_denominator(const BigRat& e, long long p) {
    cpp_int den = br_den(e);
    while (den % p == 0) den /= p;
    return den == 1;
}

TiltElement tilt_make(FqFieldPtr field, std::vector<TiltTerm> terms,
                      std::optional<BigRat> cutoff) {
    if (!field) throw Error("tilt element needs a coefficient field");
    long long p = field->p();
    for (auto& t : terms) {
        if (!is_p_power_denominator(t.exp, p))
            throw ConfigError("tilt exponent denominator must be a power of " +
                              std::to_string(p));
        if (t.coeff.field().get() != field.get()) t.coeff = fq_embed(t.coeff, field);
    }
    std::sort(terms.begin(), terms.end(),
              [](const TiltTerm& a, const TiltTerm& b) { return a.exp < b.exp; });
    std::vector<TiltTerm> merged;
    for (auto& t : terms) {
        if (!merged.empty() && merged.back().exp == t.exp) {
            FqElement s = merged.back().coeff + t.coeff;
            if (s.is_zero()) merged.pop_back();
            else merged.back().coeff = s;
        } else if (!t.coeff.is_zero()) {
            merged.push_back(std::move(t));
        }
    }
    if (cutoff) {
        while (!merged.empty() && !(merged.back().exp < *cutoff)) merged.pop_back();
    }
    TiltElement out;
    out.field_ = std::move(field);
    out.terms_ = std::move(merged);
    out.cutoff_ = std::move(cutoff);
    return out;
}

TiltElement tilt_zero(const FqFieldPtr& field) { return tilt_make(field, {}); }

TiltElement tilt_one(const FqFieldPtr& field) {
    return tilt_make(field, {{BigRat(0), field->one()}});
}

TiltElement tilt_monomial(const FqElement& coeff, const BigRat& exp,
                          std::optional<BigRat> cutoff) {
    return tilt_make(coeff.field(), {{exp, coeff}}, std::move(cutoff));
}

TiltElement tilt_from_residue(const FqElement& c) { return tilt_monomial(c, BigRat(0)); }

TiltElement tilt_t(const FqFieldPtr& field) {
    return tilt_make(field, {{BigRat(1), field->one()}});
}

const BigRat& TiltElement::cutoff() const {
    if (!cutoff_) throw Error("cutoff queried on an exact tilt element");
    return *cutoff_;
}

BigRat TiltElement::val() const {
    if (!terms_.empty()) return terms_.front().exp;
    if (cutoff_) throw PrecisionLoss("tilt valuation is below the cutoff");
    throw ZeroVector("valuation of the exact zero tilt element");
}

std::string TiltElement::norm_str() const {
    if (is_exact_zero()) return "0";
    if (terms_.empty()) {
        std::ostringstream os;
        os << "O(" << field_->p() << "^-" << br_str(*cutoff_) << ")";
        return os.str();
    }
    const BigRat& e0 = terms_.front().exp;
    if (e0 == 0) return "1";
    std::ostringstream os;
    os << field_->p() << "^";
    if (e0 > 0) os << "-";
    BigRat a = e0 > 0 ? e0 : BigRat(-e0);
    os << br_str(a);
    return os.str();
}

TiltElement TiltElement::operator-() const {
    TiltElement out = *this;
    for (auto& t : out.terms_) t.coeff = -t.coeff;
    return out;
}

TiltElement operator+(const TiltElement& a, const TiltElement& b) {
    require_init(a);
    require_init(b);
    FqFieldPtr f = common_field(a.field_, b.field_);
    std::vector<TiltTerm> ts = embed_terms(a.terms_, f);
    for (const auto& t : embed_terms(b.terms_, f)) ts.push_back(t);
    return tilt_make(f, std::move(ts), min_cut(a.cutoff_, b.cutoff_));
}

TiltElement operator-(const TiltElement& a, const TiltElement& b) { return a + (-b); }

TiltElement operator*(const TiltElement& a, const TiltElement& b) {
    require_init(a);
    require_init(b);
    FqFieldPtr f = common_field(a.field_, b.field_);
    std::vector<TiltTerm> ta = embed_terms(a.terms_, f);
    std::vector<TiltTerm> tb = embed_terms(b.terms_, f);
    std::vector<TiltTerm> prod;
    prod.reserve(ta.size() * tb.size());
    for (const auto& x : ta)
        for (const auto& y : tb) prod.push_back({x.exp + y.exp, x.coeff * y.coeff});
    std::optional<BigRat> cut;
    if (a.cutoff_) {
        auto vb = vlb(b);
        if (vb) cut = min_cut(cut, *a.cutoff_ + *vb);
    }
    if (b.cutoff_) {
        auto va = vlb(a);
        if (va) cut = min_cut(cut, *b.cutoff_ + *va);
    }
    return tilt_make(f, std::move(prod), std::move(cut));
}

TiltElement TiltElement::scaled(const FqElement& c) const {
    require_init(*this);
    FqFieldPtr f = common_field(field_, c.field());
    FqElement ce = fq_embed(c, f);
    std::vector<TiltTerm> ts = embed_terms(terms_, f);
    for (auto& t : ts) t.coeff = t.coeff * ce;
    return tilt_make(f, std::move(ts), cutoff_);
}

TiltElement TiltElement::shifted(const BigRat& d) const {
    require_init(*this);
    if (!is_p_power_denominator(d, field_->p()))
        throw ConfigError("tilt shift denominator must be a power of " +
                          std::to_string(field_->p()));
    TiltElement out = *this;
    for (auto& t : out.terms_) t.exp += d;
    if (out.cutoff_) *out.cutoff_ += d;
    return out;
}

TiltElement TiltElement::truncated(const BigRat& E) const {
    require_init(*this);
    return tilt_make(field_, terms_, min_cut(cutoff_, E));
}

TiltElement TiltElement::inv() const {
    require_init(*this);
    if (terms_.empty()) {
        if (cutoff_) throw PrecisionLoss("inverting an element with no known terms");
        throw DivisionByZero("inverting the exact zero tilt element");
    }
    const BigRat e0 = terms_.front().exp;
    const FqElement c0 = terms_.front().coeff;
    // relative budget: everything known, or the default window for exact
    // multi-term inputs whose inverse is an infinite series
    BigRat rel = cutoff_ ? (*cutoff_ - e0) : BigRat(kTiltDefaultRelPrec);
    bool exact_monomial = !cutoff_ && terms_.size() == 1;
    if (exact_monomial)
        return tilt_monomial(c0.inv(), -e0);
    TiltElement v = shifted(-e0).scaled(c0.inv()); // 1 + u, val(u) > 0
    TiltElement u = (v - tilt_one(field_)).truncated(rel);
    TiltElement S = tilt_one(field_).truncated(rel);
    TiltElement T = S;
    int guard = 0;
    while (true) {
        T = (T * (-u)).truncated(rel);
        if (T.is_zero_at_precision()) break;
        S = S + T;
        if (++guard > 100000) throw ResourceLimit("tilt inversion series did not settle");
    }
    return S.scaled(c0.inv()).shifted(-e0);
}

TiltElement operator/(const TiltElement& a, const TiltElement& b) { return a * b.inv(); }

TiltElement TiltElement::pow(std::uint64_t n) const {
    require_init(*this);
    TiltElement acc = tilt_one(field_);
    TiltElement base = *this;
    while (n) {
        if (n & 1) acc = acc * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return acc;
}

std::string TiltElement::str() const {
    require_init(*this);
    std::ostringstream os;
    if (terms_.empty()) {
        os << "0";
    } else {
        bool first = true;
        for (const auto& t : terms_) {
            if (!first) os << " + ";
            os << t.coeff.str() << "*t^(" << br_str(t.exp) << ")";
            first = false;
        }
    }
    os << "; cutoff=" << (cutoff_ ? br_str(*cutoff_) : "inf");
    return os.str();
}

TiltElement tilt_frobenius(const TiltElement& a, long long s) {
    require_init(a);
    if (s == 0) return a;
    long long absS = s < 0 ? -s : s;
    BigRat scale;
    if (s > 0) {
        cpp_int num = 1;
        for (long long i = 0; i < absS; ++i) num *= a.field()->p();
        scale = BigRat(num);
    } else {
        cpp_int den = 1;
        for (long long i = 0; i < absS; ++i) den *= a.field()->p();
        scale = BigRat(1, den);
    }
    std::vector<TiltTerm> ts;
    ts.reserve(a.terms().size());
    for (const auto& t : a.terms())
        ts.push_back({t.exp * scale, frobenius_s(t.coeff, absS, s < 0)});
    std::optional<BigRat> cut;
    if (!a.cutoff_infinite()) cut = a.cutoff() * scale;
    return tilt_make(a.field(), std::move(ts), std::move(cut));
}

FqElement tilt_reduce(const TiltElement& a) {
    require_init(a);
    for (const auto& t : a.terms())
        if (t.exp < 0)
            throw NegativeValuation("residue reduction asked of a tilt element with val < 0");
    if (!a.cutoff_infinite() && !(a.cutoff() > 0))
        throw PrecisionLoss("constant tilt coefficient not certified by the cutoff");
    for (const auto& t : a.terms())
        if (t.exp == 0) return t.coeff;
    return a.field()->zero();
}

bool indistinguishable(const TiltElement& a, const TiltElement& b) {
    return (a - b).is_zero_at_precision();
}

BigRat tilt_gauss_val(const Poly<TiltElement>& P) {
    bool have_regular = false;
    BigRat regular_best;
    std::optional<BigRat> fog;
    for (const auto& [m, c] : P.terms()) {
        if (!c.terms().empty()) {
            BigRat v = c.terms().front().exp;
            if (!have_regular || v < regular_best) {
                regular_best = v;
                have_regular = true;
            }
        } else if (!c.cutoff_infinite()) {
            fog = fog ? std::min(*fog, c.cutoff()) : c.cutoff();
        }
    }
    if (!have_regular) {
        if (fog) throw PrecisionLoss("tilt gauss valuation hidden below cutoffs");
        throw ZeroVector("gauss valuation of the zero polynomial");
    }
    if (fog && *fog < regular_best)
        throw PrecisionLoss("tilt gauss valuation hidden below cutoffs");
    return regular_best;
}

BigRat tilt_gauss_val_lower_bound(const Poly<TiltElement>& P) {
    bool have = false;
    BigRat best;
    for (const auto& [m, c] : P.terms()) {
        std::optional<BigRat> v = vlb(c);
        if (!v) continue;
        if (!have || *v < best) {
            best = *v;
            have = true;
        }
    }
    if (!have) throw ZeroVector("valuation bound of an exactly zero polynomial");
    return best;
}

EisensteinSplit eisenstein_split(const Poly<TiltElement>& G, const BigRat& eps_val) {
    if (eps_val < 0) throw ConfigError("norm threshold must be at most 1");
    // collect the exponent denominators and the coefficient field
    FqFieldPtr field;
    cpp_int emax = 1;
    for (const auto& [mono, c] : G.terms()) {
        require_init(c);
        field = field ? common_field(field, c.field()) : c.field();
        for (const auto& t : c.terms()) {
            if (t.exp < 0)
                throw NegativeValuation("splitting needs integral tilt coefficients");
            cpp_int den = br_den(t.exp);
            if (den > emax) emax = den;
        }
        if (!c.cutoff_infinite() && !(c.cutoff() > eps_val))
            throw PrecisionLoss("coefficient cutoff does not certify the threshold");
    }
    if (!field) {
        // zero polynomial: trivial split over an unknowable field is useless,
        // demand at least one coefficient so u has a home
        throw ZeroVector("splitting the zero polynomial");
    }
    if (emax > (cpp_int(1) << 31)) throw ResourceLimit("exponent denominator too large");
    long long eprime = static_cast<long long>(emax);
    BigRat mrat = eps_val * eprime;
    cpp_int mfloor = br_num(mrat) / br_den(mrat); // both nonnegative here
    if (mfloor > 100000) throw ResourceLimit("split degree too large");
    long long m = static_cast<long long>(mfloor);

    EisensteinSplit out;
    out.common_denominator = eprime;
    out.m = m;
    out.u = tilt_monomial(field->one(), BigRat(1, eprime));
    out.g.assign(m + 1, Poly<FqElement>(G.nvars()));
    for (const auto& [mono, c] : G.terms()) {
        for (const auto& t : c.terms()) {
            BigRat idx_rat = t.exp * eprime;
            cpp_int idx = br_num(idx_rat); // denominator is 1 by choice of e'
            if (idx <= m) {
                out.g[static_cast<long long>(idx)].add_term(mono, fq_embed(t.coeff, field));
            } else if (!out.residual_val || t.exp < *out.residual_val) {
                out.residual_val = t.exp;
            }
        }
    }
    return out;
}

} // namespace padiclab
