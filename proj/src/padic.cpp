#include "padiclab/padic.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include "padiclab/errors.hpp"

namespace padiclab {

namespace {

cpp_int ipow_cpp(long long p, int k) {
    cpp_int r = 1;
    for (int i = 0; i < k; ++i) r *= p;
    return r;
}

// p-adic valuation of a stored representative; `cap` stands in for "the
// representative vanishes in the window".
int vp_of(cpp_int x, long long p, int cap) {
    if (x == 0) return cap;
    int v = 0;
    cpp_int q, rem;
    while (v < cap) {
        boost::multiprecision::divide_qr(x, cpp_int(p), q, rem);
        if (rem != 0) break;
        x = q;
        ++v;
    }
    return v;
}

// Fixed point of x -> x^p among lifts of c0: the Teichmueller digit of a
// prime-field scalar, modulo pmod = p^cap.
cpp_int teich_scalar(long long p, long long c0, const cpp_int& pmod, int cap) {
    cpp_int x = cpp_int(c0) % pmod;
    if (x < 0) x += pmod;
    for (int i = 0; i <= cap + 2; ++i) {
        cpp_int y = boost::multiprecision::powm(x, cpp_int(p), pmod);
        if (y == x) break;
        x = y;
    }
    return x;
}

} // namespace

struct LocalField::Impl {
    LocalFieldPtr base;      // Eisenstein fields: the unramified base
    std::vector<UVec> eis;   // c_0..c_(e-1) of the Eisenstein polynomial, val >= 1
    std::vector<UVec> gamma; // the unit pi^e / p, as columns
    std::vector<UVec> gamma_inv;
    mutable std::mutex mu;
    mutable std::map<long long, std::vector<UVec>> sigma_pows; // s -> powers of sigma_s(theta)
    mutable std::map<const LocalField*, std::vector<UVec>> emb; // theta_src power images
};

// All raw arithmetic lives here.  A unit is a vector of e columns; column j
// is the UVec of theta-coordinates at pi^j, entries reduced mod p^storage.
struct PadicOps {
    using Mat = std::vector<UVec>;

    // private-state accessors for the free functions below
    static const Mat& mat(const PadicNumber& a) { return a.unit_; }
    static long long shift_of(const PadicNumber& a) { return a.shift_; }
    static const Rat& prec_of(const PadicNumber& a) { return a.abs_prec_; }

    static cpp_int modp(const LocalField& F, const cpp_int& x) {
        cpp_int r = x % F.pmod_;
        if (r < 0) r += F.pmod_;
        return r;
    }

    // ----- UVec layer -----

    static UVec u_zero(const LocalField& F) { return UVec(F.r_, cpp_int(0)); }

    static bool u_is_zero(const UVec& a) {
        for (const auto& x : a)
            if (x != 0) return false;
        return true;
    }

    static UVec u_add(const LocalField& F, const UVec& a, const UVec& b) {
        UVec r(F.r_);
        for (int i = 0; i < F.r_; ++i) r[i] = modp(F, a[i] + b[i]);
        return r;
    }

    static UVec u_sub(const LocalField& F, const UVec& a, const UVec& b) {
        UVec r(F.r_);
        for (int i = 0; i < F.r_; ++i) r[i] = modp(F, a[i] - b[i]);
        return r;
    }

    static UVec u_neg(const LocalField& F, const UVec& a) {
        UVec r(F.r_);
        for (int i = 0; i < F.r_; ++i) r[i] = a[i] == 0 ? cpp_int(0) : F.pmod_ - a[i];
        return r;
    }

    static UVec u_smul(const LocalField& F, const UVec& a, const cpp_int& s) {
        UVec r(F.r_);
        for (int i = 0; i < F.r_; ++i) r[i] = modp(F, a[i] * s);
        return r;
    }

    static UVec u_mul(const LocalField& F, const UVec& a, const UVec& b) {
        std::vector<cpp_int> tmp(2 * F.r_ - 1, cpp_int(0));
        for (int i = 0; i < F.r_; ++i) {
            if (a[i] == 0) continue;
            for (int j = 0; j < F.r_; ++j) {
                if (b[j] == 0) continue;
                tmp[i + j] += a[i] * b[j];
            }
        }
        // reduce by the monic modulus lift
        for (int d = 2 * F.r_ - 2; d >= F.r_; --d) {
            if (tmp[d] == 0) continue;
            cpp_int c = tmp[d] % F.pmod_;
            tmp[d] = 0;
            for (int i = 0; i < F.r_; ++i) tmp[d - F.r_ + i] -= c * F.modulus_lift_[i];
        }
        UVec r(F.r_);
        for (int i = 0; i < F.r_; ++i) r[i] = modp(F, tmp[i]);
        return r;
    }

    static UVec u_pow(const LocalField& F, UVec base, cpp_int k) {
        UVec r = u_zero(F);
        r[0] = 1;
        while (k > 0) {
            if ((k & 1) != 0) r = u_mul(F, r, base);
            k >>= 1;
            if (k > 0) base = u_mul(F, base, base);
        }
        return r;
    }

    static int u_vp(const LocalField& F, const UVec& a) {
        int best = F.p_store_;
        for (const auto& x : a) best = std::min(best, vp_of(x, F.p_, F.p_store_));
        return best;
    }

    static UVec u_div_p(const LocalField& F, const UVec& a, int k) {
        cpp_int pk = ipow_cpp(F.p_, k);
        UVec r(F.r_);
        for (int i = 0; i < F.r_; ++i) {
            if (a[i] % pk != 0) throw Error("internal: inexact division by p^k");
            r[i] = a[i] / pk;
        }
        return r;
    }

    static FqElement u_residue(const LocalField& F, const UVec& a) {
        std::vector<int> c(F.r_);
        for (int i = 0; i < F.r_; ++i) c[i] = static_cast<int>(a[i] % F.p_);
        return F.residue_->from_coeffs(std::move(c));
    }

    static UVec u_lift(const LocalField& F, const FqElement& a) {
        UVec r = u_zero(F);
        const auto& c = a.coeffs();
        for (size_t i = 0; i < c.size() && i < static_cast<size_t>(F.r_); ++i) r[i] = c[i];
        return r;
    }

    // ----- unit-matrix layer -----

    static Mat m_zero(const LocalField& F) { return Mat(F.e_, u_zero(F)); }

    static Mat m_one(const LocalField& F) {
        Mat m = m_zero(F);
        m[0][0] = 1;
        return m;
    }

    static Mat m_add(const LocalField& F, const Mat& a, const Mat& b) {
        Mat r(F.e_);
        for (int j = 0; j < F.e_; ++j) r[j] = u_add(F, a[j], b[j]);
        return r;
    }

    static Mat m_neg(const LocalField& F, const Mat& a) {
        Mat r(F.e_);
        for (int j = 0; j < F.e_; ++j) r[j] = u_neg(F, a[j]);
        return r;
    }

    static Mat m_umul(const LocalField& F, const Mat& a, const UVec& s) {
        Mat r(F.e_);
        for (int j = 0; j < F.e_; ++j) r[j] = u_mul(F, a[j], s);
        return r;
    }

    static Mat m_mul(const LocalField& F, const Mat& a, const Mat& b) {
        if (F.e_ == 1) return Mat{u_mul(F, a[0], b[0])};
        std::vector<UVec> tmp(2 * F.e_ - 1, u_zero(F));
        for (int i = 0; i < F.e_; ++i) {
            if (u_is_zero(a[i])) continue;
            for (int j = 0; j < F.e_; ++j) {
                if (u_is_zero(b[j])) continue;
                tmp[i + j] = u_add(F, tmp[i + j], u_mul(F, a[i], b[j]));
            }
        }
        // pi^e = -sum_i eis[i] pi^i
        const auto& eis = F.impl_->eis;
        for (int d = 2 * F.e_ - 2; d >= F.e_; --d) {
            if (u_is_zero(tmp[d])) continue;
            for (int i = 0; i < F.e_; ++i)
                tmp[d - F.e_ + i] = u_sub(F, tmp[d - F.e_ + i], u_mul(F, tmp[d], eis[i]));
            tmp[d] = u_zero(F);
        }
        tmp.resize(F.e_);
        return tmp;
    }

    static Mat m_pow(const LocalField& F, Mat base, long long k) {
        Mat r = m_one(F);
        while (k > 0) {
            if (k & 1) r = m_mul(F, r, base);
            k >>= 1;
            if (k > 0) base = m_mul(F, base, base);
        }
        return r;
    }

    // multiply by pi^k, k >= 0
    static Mat m_mul_pi(const LocalField& F, Mat m, long long k) {
        if (k == 0) return m;
        if (F.e_ == 1) {
            // pi = p: shift digits
            if (k >= F.p_store_) return m_zero(F);
            cpp_int pk = ipow_cpp(F.p_, static_cast<int>(k));
            for (auto& x : m[0]) x = modp(F, x * pk);
            return m;
        }
        const auto& eis = F.impl_->eis;
        for (long long t = 0; t < k; ++t) {
            UVec top = m[F.e_ - 1];
            for (int j = F.e_ - 1; j >= 1; --j) m[j] = m[j - 1];
            m[0] = u_zero(F);
            if (!u_is_zero(top)) {
                for (int i = 0; i < F.e_; ++i) m[i] = u_sub(F, m[i], u_mul(F, top, eis[i]));
            }
        }
        return m;
    }

    // exact division by pi^k; the representative must have pi-valuation >= k
    static Mat m_div_pi(const LocalField& F, const Mat& m, long long k) {
        if (k == 0) return m;
        if (F.e_ == 1) {
            return Mat{u_div_p(F, m[0], static_cast<int>(k))};
        }
        long long mm = (F.e_ - (k % F.e_)) % F.e_;
        long long a = (k + mm) / F.e_;
        Mat t = m_mul_pi(F, m, mm);
        if (a > 0) {
            t = m_mul(F, t, m_pow(F, F.impl_->gamma_inv, a));
            for (int j = 0; j < F.e_; ++j) t[j] = u_div_p(F, t[j], static_cast<int>(a));
        }
        return t;
    }

    // pi-valuation of the representative, in [0, e*p_store]
    static long long m_pival(const LocalField& F, const Mat& m) {
        long long best = static_cast<long long>(F.e_) * F.p_store_;
        for (int j = 0; j < F.e_; ++j) {
            long long v = static_cast<long long>(F.e_) * u_vp(F, m[j]) + j;
            best = std::min(best, v);
        }
        return std::min(best, static_cast<long long>(F.e_) * F.p_store_);
    }

    // inverse of a unit (column 0 invertible mod p) by Newton iteration
    static Mat m_inv(const LocalField& F, const Mat& m) {
        FqElement r0 = u_residue(F, m[0]);
        if (r0.is_zero()) throw Error("internal: inverting a non-unit");
        Mat x = m_zero(F);
        x[0] = u_lift(F, r0.inv());
        Mat one = m_one(F);
        for (int it = 0; it < 64; ++it) {
            Mat prod = m_mul(F, m, x);
            bool done = true;
            for (int j = 0; j < F.e_ && done; ++j)
                if (prod[j] != one[j]) done = false;
            if (done) return x;
            // x <- x (2 - m x)
            Mat err(F.e_);
            for (int j = 0; j < F.e_; ++j) err[j] = u_sub(F, one[j], prod[j]);
            x = m_add(F, x, m_mul(F, x, err));
        }
        throw NonConvergence("unit inversion did not stabilise");
    }

    // ----- element layer -----

    static PadicNumber make_zero(const LocalFieldPtr& F) {
        PadicNumber x;
        x.field_ = F;
        x.state_ = PadicNumber::State::kExactZero;
        return x;
    }

    static PadicNumber make_below(const LocalFieldPtr& F, const Rat& prec) {
        PadicNumber x;
        x.field_ = F;
        x.state_ = PadicNumber::State::kBelowPrecision;
        x.abs_prec_ = prec;
        return x;
    }

    // Normalise a raw (shift, matrix) pair into an element certified to
    // min(prec, window).  Factors the representative's pi-valuation into the
    // shift, so regular elements always carry a unit.
    static PadicNumber make(const LocalFieldPtr& Fp, Mat m, long long shift, Rat prec) {
        const LocalField& F = *Fp;
        Rat window_cap = Rat(shift, F.e_) + Rat(F.p_store_);
        if (prec > window_cap) prec = window_cap;
        long long pv = m_pival(F, m);
        if (pv >= static_cast<long long>(F.e_) * F.p_store_) return make_below(Fp, prec);
        Rat v(shift + pv, F.e_);
        if (v >= prec) return make_below(Fp, prec);
        if (pv > 0) {
            m = m_div_pi(F, m, pv);
            shift += pv;
        }
        PadicNumber x;
        x.field_ = Fp;
        x.state_ = PadicNumber::State::kRegular;
        x.abs_prec_ = prec;
        x.shift_ = shift;
        x.unit_ = std::move(m);
        return x;
    }

    static Rat val_rat(const PadicNumber& a) { return Rat(a.shift_, a.field_->e_); }

    // ----- mixed-field plumbing -----

    static void require_same_p(const PadicNumber& a, const PadicNumber& b) {
        if (a.field_->p_ != b.field_->p_)
            throw IncompatibleFields("elements live over different primes");
    }

    // powers of sigma_s(theta) for the unramified frobenius automorphism
    static const std::vector<UVec>& sigma_powers(const LocalFieldPtr& Fp, long long sp) {
        const LocalField& F = *Fp;
        {
            std::lock_guard<std::mutex> lk(F.impl_->mu);
            auto it = F.impl_->sigma_pows.find(sp);
            if (it != F.impl_->sigma_pows.end()) return it->second;
        }
        // sigma_s(theta): the root of the lifted modulus over the residue
        // image theta^(p^s)
        std::vector<PadicNumber> f;
        f.reserve(F.r_ + 1);
        for (int i = 0; i <= F.r_; ++i) f.push_back(Fp->from_cpp(F.modulus_lift_[i]));
        FqElement seed_res = frobenius_s(F.residue_->gen(), sp);
        auto seed = m_zero(F);
        seed[0] = u_lift(F, seed_res);
        PadicNumber root = hensel_root(f, make(Fp, std::move(seed), 0, Rat(F.p_store_)));
        std::vector<UVec> powers(F.r_);
        for (int i = 0; i < F.r_; ++i) powers[i] = u_pow(F, root.unit_[0], i);
        std::lock_guard<std::mutex> lk(F.impl_->mu);
        auto res = F.impl_->sigma_pows.emplace(sp, std::move(powers));
        return res.first->second;
    }

    // powers of the image of theta_src inside an unramified target
    static const std::vector<UVec>& emb_powers(const LocalFieldPtr& Tp, const LocalField& S) {
        const LocalField& T = *Tp;
        std::lock_guard<std::mutex> lk(T.impl_->mu);
        auto it = T.impl_->emb.find(&S);
        if (it != T.impl_->emb.end()) return it->second;

        // root of the lifted small modulus whose residue is the embedded
        // residue generator
        std::vector<PadicNumber> f;
        const auto& mod = S.residue_->modulus();
        f.reserve(mod.size());
        for (int c : mod) f.push_back(Tp->from_cpp(teich_scalar(T.p_, c, T.pmod_, T.p_store_)));
        FqElement seed_res = fq_embed(S.residue_->gen(), T.residue_);
        Mat seed = m_zero(T);
        seed[0] = u_lift(T, seed_res);
        PadicNumber root = hensel_root(f, make(Tp, std::move(seed), 0, Rat(T.p_store_)));
        if (root.state_ != PadicNumber::State::kRegular || root.shift_ != 0)
            throw Error("internal: embedding root is not a unit");

        std::vector<UVec> pw(S.r_);
        for (int i = 0; i < S.r_; ++i) pw[i] = u_pow(T, root.unit_[0], i);
        auto res = T.impl_->emb.emplace(&S, std::move(pw));
        return res.first->second;
    }

    static PadicNumber embed(const PadicNumber& a, const LocalFieldPtr& Tp) {
        const LocalFieldPtr& Sp = a.field_;
        if (Sp == Tp) return a;
        const LocalField& S = *Sp;
        const LocalField& T = *Tp;
        if (S.p_ != T.p_) throw IncompatibleFields("embedding across different primes");

        if (a.state_ == PadicNumber::State::kExactZero) return make_zero(Tp);
        if (a.state_ == PadicNumber::State::kBelowPrecision) return make_below(Tp, a.abs_prec_);

        if (T.e_ == 1) {
            if (S.e_ != 1)
                throw IncompatibleFields("cannot embed a ramified field into an unramified one");
            if (T.r_ % S.r_ != 0)
                throw IncompatibleFields("residue degree " + std::to_string(S.r_) +
                                         " does not divide " + std::to_string(T.r_));
            UVec col;
            if (S.r_ == T.r_) {
                // same tower level, possibly a different storage window
                col = u_zero(T);
                for (int i = 0; i < S.r_; ++i) col[i] = modp(T, a.unit_[0][i]);
            } else {
                const auto& pw = emb_powers(Tp, S);
                col = u_zero(T);
                for (int i = 0; i < S.r_; ++i)
                    if (a.unit_[0][i] != 0) col = u_add(T, col, u_smul(T, pw[i], a.unit_[0][i]));
            }
            return make(Tp, Mat{std::move(col)}, a.shift_, a.abs_prec_);
        }

        // ramified target: go through its unramified base
        if (S.e_ != 1) throw IncompatibleFields("distinct ramified fields are incompatible");
        PadicNumber b = embed(a, T.impl_->base);
        UVec col = u_zero(T);
        for (int i = 0; i < T.r_; ++i) col[i] = modp(T, b.unit_[0][i]);
        Mat m = m_zero(T);
        m[0] = std::move(col);
        // p^s = pi^(e s) gamma^(-s)
        long long s = b.shift_;
        if (s > 0) m = m_mul(T, m, m_pow(T, T.impl_->gamma_inv, s));
        else if (s < 0) m = m_mul(T, m, m_pow(T, T.impl_->gamma, -s));
        return make(Tp, std::move(m), s * T.e_, a.abs_prec_);
    }

    static std::pair<PadicNumber, PadicNumber> promote(const PadicNumber& a,
                                                       const PadicNumber& b) {
        if (a.field_ == b.field_) return {a, b};
        require_same_p(a, b);
        const LocalField& A = *a.field_;
        const LocalField& B = *b.field_;
        if (A.e_ > 1 && B.e_ > 1)
            throw IncompatibleFields("distinct ramified fields are incompatible");
        if (A.e_ > 1) return {a, embed(b, a.field_)};
        if (B.e_ > 1) return {embed(a, b.field_), b};
        long long g = std::gcd(static_cast<long long>(A.r_), static_cast<long long>(B.r_));
        long long l = static_cast<long long>(A.r_) / g * B.r_;
        if (l > 12)
            throw IncompatibleFields("no tower field of residue degree " + std::to_string(l));
        int prec = std::max(A.prec_pi_, B.prec_pi_);
        LocalFieldPtr T = local_field(A.p_, static_cast<int>(l), prec);
        return {embed(a, T), embed(b, T)};
    }
};

// ------------------------------------------------------------------
// LocalField

LocalField::LocalField(long long p, int r, int e, int prec_pi)
    : p_(p), r_(r), e_(e), prec_pi_(prec_pi), impl_(new Impl) {
    if (prec_pi < 4) throw ConfigError("precision must be at least 4 uniformizer digits");
    p_store_ = static_cast<int>((prec_pi + e - 1) / e) + 2;
    pmod_ = ipow_cpp(p, p_store_);
}

LocalField::~LocalField() = default;

PadicNumber LocalField::zero() const { return PadicOps::make_zero(shared_from_this()); }

PadicNumber LocalField::one() const { return from_int(1); }

PadicNumber LocalField::from_int(long long n) const { return from_cpp(cpp_int(n)); }

PadicNumber LocalField::from_cpp(const cpp_int& n) const {
    auto self = shared_from_this();
    if (n == 0) return PadicOps::make_zero(self);
    cpp_int m = n;
    long long v = 0;
    cpp_int q, rem;
    for (;;) {
        boost::multiprecision::divide_qr(m, cpp_int(p_), q, rem);
        if (rem != 0) break;
        m = q;
        ++v;
    }
    auto mat = PadicOps::m_zero(*this);
    mat[0][0] = PadicOps::modp(*this, m);
    return PadicOps::make(self, std::move(mat), v * e_, Rat(v) + default_prec());
}

PadicNumber LocalField::theta(int k) const {
    auto self = shared_from_this();
    UVec g = PadicOps::u_zero(*this);
    if (r_ == 1) g[0] = 1;
    else g[std::min(1, r_ - 1)] = 1;
    auto mat = PadicOps::m_zero(*this);
    mat[0] = PadicOps::u_pow(*this, g, k);
    return PadicOps::make(self, std::move(mat), 0, default_prec());
}

PadicNumber LocalField::uniformizer() const {
    if (e_ == 1) return from_int(p_);
    auto mat = PadicOps::m_zero(*this);
    mat[0][0] = 1;
    return PadicOps::make(shared_from_this(), std::move(mat), 1, Rat(1, e_) + default_prec());
}

PadicNumber LocalField::from_coords(const std::vector<cpp_int>& c) const {
    auto self = shared_from_this();
    if (c.size() > static_cast<size_t>(r_) * e_)
        throw InvalidDegree("too many coordinates for this field");
    bool all_zero = true;
    for (const auto& x : c)
        if (x != 0) all_zero = false;
    if (all_zero) return PadicOps::make_zero(self);
    auto mat = PadicOps::m_zero(*this);
    for (size_t t = 0; t < c.size(); ++t)
        mat[t / r_][t % r_] = PadicOps::modp(*this, c[t]);
    return PadicOps::make(self, std::move(mat), 0, default_prec());
}

std::string LocalField::str() const {
    std::ostringstream os;
    os << "Q_" << p_;
    if (r_ > 1 || e_ > 1) {
        os << "(";
        bool first = true;
        if (r_ > 1) {
            os << "ur=" << r_;
            first = false;
        }
        if (e_ > 1) os << (first ? "" : ",") << "eis=" << e_;
        os << ")";
    }
    return os.str();
}

namespace {
struct UnramKey {
    long long p;
    int r;
    int prec;
    bool operator<(const UnramKey& o) const {
        return std::tie(p, r, prec) < std::tie(o.p, o.r, o.prec);
    }
};
std::mutex g_field_mu;
std::map<UnramKey, LocalFieldPtr>& field_registry() {
    static std::map<UnramKey, LocalFieldPtr> reg;
    return reg;
}
} // namespace

LocalFieldPtr local_field(long long p, int r, int prec_pi) {
    std::lock_guard<std::mutex> lk(g_field_mu);
    auto& reg = field_registry();
    UnramKey key{p, r, prec_pi};
    auto it = reg.find(key);
    if (it != reg.end()) return it->second;

    FqFieldPtr res = fq_field(p, r); // validates p and r
    auto F = std::shared_ptr<LocalField>(new LocalField(p, r, 1, prec_pi));
    F->residue_ = res;
    F->modulus_lift_.resize(r + 1);
    for (int i = 0; i <= r; ++i)
        F->modulus_lift_[i] = teich_scalar(p, res->modulus()[i], F->pmod_, F->p_store_);
    reg.emplace(key, F);
    return F;
}

LocalFieldPtr eisenstein_step(const LocalFieldPtr& U, const std::vector<PadicNumber>& coeffs,
                              int prec_pi) {
    if (!U || U->e() != 1) throw ConfigError("eisenstein base must be unramified");
    if (coeffs.size() < 3) throw ConfigError("eisenstein degree must be at least 2");
    int e = static_cast<int>(coeffs.size()) - 1;

    auto F = std::shared_ptr<LocalField>(new LocalField(U->p(), U->r(), e, prec_pi));
    if (U->storage_digits() < F->p_store_)
        throw ConfigError("base field precision too small for this eisenstein step");
    F->residue_ = U->residue_field();
    F->modulus_lift_.resize(U->r() + 1);
    for (int i = 0; i <= U->r(); ++i)
        F->modulus_lift_[i] = U->modulus_lift()[i] % F->pmod();
    F->impl_->base = U;

    // validate and strip the coefficients: monic, inner vals >= 1, val(c_0) = 1,
    // and every coefficient certified through F's whole storage window (the
    // defining relation is treated as exact there)
    auto coeff_uvec = [&](const PadicNumber& c, int idx) -> UVec {
        PadicNumber cc = padic_embed(c, U);
        if (!cc.is_exact_zero() && cc.abs_prec() < Valu(Rat(F->storage_digits())))
            throw ConfigError("eisenstein coefficient " + std::to_string(idx) +
                              " is not certified through the working window");
        if (cc.is_zero_at_precision()) return PadicOps::u_zero(*F);
        Rat v = PadicOps::val_rat(cc);
        if (v < Rat(1))
            throw ConfigError("eisenstein coefficient " + std::to_string(idx) +
                              " must have valuation >= 1");
        // materialise integral coordinates in F's window
        UVec out = PadicOps::u_zero(*F);
        cpp_int pv = ipow_cpp(U->p(), static_cast<int>(v.numerator()));
        for (int i = 0; i < U->r(); ++i)
            out[i] = PadicOps::modp(*F, PadicOps::mat(cc)[0][i] * pv);
        return out;
    };

    PadicNumber lead = padic_embed(coeffs.back(), U);
    if (!indistinguishable(lead, U->one()))
        throw ConfigError("eisenstein polynomial must be monic");
    PadicNumber c0 = padic_embed(coeffs[0], U);
    if (c0.is_zero_at_precision() || PadicOps::val_rat(c0) != Rat(1))
        throw ConfigError("eisenstein constant term must have valuation exactly 1");

    F->impl_->eis.resize(e);
    for (int i = 0; i < e; ++i) F->impl_->eis[i] = coeff_uvec(coeffs[i], i);

    // gamma = pi^e / p = -(c_0/p + (c_1/p) pi + ...), a unit
    F->impl_->gamma.resize(e);
    for (int i = 0; i < e; ++i)
        F->impl_->gamma[i] = PadicOps::u_neg(*F, PadicOps::u_div_p(*F, F->impl_->eis[i], 1));
    F->impl_->gamma_inv = PadicOps::m_inv(*F, F->impl_->gamma);
    return F;
}

// ------------------------------------------------------------------
// PadicNumber

Valu PadicNumber::val() const {
    switch (state_) {
        case State::kExactZero: return Valu::infinity();
        case State::kBelowPrecision:
            throw PrecisionLoss("valuation of a value indistinguishable from zero (val >= " +
                                rat_str(abs_prec_) + ")");
        case State::kRegular: return Valu(PadicOps::val_rat(*this));
    }
    throw Error("internal: bad state");
}

Valu PadicNumber::val_lower_bound() const {
    switch (state_) {
        case State::kExactZero: return Valu::infinity();
        case State::kBelowPrecision: return Valu(abs_prec_);
        case State::kRegular: return Valu(PadicOps::val_rat(*this));
    }
    throw Error("internal: bad state");
}

std::string PadicNumber::norm_str() const { return val().norm_str(field_->p()); }

Valu PadicNumber::abs_prec() const {
    if (state_ == State::kExactZero) return Valu::infinity();
    return Valu(abs_prec_);
}

PadicNumber PadicNumber::operator-() const {
    if (state_ != State::kRegular) return *this;
    PadicNumber r = *this;
    r.unit_ = PadicOps::m_neg(*field_, unit_);
    return r;
}

PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
    if (!a.field_ || !b.field_) throw Error("internal: uninitialised element");
    auto [x, y] = PadicOps::promote(a, b);
    const LocalFieldPtr& Fp = x.field_;
    const LocalField& F = *Fp;
    using St = PadicNumber::State;
    if (x.state_ == St::kExactZero) return y;
    if (y.state_ == St::kExactZero) return x;
    if (x.state_ == St::kBelowPrecision || y.state_ == St::kBelowPrecision) {
        Rat prec = std::min(x.abs_prec_, y.abs_prec_);
        if (x.state_ == St::kRegular) return x.truncated(prec);
        if (y.state_ == St::kRegular) return y.truncated(prec);
        return PadicOps::make_below(Fp, prec);
    }
    long long s = std::min(x.shift_, y.shift_);
    Rat prec = std::min(x.abs_prec_, y.abs_prec_);
    long long window = static_cast<long long>(F.e()) * F.storage_digits();
    auto aligned = [&](const PadicNumber& z) {
        long long d = z.shift_ - s;
        if (d >= window) return PadicOps::m_zero(F);
        return PadicOps::m_mul_pi(F, z.unit_, d);
    };
    auto m = PadicOps::m_add(F, aligned(x), aligned(y));
    return PadicOps::make(Fp, std::move(m), s, prec);
}

PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }

PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
    if (!a.field_ || !b.field_) throw Error("internal: uninitialised element");
    auto [x, y] = PadicOps::promote(a, b);
    const LocalFieldPtr& Fp = x.field_;
    using St = PadicNumber::State;
    if (x.state_ == St::kExactZero || y.state_ == St::kExactZero)
        return PadicOps::make_zero(Fp);
    if (x.state_ == St::kBelowPrecision || y.state_ == St::kBelowPrecision) {
        // val >= val_lb(x) + val_lb(y); nothing else is known
        Rat lbx = x.state_ == St::kRegular ? PadicOps::val_rat(x) : x.abs_prec_;
        Rat lby = y.state_ == St::kRegular ? PadicOps::val_rat(y) : y.abs_prec_;
        return PadicOps::make_below(Fp, lbx + lby);
    }
    Rat vx = PadicOps::val_rat(x), vy = PadicOps::val_rat(y);
    Rat prec = std::min(vx + y.abs_prec_, vy + x.abs_prec_);
    auto m = PadicOps::m_mul(*Fp, x.unit_, y.unit_);
    return PadicOps::make(Fp, std::move(m), x.shift_ + y.shift_, prec);
}

PadicNumber PadicNumber::inv() const {
    switch (state_) {
        case State::kExactZero: throw DivisionByZero();
        case State::kBelowPrecision:
            throw PrecisionLoss("dividing by a value indistinguishable from zero");
        case State::kRegular: break;
    }
    Rat v = PadicOps::val_rat(*this);
    Rat prec = abs_prec_ - v - v; // relative precision is preserved
    auto m = PadicOps::m_inv(*field_, unit_);
    return PadicOps::make(field_, std::move(m), -shift_, prec);
}

PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) {
    auto [x, y] = PadicOps::promote(a, b);
    return x * y.inv();
}

PadicNumber PadicNumber::pow(std::uint64_t e) const {
    PadicNumber r = field_->one();
    PadicNumber base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return r;
}

PadicNumber PadicNumber::truncated(const Rat& prec) const {
    if (state_ == State::kExactZero) return PadicOps::make_below(field_, prec);
    if (state_ == State::kBelowPrecision)
        return PadicOps::make_below(field_, std::min(abs_prec_, prec));
    if (prec >= abs_prec_) return *this;
    if (PadicOps::val_rat(*this) >= prec) return PadicOps::make_below(field_, prec);
    PadicNumber r = *this;
    r.abs_prec_ = prec;
    return r;
}

std::string PadicNumber::str() const {
    const LocalField& F = *field_;
    std::ostringstream os;
    if (state_ == State::kExactZero) return "0";
    if (state_ == State::kBelowPrecision) {
        os << "O(" << F.p() << "^" << rat_str(abs_prec_) << ")";
        return os.str();
    }
    // certified digits only
    Rat rel = (abs_prec_ - PadicOps::val_rat(*this)) * F.e();
    long long wc = rel.numerator() / rel.denominator(); // integral by construction
    if (F.e() == 1) os << F.p() << "^" << shift_ << "*";
    else os << "pi^" << shift_ << "*";
    os << "(";
    for (int j = 0; j < F.e(); ++j) {
        long long digits = (wc - j + F.e() - 1) / F.e();
        if (digits < 0) digits = 0;
        cpp_int mask = ipow_cpp(F.p(), static_cast<int>(std::min<long long>(
                                           digits, F.storage_digits())));
        if (j > 0) os << "; ";
        os << "[";
        for (int i = 0; i < F.r(); ++i) {
            if (i > 0) os << ",";
            os << (mask == 1 ? cpp_int(0) : unit_[j][i] % mask);
        }
        os << "]";
    }
    os << ") + O(" << F.p() << "^" << rat_str(abs_prec_) << ")";
    return os.str();
}

// ------------------------------------------------------------------
// free functions

ValNorm valuation_norm(const PadicNumber& a) {
    Valu v = a.val();
    return ValNorm{v, v.norm_str(a.field()->p())};
}

FqElement reduce_residue(const PadicNumber& a) {
    const LocalField& F = *a.field();
    switch (a.state()) {
        case PadicNumber::State::kExactZero: return F.residue_field()->zero();
        case PadicNumber::State::kBelowPrecision:
            if (Valu(Rat(0)) < a.abs_prec()) return F.residue_field()->zero();
            throw PrecisionLoss("cannot certify integrality at this precision");
        case PadicNumber::State::kRegular: break;
    }
    Rat v = a.val().finite();
    if (v < Rat(0)) throw NegativeValuation("residue of an element with val " + rat_str(v));
    if (v > Rat(0)) return F.residue_field()->zero();
    return PadicOps::u_residue(F, PadicOps::mat(a)[0]);
}

PadicNumber teichmuller_lift(const FqElement& a, const LocalFieldPtr& F) {
    if (a.is_zero()) return F->zero();
    FqElement res = fq_embed(a, F->residue_field());
    UVec z = PadicOps::u_lift(*F, res);
    cpp_int q = 1;
    for (int i = 0; i < F->residue_field()->r(); ++i) q *= F->p();
    for (int it = 0; it <= F->storage_digits() + 2; ++it) {
        UVec z2 = PadicOps::u_pow(*F, z, q);
        if (z2 == z) break;
        z = std::move(z2);
    }
    auto m = PadicOps::m_zero(*F);
    m[0] = std::move(z);
    return PadicOps::make(F, std::move(m), 0, F->default_prec());
}

PadicNumber poly_eval(const std::vector<PadicNumber>& f, const PadicNumber& x) {
    if (f.empty()) return x.field()->zero();
    PadicNumber acc = f.back();
    for (size_t i = f.size() - 1; i-- > 0;) acc = acc * x + f[i];
    return acc;
}

std::vector<PadicNumber> poly_derivative(const std::vector<PadicNumber>& f) {
    std::vector<PadicNumber> d;
    for (size_t i = 1; i < f.size(); ++i) {
        PadicNumber c = f[i];
        d.push_back(c * c.field()->from_int(static_cast<long long>(i)));
    }
    return d;
}

PadicNumber hensel_root(const std::vector<PadicNumber>& f, const PadicNumber& x0) {
    if (f.size() < 2) throw InvalidDegree("hensel root needs a non-constant polynomial");
    // settle everything into one field
    PadicNumber x = x0;
    for (const auto& c : f) x = PadicOps::promote(x, c).first;
    std::vector<PadicNumber> g;
    g.reserve(f.size());
    for (const auto& c : f) g.push_back(padic_embed(c, x.field()));
    x = padic_embed(x0, x.field());

    std::vector<PadicNumber> dg = poly_derivative(g);
    PadicNumber fx = poly_eval(g, x);
    PadicNumber dfx = poly_eval(dg, x);
    if (dfx.state() != PadicNumber::State::kRegular)
        throw HenselPreconditionFailed("derivative is indistinguishable from zero at the seed");
    Rat d0 = dfx.val().finite();
    if (!(Valu(d0 + d0) < fx.val_lower_bound()))
        throw HenselPreconditionFailed("val(f(x0)) = " +
                                       (fx.val_lower_bound().is_infinite()
                                            ? std::string("inf")
                                            : rat_str(fx.val_lower_bound().finite())) +
                                       " is not greater than 2 val(f'(x0)) = " +
                                       rat_str(d0 + d0));
    for (int it = 0; it < 500; ++it) {
        if (fx.is_zero_at_precision()) return x;
        dfx = poly_eval(dg, x);
        PadicNumber step = fx / dfx;
        if (step.is_zero_at_precision()) return x; // at the precision of x already
        x = x - step;
        fx = poly_eval(g, x);
    }
    throw NonConvergence("newton iteration did not reach the precision window");
}

PadicNumber frobenius_automorphism_sigma(const PadicNumber& a, long long s) {
    const LocalFieldPtr& Fp = a.field();
    const LocalField& F = *Fp;
    if (F.ramified())
        throw RamifiedFieldUnsupported(
            "the residue frobenius lifts canonically only over unramified fields");
    long long r = F.r();
    long long sp = ((s % r) + r) % r;
    if (sp == 0 || a.state() != PadicNumber::State::kRegular) return a;

    const std::vector<UVec>& pw = PadicOps::sigma_powers(Fp, sp);

    // coordinates over theta are Z_p scalars, fixed by sigma
    UVec col = PadicOps::u_zero(F);
    const UVec& src = PadicOps::mat(a)[0];
    for (int i = 0; i < F.r(); ++i)
        if (src[i] != 0) col = PadicOps::u_add(F, col, PadicOps::u_smul(F, pw[i], src[i]));
    PadicOps::Mat m{std::move(col)};
    return PadicOps::make(Fp, std::move(m), PadicOps::shift_of(a), PadicOps::prec_of(a));
}

PadicNumber padic_embed(const PadicNumber& a, const LocalFieldPtr& target) {
    return PadicOps::embed(a, target);
}

std::pair<PadicNumber, PadicNumber> padic_promote(const PadicNumber& a, const PadicNumber& b) {
    return PadicOps::promote(a, b);
}

bool indistinguishable(const PadicNumber& a, const PadicNumber& b) {
    PadicNumber d = a - b;
    return d.is_zero_at_precision();
}

std::vector<cpp_int> integral_coords(const PadicNumber& a, int k) {
    const LocalField& F = *a.field();
    if (k > F.storage_digits())
        throw PrecisionLoss("coordinates requested beyond the storage window");
    cpp_int pk = ipow_cpp(F.p(), k);
    std::vector<cpp_int> out(static_cast<size_t>(F.r()) * F.e(), cpp_int(0));
    if (a.state() == PadicNumber::State::kExactZero) return out;
    if (!(Valu(Rat(k)) <= a.abs_prec()))
        throw PrecisionLoss("coordinates requested beyond the certified window");
    if (a.state() == PadicNumber::State::kBelowPrecision) return out;
    Rat v = a.val().finite();
    if (v < Rat(0)) throw NegativeValuation("integral coordinates of val " + rat_str(v));
    long long shift = PadicOps::shift_of(a);
    long long window = static_cast<long long>(F.e()) * F.storage_digits();
    PadicOps::Mat m = PadicOps::mat(a);
    m = PadicOps::m_mul_pi(F, std::move(m), std::min(shift, window));
    for (int j = 0; j < F.e(); ++j)
        for (int i = 0; i < F.r(); ++i) out[static_cast<size_t>(j) * F.r() + i] = m[j][i] % pk;
    return out;
}

} // namespace padiclab
