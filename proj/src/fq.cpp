#include "padiclab/fq.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "padiclab/fq_tables.hpp"

namespace padiclab {

namespace {

struct Registry {
    std::mutex mu;
    // table fields keyed by (p, r); override fields are not cached
    std::map<std::pair<long long, int>, FqFieldPtr> fields;
    // embedding cache: (src, dst) -> powers of the image of src's generator,
    // img^0 .. img^(r_src - 1), all elements of dst
    std::map<std::pair<const FqField*, const FqField*>, std::vector<FqElement>> embeddings;
    // keeps override fields referenced by the embedding cache alive
    std::vector<FqFieldPtr> pinned;
};

Registry& registry() {
    static Registry reg;
    return reg;
}

const int* table_row(long long p, int r) {
    switch (p) {
        case 2: return tables::kModuli_p2[r];
        case 3: return tables::kModuli_p3[r];
        case 5: return tables::kModuli_p5[r];
        default: return nullptr;
    }
}

std::uint64_t upow(long long b, int e) {
    std::uint64_t r = 1;
    while (e--) r *= std::uint64_t(b);
    return r;
}

// x^e mod p for ints
long long ipow_mod(long long x, long long e, long long p) {
    long long r = 1 % p;
    x %= p;
    while (e > 0) {
        if (e & 1) r = r * x % p;
        x = x * x % p;
        e >>= 1;
    }
    return r;
}

int poly_deg(const std::vector<int>& v) {
    for (int i = int(v.size()) - 1; i >= 0; --i)
        if (v[i] != 0) return i;
    return -1;
}

// extended Euclid over F_p[x]: returns g = gcd and u with u*a = g mod m
struct XgcdResult {
    std::vector<int> g, u;
};

XgcdResult poly_xgcd(std::vector<int> a, std::vector<int> m, long long p) {
    std::vector<int> u0{1}, u1{0};
    std::vector<int> r0 = std::move(a), r1 = std::move(m);
    auto scale_sub = [p](std::vector<int>& x, const std::vector<int>& y, int c, int shift) {
        if (x.size() < y.size() + shift) x.resize(y.size() + shift, 0);
        for (size_t i = 0; i < y.size(); ++i)
            x[i + shift] = int((((x[i + shift] - (long long)c * y[i]) % p) + p) % p);
    };
    while (poly_deg(r1) >= 0) {
        int d0 = poly_deg(r0), d1 = poly_deg(r1);
        if (d0 < d1) {
            std::swap(r0, r1);
            std::swap(u0, u1);
            continue;
        }
        long long inv = ipow_mod(r1[d1], p - 2, p);
        int c = int((long long)r0[d0] * inv % p);
        scale_sub(r0, r1, c, d0 - d1);
        scale_sub(u0, u1, c, d0 - d1);
    }
    return {std::move(r0), std::move(u0)};
}

} // namespace

// ---------------------------------------------------------------- FqField

FqField::FqField(long long p, int r, std::vector<int> modulus, bool table)
    : p_(p), r_(r), table_(table), size_(upow(p, r)), modulus_(std::move(modulus)) {}

std::vector<int> FqField::reduce(std::vector<int> raw) const {
    for (int d = int(raw.size()) - 1; d >= r_; --d) {
        long long c = ((raw[d] % p_) + p_) % p_;
        raw[d] = 0;
        if (c == 0) continue;
        for (int k = 0; k < r_; ++k)
            raw[d - r_ + k] = int((((raw[d - r_ + k] - c * modulus_[k]) % p_) + p_) % p_);
    }
    raw.resize(r_);
    for (int& x : raw) x = int(((x % p_) + p_) % p_);
    return raw;
}

std::vector<int> FqField::mul_raw(const std::vector<int>& a, const std::vector<int>& b) const {
    std::vector<int> out(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j)
            out[i + j] = int((out[i + j] + (long long)a[i] * b[j]) % p_);
    }
    return out;
}

FqElement FqField::zero() const { return FqElement(shared_from_this(), std::vector<int>(r_, 0)); }

FqElement FqField::one() const { return from_int(1); }

FqElement FqField::gen() const {
    std::vector<int> c(r_, 0);
    if (r_ == 1) {
        // the class of x is the root of the degree-1 modulus: x = -m_0
        c[0] = int(((-modulus_[0]) % p_ + p_) % p_);
    } else {
        c[1] = 1;
    }
    return FqElement(shared_from_this(), std::move(c));
}

FqElement FqField::from_int(long long n) const {
    std::vector<int> c(r_, 0);
    c[0] = int(((n % p_) + p_) % p_);
    return FqElement(shared_from_this(), std::move(c));
}

FqElement FqField::from_coeffs(std::vector<int> c) const {
    if (int(c.size()) > r_ && poly_deg(c) >= r_)
        c = reduce(std::move(c));
    c.resize(r_, 0);
    for (int& x : c) x = int(((x % p_) + p_) % p_);
    return FqElement(shared_from_this(), std::move(c));
}

FqElement FqField::element_at(std::uint64_t index) const {
    std::vector<int> c(r_, 0);
    for (int i = r_ - 1; i >= 0; --i) {
        c[i] = int(index % std::uint64_t(p_));
        index /= std::uint64_t(p_);
    }
    return FqElement(shared_from_this(), std::move(c));
}

std::string FqField::str() const {
    std::ostringstream os;
    os << "F_" << p_ << "^" << r_;
    return os.str();
}

// -------------------------------------------------------------- FqElement

FqElement::FqElement(FqFieldPtr field, std::vector<int> coeffs)
    : field_(std::move(field)), coeffs_(std::move(coeffs)) {}

bool FqElement::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](int c) { return c == 0; });
}

bool FqElement::is_one() const {
    if (coeffs_.empty() || coeffs_[0] != 1) return false;
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](int c) { return c == 0; });
}

FqElement FqElement::operator-() const {
    std::vector<int> c(coeffs_);
    long long p = field_->p();
    for (int& x : c) x = int((p - x) % p);
    return FqElement(field_, std::move(c));
}

FqElement operator+(const FqElement& a, const FqElement& b) {
    if (a.field_.get() != b.field_.get()) {
        auto [x, y] = fq_promote(a, b);
        return x + y;
    }
    std::vector<int> c(a.coeffs_);
    long long p = a.field_->p();
    for (size_t i = 0; i < c.size(); ++i) c[i] = int((c[i] + b.coeffs_[i]) % p);
    return FqElement(a.field_, std::move(c));
}

FqElement operator-(const FqElement& a, const FqElement& b) { return a + (-b); }

FqElement operator*(const FqElement& a, const FqElement& b) {
    if (a.field_.get() != b.field_.get()) {
        auto [x, y] = fq_promote(a, b);
        return x * y;
    }
    return FqElement(a.field_, a.field_->reduce(a.field_->mul_raw(a.coeffs_, b.coeffs_)));
}

FqElement operator/(const FqElement& a, const FqElement& b) {
    if (a.field_.get() != b.field_.get()) {
        auto [x, y] = fq_promote(a, b);
        return x / y;
    }
    return a * b.inv();
}

bool operator==(const FqElement& a, const FqElement& b) {
    if (a.field_.get() == b.field_.get()) return a.coeffs_ == b.coeffs_;
    auto [x, y] = fq_promote(a, b);
    return x.coeffs_ == y.coeffs_;
}

FqElement FqElement::inv() const {
    if (is_zero()) throw DivisionByZero("inverse of zero in " + field_->str());
    auto res = poly_xgcd(coeffs_, field_->modulus(), field_->p());
    int d = poly_deg(res.g);
    // gcd is a nonzero constant; normalise u by its inverse
    long long gi = ipow_mod(res.g[d], field_->p() - 2, field_->p());
    std::vector<int> u = field_->reduce(std::move(res.u));
    for (int& x : u) x = int((long long)x * gi % field_->p());
    return FqElement(field_, std::move(u));
}

FqElement FqElement::pow(std::uint64_t e) const {
    FqElement r = field_->one();
    FqElement b = *this;
    while (e > 0) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

std::uint64_t FqElement::index() const {
    std::uint64_t idx = 0;
    for (int c : coeffs_) idx = idx * std::uint64_t(field_->p()) + std::uint64_t(c);
    return idx;
}

std::string FqElement::str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------- tower

namespace {

// requires registry lock held
FqFieldPtr table_field_locked(long long p, int r);

// registers embedding src -> dst given the image of src's generator
void put_embedding_locked(const FqFieldPtr& src, const FqFieldPtr& dst, const FqElement& img) {
    std::vector<FqElement> powers;
    powers.reserve(src->r());
    FqElement acc = dst->one();
    for (int i = 0; i < src->r(); ++i) {
        powers.push_back(acc);
        acc = acc * img;
    }
    registry().embeddings[{src.get(), dst.get()}] = std::move(powers);
}

// evaluates src's modulus at y (an element of another field over the same p)
FqElement modulus_at(const FqFieldPtr& src, const FqElement& y) {
    FqElement acc = y.field()->zero();
    const auto& m = src->modulus();
    for (int i = int(m.size()) - 1; i >= 0; --i)
        acc = acc * y + y.field()->from_int(m[i]);
    return acc;
}

FqFieldPtr table_field_locked(long long p, int r) {
    auto& reg = registry();
    auto it = reg.fields.find({p, r});
    if (it != reg.fields.end()) return it->second;
    const int* row = table_row(p, r);
    if (row == nullptr || r < 1 || r > tables::kMaxDegree)
        throw IncompatibleFields("no modulus table entry for p=" + std::to_string(p) +
                                 ", r=" + std::to_string(r));
    std::vector<int> modulus(row, row + r + 1);
    FqFieldPtr f(new FqField(p, r, std::move(modulus), /*table=*/true));
    reg.fields[{p, r}] = f;
    // eagerly embed every proper divisor field via the norm-compatible power
    // map: gen_d -> gen_r^((p^r-1)/(p^d-1))
    for (int d = 1; d < r; ++d) {
        if (r % d != 0) continue;
        FqFieldPtr sub = table_field_locked(p, d);
        std::uint64_t e = (upow(p, r) - 1) / (upow(p, d) - 1);
        FqElement img = f->gen().pow(e);
        if (!modulus_at(sub, img).is_zero())
            throw Error("table moduli are not norm-compatible (generator bug)");
        put_embedding_locked(sub, f, img);
    }
    return f;
}

// lexicographically least root of src's modulus in dst, by element scan
FqElement least_root_locked(const FqFieldPtr& src, const FqFieldPtr& dst) {
    if (dst->size() > (std::uint64_t(1) << 24))
        throw ResourceLimit("root search space too large for embedding into " + dst->str());
    for (std::uint64_t i = 0; i < dst->size(); ++i) {
        FqElement cand = dst->element_at(i);
        if (modulus_at(src, cand).is_zero()) return cand;
    }
    throw IncompatibleFields("modulus of " + src->str() + " has no root in " + dst->str());
}

} // namespace

FqFieldPtr fq_field(long long p, int r) {
    std::lock_guard<std::mutex> lock(registry().mu);
    return table_field_locked(p, r);
}

FqFieldPtr fq_field_override(long long p, int r, const std::vector<int>& modulus) {
    if (int(modulus.size()) != r + 1 || modulus[r] != 1)
        throw ConfigError("override modulus must be monic of degree r");
    for (int c : modulus)
        if (c < 0 || c >= p) throw ConfigError("override modulus coefficients must lie in [0,p)");
    std::lock_guard<std::mutex> lock(registry().mu);
    FqFieldPtr f(new FqField(p, r, modulus, /*table=*/false));
    registry().pinned.push_back(f);
    // sanity: irreducibility via gcd(x^(p^k)-x, m) checks is implied by the
    // existence of exactly r roots in the table field of degree r; root-find
    // eagerly both ways along the divisor lattice
    for (int d = 1; d <= tables::kMaxDegree; ++d) {
        if (d < r && r % d == 0) {
            FqFieldPtr sub = table_field_locked(p, d);
            put_embedding_locked(sub, f, least_root_locked(sub, f));
        }
        if (d >= r && d % r == 0 && table_row(p, d) != nullptr) {
            FqFieldPtr big = table_field_locked(p, d);
            put_embedding_locked(f, big, least_root_locked(f, big));
        }
    }
    return f;
}

FqElement fq_embed(const FqElement& a, const FqFieldPtr& target) {
    const FqFieldPtr& src = a.field();
    if (src.get() == target.get()) return a;
    if (src->p() != target->p())
        throw IncompatibleFields("cannot embed " + src->str() + " into " + target->str());
    if (target->r() % src->r() != 0)
        throw IncompatibleFields(src->str() + " is not a subfield of " + target->str());
    std::lock_guard<std::mutex> lock(registry().mu);
    auto it = registry().embeddings.find({src.get(), target.get()});
    if (it == registry().embeddings.end())
        throw IncompatibleFields("no cached embedding " + src->str() + " -> " + target->str() +
                                 " (construct fields through fq_field)");
    const auto& powers = it->second;
    FqElement acc = target->zero();
    for (int i = 0; i < src->r(); ++i) {
        int c = a.coeffs()[i];
        if (c == 0) continue;
        acc = acc + powers[i] * target->from_int(c);
    }
    return acc;
}

std::pair<FqElement, FqElement> fq_promote(const FqElement& a, const FqElement& b) {
    const FqFieldPtr& fa = a.field();
    const FqFieldPtr& fb = b.field();
    if (fa.get() == fb.get()) return {a, b};
    if (fa->p() != fb->p())
        throw IncompatibleFields("mixed characteristic: " + fa->str() + " vs " + fb->str());
    if (fb->r() % fa->r() == 0) return {fq_embed(a, fb), b};
    if (fa->r() % fb->r() == 0) return {a, fq_embed(b, fa)};
    int l = std::lcm(fa->r(), fb->r());
    if (l > tables::kMaxDegree)
        throw IncompatibleFields("compositum degree " + std::to_string(l) + " exceeds the table");
    FqFieldPtr big = fq_field(fa->p(), l);
    return {fq_embed(a, big), fq_embed(b, big)};
}

FqElement frobenius_s(const FqElement& a, long long s, bool inverse) {
    if (s < 0) throw Error("frobenius step must be nonnegative");
    int r = a.field()->r();
    long long steps = s % r;
    if (inverse) steps = (r - steps) % r;
    if (steps == 0) return a;
    // one application per step: x -> x^p
    FqElement out = a;
    std::uint64_t p = std::uint64_t(a.field()->p());
    for (long long i = 0; i < steps; ++i) out = out.pow(p);
    return out;
}

std::vector<std::vector<FqElement>> enumerate_proj_points(const FqFieldPtr& field, int N,
                                                          std::uint64_t cap) {
    if (N < 1) throw Error("projective dimension must be >= 1");
    // count = (q^(N+1)-1)/(q-1)
    std::uint64_t q = field->size(), count = 0, qp = 1;
    for (int i = 0; i <= N; ++i) {
        count += qp;
        if (i < N) qp *= q;
    }
    if (count > cap)
        throw ResourceLimit("projective point count " + std::to_string(count) +
                            " exceeds cap " + std::to_string(cap));
    std::vector<std::vector<FqElement>> out;
    out.reserve(count);
    for (int pivot = 0; pivot <= N; ++pivot) {
        int tail = N - pivot;
        std::uint64_t tuples = 1;
        for (int i = 0; i < tail; ++i) tuples *= q;
        for (std::uint64_t t = 0; t < tuples; ++t) {
            std::vector<FqElement> pt;
            pt.reserve(N + 1);
            for (int i = 0; i < pivot; ++i) pt.push_back(field->zero());
            pt.push_back(field->one());
            std::uint64_t rem = t;
            std::uint64_t div = tuples;
            for (int i = 0; i < tail; ++i) {
                div /= q;
                pt.push_back(field->element_at(rem / div));
                rem %= div;
            }
            out.push_back(std::move(pt));
        }
    }
    return out;
}

int field_of_definition(const std::vector<FqElement>& coords, long long s) {
    if (coords.empty()) throw ZeroVector();
    int r = coords[0].field()->r();
    for (int m = 1; m <= r; ++m) {
        bool fixed = true;
        for (const auto& c : coords)
            if (frobenius_s(c, s * m) != c) {
                fixed = false;
                break;
            }
        if (fixed) return m;
    }
    throw Error("no fixing power found (inconsistent coordinate fields)");
}

FqElement fq_parse(const FqFieldPtr& field, const std::string& text) {
    std::string t;
    for (char ch : text)
        if (!isspace((unsigned char)ch)) t += ch;
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ConfigError("expected [c0,c1,...], got '" + text + "'");
    std::vector<int> c;
    std::string body = t.substr(1, t.size() - 2);
    if (!body.empty()) {
        std::istringstream is(body);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            try {
                c.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw ConfigError("bad coefficient '" + tok + "' in '" + text + "'");
            }
        }
    }
    if (int(c.size()) > field->r())
        throw ConfigError("too many coefficients for " + field->str());
    return field->from_coeffs(std::move(c));
}

} // namespace padiclab
