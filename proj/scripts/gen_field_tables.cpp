// Generates include/padiclab/fq_tables.hpp: for p in {2,3,5} and degree
// n <= 12, the lexicographically least (in the standard word order) monic
// primitive polynomial over F_p whose roots are norm-compatible with the
// entries for all proper divisors of n.  These are the classical Conway
// polynomials; norm-compatibility is what makes the power embeddings between
// table fields commute.
//
// Build and run from the repo root:
//   g++ -O2 -std=c++20 scripts/gen_field_tables.cpp -o /tmp/gen_field_tables
//   /tmp/gen_field_tables > include/padiclab/fq_tables.hpp
#include <cstdint>
#include <iostream>
#include <vector>

using std::vector;
using i64 = long long;

namespace {

int P; // active characteristic

// polynomials are coefficient vectors, low to high, reduced mod P
vector<int> mul_mod(const vector<int>& a, const vector<int>& b, const vector<int>& f) {
    vector<int> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = int((r[i + j] + i64(a[i]) * b[j]) % P);
    // reduce mod monic f
    int n = int(f.size()) - 1;
    for (int d = int(r.size()) - 1; d >= n; --d) {
        int c = r[d];
        if (c == 0) continue;
        r[d] = 0;
        for (int k = 0; k < n; ++k)
            r[d - n + k] = int(((r[d - n + k] - i64(c) * f[k]) % P + P) % P);
    }
    r.resize(n);
    return r;
}

vector<int> pow_mod(vector<int> base, i64 e, const vector<int>& f) {
    vector<int> r{1};
    r.resize(f.size() - 1, 0);
    while (e > 0) {
        if (e & 1) r = mul_mod(r, base, f);
        base = mul_mod(base, base, f);
        e >>= 1;
    }
    return r;
}

bool is_x(const vector<int>& a) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != (i == 1 ? 1 : 0)) return false;
    return true;
}

bool is_one(const vector<int>& a) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != (i == 0 ? 1 : 0)) return false;
    return true;
}

vector<int> poly_gcd(vector<int> a, vector<int> b) {
    auto deg = [](const vector<int>& v) {
        for (int i = int(v.size()) - 1; i >= 0; --i)
            if (v[i] != 0) return i;
        return -1;
    };
    while (deg(b) >= 0) {
        int da = deg(a), db = deg(b);
        if (da < db) { std::swap(a, b); continue; }
        // a -= lead(a)/lead(b) * x^(da-db) * b
        int inv = 1;
        while ((inv * b[db]) % P != 1) ++inv;
        int c = int((i64(a[da]) * inv) % P);
        for (int k = 0; k <= db; ++k)
            a[da - db + k] = int(((a[da - db + k] - i64(c) * b[k]) % P + P) % P);
    }
    return a;
}

i64 ipow(i64 b, int e) { i64 r = 1; while (e--) r *= b; return r; }

vector<i64> prime_factors(i64 m) {
    vector<i64> out;
    for (i64 d = 2; d * d <= m; ++d)
        if (m % d == 0) {
            out.push_back(d);
            while (m % d == 0) m /= d;
        }
    if (m > 1) out.push_back(m);
    return out;
}

bool irreducible(const vector<int>& f) {
    int n = int(f.size()) - 1;
    vector<int> x{0, 1};
    x.resize(n, 0);
    if (n == 1) return true;
    // t_k = x^(p^k) mod f by repeated p-th powers
    vector<vector<int>> frob(n + 1);
    frob[0] = x;
    for (int k = 1; k <= n; ++k) frob[k] = pow_mod(frob[k - 1], P, f);
    if (frob[n] != x) return false;
    for (i64 l : prime_factors(n)) {
        vector<int> d = frob[n / l];
        d[1] = int(((d[1] - 1) % P + P) % P);
        vector<int> g = poly_gcd(f, d);
        // gcd must be a nonzero constant
        bool constant = true;
        for (size_t i = 1; i < g.size(); ++i)
            if (g[i] != 0) constant = false;
        if (!constant || g.empty() || g[0] == 0) return false;
    }
    return true;
}

bool primitive(const vector<int>& f, i64 M, const vector<i64>& mprimes) {
    vector<int> x{0, 1};
    x.resize(f.size() - 1, 0);
    for (i64 l : mprimes)
        if (is_one(pow_mod(x, M / l, f))) return false;
    return true;
}

int eval_at(const vector<int>& g, const vector<int>& y, const vector<int>& f,
            vector<int>* out) {
    // out = g(y) mod f, Horner
    int n = int(f.size()) - 1;
    vector<int> acc(n, 0);
    for (int i = int(g.size()) - 1; i >= 0; --i) {
        acc = mul_mod(acc, y, f);
        acc[0] = int((acc[0] + g[i]) % P);
    }
    *out = acc;
    return 0;
}

} // namespace

int main() {
    std::cout << "// Monic primitive moduli for F_(p^n), p in {2,3,5}, n <= 12,\n"
                 "// coefficients low to high.  Each entry of degree n is the word-order\n"
                 "// least primitive polynomial whose roots are norm-compatible with the\n"
                 "// entries at every proper divisor of n, so the power maps\n"
                 "// g_r -> g_R^((p^R-1)/(p^r-1)) give commuting subfield embeddings.\n"
                 "// Generated by scripts/gen_field_tables.cpp; do not edit by hand.\n"
                 "#pragma once\n\n"
                 "namespace padiclab::tables {\n\n"
                 "inline constexpr int kMaxDegree = 12;\n\n";
    for (int p : {2, 3, 5}) {
        P = p;
        // smallest primitive root mod p
        int g = 1;
        if (p > 2) {
            for (g = 2; g < p; ++g) {
                i64 o = 1, t = g;
                while (t != 1) { t = (t * g) % p; ++o; }
                if (o == p - 1) break;
            }
        }
        vector<vector<int>> table(13);
        table[1] = {(p - g) % p, 1}; // x - g
        for (int n = 2; n <= 12; ++n) {
            i64 M = ipow(p, n) - 1;
            vector<i64> mprimes = prime_factors(M);
            vector<int> divs;
            for (int m = 1; m < n; ++m)
                if (n % m == 0) divs.push_back(m);
            // candidate words (c_{n-1},...,c_1) ascending, c_0 forced by the
            // degree-1 norm condition; coefficients a_i = (-1)^(n-i) c_i
            vector<int> c(n, 0);
            c[0] = g;
            bool found = false;
            while (!found) {
                vector<int> f(n + 1, 0);
                f[n] = 1;
                for (int i = 0; i < n; ++i) {
                    int sign = ((n - i) % 2 == 0) ? 1 : -1;
                    f[i] = ((sign * c[i]) % p + p) % p;
                }
                if (irreducible(f) && primitive(f, M, mprimes)) {
                    bool ok = true;
                    for (int m : divs) {
                        vector<int> x{0, 1};
                        x.resize(n, 0);
                        vector<int> y = pow_mod(x, M / (ipow(p, m) - 1), f);
                        vector<int> v;
                        eval_at(table[m], y, f, &v);
                        for (int t : v)
                            if (t != 0) { ok = false; break; }
                        if (!ok) break;
                    }
                    if (ok) {
                        table[n] = f;
                        found = true;
                        break;
                    }
                }
                // next word in ascending lex order on (c_{n-1},...,c_1):
                // the last tuple component c_1 varies fastest
                int i = 1;
                while (i < n) {
                    if (++c[i] < p) break;
                    c[i] = 0;
                    ++i;
                }
                if (i == n) {
                    std::cerr << "search exhausted for p=" << p << " n=" << n << "\n";
                    return 1;
                }
            }
        }
        std::cout << "inline constexpr int kModuli_p" << p << "[13][13] = {\n";
        for (int n = 0; n <= 12; ++n) {
            std::cout << "    {";
            for (int i = 0; i <= 12; ++i) {
                int v = (n >= 1 && i < int(table[n].size())) ? table[n][i] : 0;
                std::cout << v << (i < 12 ? ", " : "");
            }
            std::cout << "},\n";
        }
        std::cout << "};\n\n";
        std::cerr << "p=" << p << " done\n";
    }
    std::cout << "} // namespace padiclab::tables\n";
    return 0;
}
