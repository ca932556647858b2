#include "padiclab/closure.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "padiclab/parallel.hpp"

namespace padiclab {

namespace {

long long fp_inv(long long a, long long p) {
    long long r = 1, b = a % p, e = p - 2;
    while (e > 0) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

/// In-place reduced echelon form over F_p; entries stay in [0, p).  Returns
/// the pivot columns.  Echelon form is unique, so no pivoting choice enters.
std::vector<size_t> fp_rref(std::vector<std::vector<long long>>& M, long long p) {
    std::vector<size_t> pivots;
    if (M.empty()) return pivots;
    const size_t cols = M[0].size();
    size_t row = 0;
    for (size_t col = 0; col < cols && row < M.size(); ++col) {
        size_t sel = row;
        while (sel < M.size() && M[sel][col] == 0) ++sel;
        if (sel == M.size()) continue;
        std::swap(M[row], M[sel]);
        const long long iv = fp_inv(M[row][col], p);
        for (size_t j = col; j < cols; ++j) M[row][j] = M[row][j] * iv % p;
        for (size_t i = 0; i < M.size(); ++i) {
            if (i == row || M[i][col] == 0) continue;
            const long long f = M[i][col];
            for (size_t j = col; j < cols; ++j)
                M[i][j] = (M[i][j] + (p - f) * M[row][j]) % p;
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

/// In-place reduced echelon form over the coefficient field; zero rows are
/// dropped, leaving the canonical basis of the row span.
void k_rref(std::vector<std::vector<FqElement>>& rows) {
    size_t row = 0;
    const size_t cols = rows.empty() ? 0 : rows[0].size();
    for (size_t col = 0; col < cols && row < rows.size(); ++col) {
        size_t sel = row;
        while (sel < rows.size() && rows[sel][col].is_zero()) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[row], rows[sel]);
        FqElement iv = rows[row][col].inv();
        for (size_t j = col; j < cols; ++j) rows[row][j] = rows[row][j] * iv;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == row || rows[i][col].is_zero()) continue;
            FqElement f = rows[i][col];
            for (size_t j = col; j < cols; ++j) rows[i][j] = rows[i][j] - f * rows[row][j];
        }
        ++row;
    }
    rows.resize(row);
}

std::map<Mono, size_t, MonoGreater> column_index(const std::vector<Mono>& monos) {
    std::map<Mono, size_t, MonoGreater> col;
    for (size_t m = 0; m < monos.size(); ++m) col.emplace(monos[m], m);
    return col;
}

std::vector<std::vector<FqElement>> basis_rows(const IdealBasis& I,
                                               const std::vector<Poly<FqElement>>& fs,
                                               const std::vector<Mono>& monos,
                                               const std::map<Mono, size_t, MonoGreater>& col) {
    std::vector<std::vector<FqElement>> rows;
    rows.reserve(fs.size());
    for (const auto& f : fs) {
        std::vector<FqElement> v(monos.size(), I.coeff_field->zero());
        for (const auto& [m, c] : f.terms()) v[col.at(m)] = fq_embed(c, I.coeff_field);
        rows.push_back(std::move(v));
    }
    return rows;
}

} // namespace

std::vector<std::string> IdealBasis::str_lines() const {
    std::vector<std::string> out;
    out.push_back(coeff_field ? coeff_field->str() : "(no field)");
    for (const auto& f : basis) out.push_back(f.str());
    return out;
}

std::vector<Mono> monomials_upto_degree(int N, int d, std::uint64_t cap) {
    if (N < 1 || d < 0) throw ConfigError("monomials_upto_degree: need N >= 1 and d >= 0");
    std::uint64_t count = 1; // C(N+i, i) after step i
    for (int i = 1; i <= d; ++i) {
        count = count * (static_cast<std::uint64_t>(N) + i) / i;
        if (count > cap)
            throw ResourceLimit("monomials_upto_degree: count exceeds the cap");
    }
    std::vector<Mono> out;
    out.reserve(count);
    Mono cur(N, 0);
    std::function<void(int, int)> rec = [&](int pos, int rem) {
        if (pos == N) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e <= rem; ++e) {
            cur[pos] = e;
            rec(pos + 1, rem - e);
        }
        cur[pos] = 0;
    };
    rec(0, d);
    std::sort(out.begin(), out.end(), MonoGreater{});
    return out;
}

Poly<FqElement> sigma_twist(const Poly<FqElement>& f, long long m) {
    Poly<FqElement> out(f.nvars());
    for (const auto& [mono, c] : f.terms()) out.add_term(mono, scalar_sigma(c, m));
    return out;
}

IdealBasis vanishing_ideal_upto_degree(const std::vector<std::vector<FqElement>>& points,
                                       int d, const FqFieldPtr& K, std::uint64_t cap) {
    if (!K) throw ConfigError("vanishing_ideal_upto_degree: no coefficient field");
    if (points.empty()) throw ConfigError("vanishing_ideal_upto_degree: empty point sample");
    const int N = static_cast<int>(points[0].size());
    if (N < 1) throw ConfigError("vanishing_ideal_upto_degree: points need coordinates");
    for (const auto& P : points)
        if (static_cast<int>(P.size()) != N)
            throw ConfigError("vanishing_ideal_upto_degree: mixed point arity");

    const std::vector<Mono> monos = monomials_upto_degree(N, d, cap);
    const size_t C = monos.size();
    const int r = K->r();
    const long long p = K->p();

    // embeddings are cached per field pair, so stay serial here
    std::vector<std::vector<FqElement>> emb(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        emb[i].reserve(N);
        for (const auto& c : points[i]) emb[i].push_back(fq_embed(c, K));
    }

    // evaluation matrix over K, one row per point
    std::vector<std::vector<FqElement>> E(points.size());
    parallel_for(points.size(), [&](size_t i) {
        std::vector<std::vector<FqElement>> pw(N, {K->one()});
        std::vector<FqElement> row;
        row.reserve(C);
        for (const auto& m : monos) {
            FqElement v = K->one();
            for (int t = 0; t < N; ++t) {
                if (m[t] == 0) continue;
                auto& cache = pw[t];
                while (static_cast<int>(cache.size()) <= m[t])
                    cache.push_back(cache.back() * emb[i][t]);
                v = v * cache[m[t]];
            }
            row.push_back(v);
        }
        E[i] = std::move(row);
    });

    // expand over F_p coordinates: unknown c_m = sum_t c_{m,t} theta^t gives
    // equation row (point, u) entry coeff_u(theta^t * E[i][m]) at (m, t)
    std::vector<FqElement> gp;
    gp.reserve(r);
    {
        FqElement acc = K->one();
        for (int t = 0; t < r; ++t) {
            gp.push_back(acc);
            acc = acc * K->gen();
        }
    }
    std::vector<std::vector<long long>> M(points.size() * r,
                                          std::vector<long long>(C * r, 0));
    parallel_for(points.size(), [&](size_t i) {
        for (size_t m = 0; m < C; ++m)
            for (int t = 0; t < r; ++t) {
                FqElement v = gp[t] * E[i][m];
                const auto& cf = v.coeffs();
                for (size_t u = 0; u < cf.size(); ++u)
                    M[i * r + u][m * r + t] = cf[u];
            }
    });

    const std::vector<size_t> pivots = fp_rref(M, p);
    const long long rank = static_cast<long long>(pivots.size());
    const long long nullity = static_cast<long long>(C) * r - rank;

    // one canonical kernel vector per free column, folded back into K rows
    std::vector<bool> is_pivot(C * r, false);
    for (size_t c : pivots) is_pivot[c] = true;
    std::vector<std::vector<FqElement>> rows;
    rows.reserve(static_cast<size_t>(nullity));
    for (size_t f = 0; f < C * r; ++f) {
        if (is_pivot[f]) continue;
        std::vector<long long> v(C * r, 0);
        v[f] = 1;
        for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = (p - M[i][f]) % p;
        std::vector<FqElement> row;
        row.reserve(C);
        for (size_t m = 0; m < C; ++m) {
            std::vector<int> cf(r, 0);
            for (int t = 0; t < r; ++t) cf[t] = static_cast<int>(v[m * r + t]);
            row.push_back(K->from_coeffs(std::move(cf)));
        }
        rows.push_back(std::move(row));
    }

    // the kernel is a K-subspace, so its F_p dimension is a multiple of r
    // and the K-echelon form below is a basis of the same space
    if (nullity % r != 0) throw Error("vanishing ideal: kernel is not a K-space");
    k_rref(rows);
    if (static_cast<long long>(rows.size()) * r != nullity)
        throw Error("vanishing ideal: kernel dimension mismatch over K");

    IdealBasis I;
    I.d = d;
    I.N = N;
    I.coeff_field = K;
    I.fp_rank = rank;
    I.fp_kernel_dim = nullity;
    for (const auto& row : rows) {
        Poly<FqElement> f(N);
        for (size_t m = 0; m < C; ++m)
            if (!row[m].is_zero()) f.add_term(monos[m], row[m]);
        I.basis.push_back(std::move(f));
    }
    return I;
}

bool in_span(const IdealBasis& I, const Poly<FqElement>& f) {
    if (f.nvars() != I.N) throw ConfigError("in_span: arity mismatch");
    if (f.degree() > I.d) throw InvalidDegree("in_span: degree exceeds the slice bound");
    const std::vector<Mono> monos = monomials_upto_degree(I.N, I.d);
    const auto col = column_index(monos);
    std::vector<FqElement> v(monos.size(), I.coeff_field->zero());
    for (const auto& [m, c] : f.terms()) v[col.at(m)] = fq_embed(c, I.coeff_field);
    for (const auto& g : I.basis) {
        const size_t c = col.at(g.leading().first);
        if (v[c].is_zero()) continue;
        const FqElement fac = v[c]; // echelon rows lead with coefficient one
        for (const auto& [m, gc] : g.terms()) {
            const size_t j = col.at(m);
            v[j] = v[j] - fac * gc;
        }
    }
    for (const auto& e : v)
        if (!e.is_zero()) return false;
    return true;
}

StabilityReport frobenius_stability_check(const IdealBasis& I, long long s,
                                          long long r_bound) {
    if (s < 1) throw ConfigError("frobenius_stability_check: s must be positive");
    StabilityReport rep;
    if (I.basis.empty()) {
        rep.stable = true;
        rep.r = 1;
        return rep;
    }
    const std::vector<Mono> monos = monomials_upto_degree(I.N, I.d);
    const auto col = column_index(monos);

    std::vector<std::vector<FqElement>> canon = basis_rows(I, I.basis, monos, col);
    k_rref(canon);
    std::vector<Poly<FqElement>> work = I.basis;
    for (long long r = 1; r <= r_bound; ++r) {
        for (auto& f : work) f = sigma_twist(f, s);
        std::vector<std::vector<FqElement>> tw = basis_rows(I, work, monos, col);
        k_rref(tw);
        bool eq = tw.size() == canon.size();
        for (size_t i = 0; eq && i < tw.size(); ++i)
            for (size_t j = 0; eq && j < tw[i].size(); ++j)
                if (!(tw[i][j] == canon[i][j])) eq = false;
        if (eq) {
            rep.stable = true;
            rep.r = r;
            return rep;
        }
    }
    return rep;
}

namespace {

ClosureReport closure_impl(std::vector<FqElement> base, long long s, int d, int n_samples,
                           std::uint64_t cap) {
    if (s < 1) throw ConfigError("closure_of_root_orbit: s must be positive");
    if (n_samples < 1) throw ConfigError("closure_of_root_orbit: need at least one sample");

    FqElement acc = base[0];
    for (size_t j = 1; j < base.size(); ++j) acc = fq_promote(acc, base[j]).first;
    const FqFieldPtr K = acc.field();
    for (auto& c : base) c = fq_embed(c, K);

    auto step = [&](std::vector<FqElement> v) {
        for (auto& c : v) c = frobenius_s(c, s, true);
        return v;
    };

    // the inverse-Frobenius orbit of the coordinate tuple; its period
    // divides the degree of the field the tuple generates
    long long period = 1;
    {
        std::vector<FqElement> cur = step(base);
        while (cur != base) {
            cur = step(cur);
            if (++period > K->r())
                throw Error("closure_of_root_orbit: residue orbit failed to close");
        }
    }

    auto sample = [&](long long count) {
        std::vector<std::vector<FqElement>> pts;
        pts.reserve(static_cast<size_t>(count));
        std::vector<FqElement> cur = base;
        for (long long n = 0; n < count; ++n) {
            pts.push_back(cur);
            cur = step(cur);
        }
        return pts;
    };

    ClosureReport rep;
    rep.residue_period = period;
    rep.ideal = vanishing_ideal_upto_degree(sample(n_samples), d, K, cap);
    rep.stability = frobenius_stability_check(rep.ideal, s);
    const IdealBasis more =
        vanishing_ideal_upto_degree(sample(n_samples + period), d, K, cap);
    rep.saturated = more.basis.size() == rep.ideal.basis.size();
    if (rep.saturated)
        for (size_t i = 0; i < more.basis.size(); ++i)
            if (!poly_equal(more.basis[i], rep.ideal.basis[i])) {
                rep.saturated = false;
                break;
            }
    return rep;
}

} // namespace

ClosureReport closure_of_root_orbit(const ProjPoint<FqElement>& w, int chart, long long s,
                                    int d, int n_samples, std::uint64_t cap) {
    const auto& cs = w.coords();
    if (chart < 0 || chart >= static_cast<int>(cs.size()))
        throw ConfigError("closure_of_root_orbit: chart out of range");
    if (cs.size() < 2) throw ConfigError("closure_of_root_orbit: ambient dimension is zero");
    if (cs[static_cast<size_t>(chart)].is_zero())
        throw ConfigError("closure_of_root_orbit: the point is not integral in this chart");
    std::vector<FqElement> base;
    base.reserve(cs.size() - 1);
    for (size_t j = 0; j < cs.size(); ++j) {
        if (static_cast<int>(j) == chart) continue;
        auto [a, b] = fq_promote(cs[j], cs[static_cast<size_t>(chart)]);
        base.push_back(a / b);
    }
    return closure_impl(std::move(base), s, d, n_samples, cap);
}

ClosureReport closure_of_root_orbit(const ProjPoint<TiltElement>& w, int chart, long long s,
                                    int d, int n_samples, std::uint64_t cap) {
    const auto& cs = w.coords();
    if (chart < 0 || chart >= static_cast<int>(cs.size()))
        throw ConfigError("closure_of_root_orbit: chart out of range");
    if (cs.size() < 2) throw ConfigError("closure_of_root_orbit: ambient dimension is zero");
    std::vector<FqElement> base;
    base.reserve(cs.size() - 1);
    for (size_t j = 0; j < cs.size(); ++j) {
        if (static_cast<int>(j) == chart) continue;
        base.push_back(tilt_reduce(cs[j] / cs[static_cast<size_t>(chart)]));
    }
    return closure_impl(std::move(base), s, d, n_samples, cap);
}

} // namespace padiclab
