#include "padiclab/lift.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "padiclab/errors.hpp"
#include "padiclab/fq.hpp"

namespace padiclab {

namespace {

long long checked_q(long long p, long long s) {
    if (s < 1) throw ConfigError("frobenius lift: s must be >= 1");
    long long q = 1;
    for (long long k = 0; k < s; ++k) {
        if (q > (1ll << 20) / p) throw ResourceLimit("frobenius lift: q = p^s out of range");
        q *= p;
    }
    return q;
}

Poly<PadicNumber> power_plus_perturbation(const LocalFieldPtr& f, int nvars, int i, long long q,
                                          const Poly<PadicNumber>& P) {
    Poly<PadicNumber> r(nvars);
    Mono m(nvars, 0);
    m[i] = static_cast<int>(q);
    r.add_term(m, f->one());
    return r + P.scaled(f->from_int(f->p()));
}

} // namespace

FrobeniusLift::FrobeniusLift(LocalFieldPtr field, long long s,
                             std::vector<Poly<PadicNumber>> perturbations)
    : field_(std::move(field)), s_(s), pert_(std::move(perturbations)) {
    if (!field_) throw ConfigError("frobenius lift: missing base field");
    q_ = checked_q(field_->p(), s_);
    if (pert_.size() < 2) throw ConfigError("frobenius lift: need at least two components");
    N_ = static_cast<int>(pert_.size()) - 1;
    for (int i = 0; i <= N_; ++i) {
        const auto& P = pert_[i];
        if (P.nvars() != N_ + 1)
            throw ConfigError("frobenius lift: perturbation arity must be N+1");
        if (!P.is_exact_zero()) {
            if (P.homogeneous_degree() != q_)
                throw InvalidDegree("frobenius lift: perturbation degree must equal q");
            for (const auto& [m, c] : P.terms())
                if (c.val_lower_bound() < Valu(0))
                    throw NonIntegralCoefficient(
                        "frobenius lift: perturbation coefficient with val < 0");
        }
        comps_.push_back(power_plus_perturbation(field_, N_ + 1, i, q_, pert_[i]));
    }
    sigma_ok_ = !field_->ramified();
    if (sigma_ok_ && field_->r() > 1) {
        auto fixed = [&](const PadicNumber& c) {
            return indistinguishable(frobenius_automorphism_sigma(c, s_), c);
        };
        for (const auto& P : pert_)
            for (const auto& [m, c] : P.terms())
                if (sigma_ok_ && !fixed(c)) sigma_ok_ = false;
    }
}

std::string FrobeniusLift::str() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i <= N_; ++i) os << (i ? " : " : "") << comps_[i].str();
    os << "] over " << field_->str();
    return os.str();
}

ProjPoint<PadicNumber> apply(const FrobeniusLift& F, const ProjPoint<PadicNumber>& x,
                             long long n) {
    if (n < 0) throw ConfigError("apply: iterate count must be >= 0");
    if (static_cast<int>(x.coords().size()) != F.dim() + 1)
        throw ConfigError("apply: point dimension does not match the map");
    ProjPoint<PadicNumber> cur = x;
    for (long long k = 0; k < n; ++k) {
        std::vector<PadicNumber> img;
        img.reserve(F.dim() + 1);
        for (const auto& comp : F.components()) img.push_back(comp.eval(cur.coords()));
        cur = normalize_point(std::move(img));
    }
    return cur;
}

Poly<PadicNumber> chart_series(const FrobeniusLift& F, int i, int j, long long M) {
    const int N = F.dim();
    if (i < 0 || i > N || j < 0 || j > N || i == j)
        throw ConfigError("chart_series: chart and coordinate must be distinct indices in 0..N");
    const auto& f = F.field();
    if (M < 1) throw ConfigError("chart_series: M must be >= 1");
    if (Rat(M) + Rat(2) > f->default_prec())
        throw ConfigError("chart_series: M exceeds the certified window");

    Poly<PadicNumber> Rj = dehomogenize(F.perturbations()[j], i);
    Poly<PadicNumber> Ri = dehomogenize(F.perturbations()[i], i);
    PadicNumber pnum = f->from_int(f->p());

    // 1 / (1 + p * Ri) as a geometric series; the k-th term has Gauss
    // valuation >= k, so order M certifies the product mod p^(M+1).
    Poly<PadicNumber> acc(N);
    acc.add_term(Mono(N, 0), f->one());
    if (!Ri.is_exact_zero()) {
        Poly<PadicNumber> step = Ri.scaled(-pnum);
        Poly<PadicNumber> term = step;
        for (long long k = 1; k <= M && !term.is_exact_zero(); ++k) {
            acc = acc + term;
            if (acc.terms().size() > 200000) throw ResourceLimit("chart_series: series blow-up");
            term = term * step;
        }
    }

    int jc = j < i ? j : j - 1;
    Mono mq(N, 0);
    mq[jc] = static_cast<int>(F.q());
    Poly<PadicNumber> zq(N);
    zq.add_term(mq, f->one());
    Poly<PadicNumber> G = (zq + Rj.scaled(pnum)) * acc;

    Poly<PadicNumber> Qraw = (G - zq).scaled(pnum.inv());
    Poly<PadicNumber> Q(N);
    for (const auto& [m, c] : Qraw.terms()) {
        PadicNumber t = c.truncated(Rat(M));
        if (!t.is_zero_at_precision()) Q.add_term(m, t);
    }
    return Q;
}

ProjPoint<PadicNumber> periodic_point_in_disk(const FrobeniusLift& F,
                                              const ProjPoint<FqElement>& y, long long M) {
    if (static_cast<int>(y.coords().size()) != F.dim() + 1)
        throw ConfigError("periodic_point_in_disk: dimension mismatch");
    if (M < 1) throw ConfigError("periodic_point_in_disk: M must be >= 1");
    const auto& bf = F.field();

    int m = field_of_definition(y.coords(), F.s());

    long long R = bf->r();
    for (const auto& c : y.coords()) R = std::lcm(R, static_cast<long long>(c.field()->r()));
    LocalFieldPtr wf;
    if (R == bf->r()) {
        wf = bf;
    } else if (bf->ramified()) {
        throw IncompatibleFields(
            "periodic_point_in_disk: residue data outside the ramified base field");
    } else {
        wf = local_field(bf->p(), static_cast<int>(R), bf->storage_digits() - 2);
    }
    if (Rat(M) + Rat(2) > wf->default_prec())
        throw ConfigError("periodic_point_in_disk: M exceeds the certified window");

    std::vector<PadicNumber> lift0;
    lift0.reserve(y.coords().size());
    for (const auto& c : y.coords()) lift0.push_back(teichmuller_lift(c, wf));
    ProjPoint<PadicNumber> cur = normalize_point(std::move(lift0));

    // Every application of F gains at least one digit toward the fixed point
    // of F^m in the disk, so M rounds of F^m certify far more than p^-M;
    // stop early once the representation stops moving at full precision.
    bool fixed_rep = false;
    for (long long it = 0; it < M; ++it) {
        ProjPoint<PadicNumber> nxt = apply(F, cur, m);
        bool same = indistinguishable(nxt, cur);
        cur = std::move(nxt);
        if (same) {
            fixed_rep = true;
            break;
        }
    }
    if (!fixed_rep) {
        ProjPoint<PadicNumber> nxt = apply(F, cur, m);
        if (nxt.pivot() != cur.pivot())
            throw NonConvergence("periodic_point_in_disk: iteration left the disk of " + y.str());
        for (size_t t = 0; t < nxt.coords().size(); ++t) {
            PadicNumber d = nxt.coords()[t] - cur.coords()[t];
            if (d.val_lower_bound() < Valu(Rat(M)))
                throw NonConvergence("periodic_point_in_disk: contraction bound violated in the "
                                     "disk of " +
                                     y.str() + " at coordinate " + std::to_string(t));
        }
    }
    return cur;
}

std::vector<PeriodicEntry> enumerate_periodic(const FrobeniusLift& F, int m, long long M,
                                              std::uint64_t cap) {
    if (m < 1) throw ConfigError("enumerate_periodic: m must be >= 1");
    const auto& bf = F.field();
    long long rq = F.s() * static_cast<long long>(m);
    cpp_int qm = 1;
    for (int t = 0; t < m; ++t) qm *= F.q();
    cpp_int expected = 0, pw = 1;
    for (int idx = 0; idx <= F.dim(); ++idx) {
        expected += pw;
        pw *= qm;
    }
    if (expected > cpp_int(cap)) throw ResourceLimit("enumerate_periodic: census exceeds the cap");

    FqFieldPtr k = fq_field(bf->p(), static_cast<int>(rq));
    auto raw = enumerate_proj_points(k, F.dim(), cap);
    std::vector<PeriodicEntry> out;
    out.reserve(raw.size());
    for (auto& coords : raw) {
        PeriodicEntry e;
        e.period = field_of_definition(coords, F.s());
        e.residue = normalize_point(std::move(coords));
        e.point = periodic_point_in_disk(F, e.residue, M);
        out.push_back(std::move(e));
    }
    if (cpp_int(out.size()) != expected)
        throw Error("enumerate_periodic: census size mismatch (internal)");
    return out;
}

GaloisCheck galois_periodicity_check(const FrobeniusLift& F, const ProjPoint<PadicNumber>& x) {
    if (static_cast<int>(x.coords().size()) != F.dim() + 1)
        throw ConfigError("galois_periodicity_check: dimension mismatch");
    {
        PadicNumber probe = F.field()->one();
        for (const auto& c : x.coords()) probe = padic_promote(probe, c).first;
        if (probe.field()->ramified())
            throw RamifiedFieldUnsupported(
                "galois_periodicity_check: sigma acts on unramified fields only");
    }
    if (!F.sigma_compatible())
        throw SigmaInapplicable("galois_periodicity_check: map coefficients are not sigma-fixed");

    ProjPoint<PadicNumber> fx = apply(F, x, 1);
    std::vector<PadicNumber> sg;
    sg.reserve(x.coords().size());
    for (const auto& c : x.coords()) sg.push_back(frobenius_automorphism_sigma(c, F.s()));
    ProjPoint<PadicNumber> sx = normalize_point(std::move(sg));

    GaloisCheck out;
    if (fx.pivot() != sx.pivot()) {
        // cannot happen for an honest lift: both sides reduce to red(x)^q
        out.periodic = false;
        out.discrepancy = Valu(0);
        out.witness_coord = std::min(fx.pivot(), sx.pivot());
        return out;
    }
    bool all_zero = true;
    bool have = false;
    Valu worst = Valu::infinity();
    int coord = -1;
    Valu certified = Valu::infinity();
    for (size_t t = 0; t < fx.coords().size(); ++t) {
        PadicNumber d = fx.coords()[t] - sx.coords()[t];
        if (d.val_lower_bound() < certified) certified = d.val_lower_bound();
        if (!d.is_zero_at_precision()) {
            all_zero = false;
            if (!have || d.val() < worst) {
                worst = d.val();
                coord = static_cast<int>(t);
                have = true;
            }
        }
    }
    out.periodic = all_zero;
    out.discrepancy = all_zero ? certified : worst;
    out.witness_coord = coord;
    return out;
}

namespace {

// Plain (digit-wise) lift of a residue element: sum of theta^a * c_a with
// integer digits, exact in the unramified field.
PadicNumber lift_plain(const FqElement& c, const LocalFieldPtr& wf) {
    PadicNumber acc = wf->zero();
    const auto& co = c.coeffs();
    for (size_t a = 0; a < co.size(); ++a) {
        if (co[a] == 0) continue;
        PadicNumber term = wf->from_int(co[a]);
        if (a > 0) term = term * wf->theta(static_cast<int>(a));
        acc = acc + term;
    }
    return acc;
}

long long inv_mod(long long a, long long p) {
    long long t = 0, nt = 1, r = p, nr = a % p;
    while (nr != 0) {
        long long qq = r / nr;
        std::swap(t -= qq * nt, nt);
        std::swap(r -= qq * nr, nr);
    }
    return t < 0 ? t + p : t;
}

// Gauss-Jordan over F_p: particular solution and kernel basis of A d = b,
// or nullopt when inconsistent.  A is square row-major, n = rows = cols.
struct FpSolution {
    std::vector<int> particular;
    std::vector<std::vector<int>> kernel;
};
std::optional<FpSolution> solve_mod_p(std::vector<std::vector<int>> A, std::vector<int> b,
                                      long long p) {
    const int n = static_cast<int>(b.size());
    std::vector<int> pivot_row_of_col(n, -1);
    int row = 0;
    for (int col = 0; col < n && row < n; ++col) {
        int sel = -1;
        for (int rr = row; rr < n; ++rr)
            if (A[rr][col] % p != 0) {
                sel = rr;
                break;
            }
        if (sel < 0) continue;
        std::swap(A[sel], A[row]);
        std::swap(b[sel], b[row]);
        long long iv = inv_mod(((A[row][col] % p) + p) % p, p);
        for (int cc = 0; cc < n; ++cc) A[row][cc] = static_cast<int>((A[row][cc] * iv) % p);
        b[row] = static_cast<int>((b[row] * iv) % p);
        for (int rr = 0; rr < n; ++rr) {
            if (rr == row) continue;
            long long f = ((A[rr][col] % p) + p) % p;
            if (f == 0) continue;
            for (int cc = 0; cc < n; ++cc)
                A[rr][cc] = static_cast<int>((((A[rr][cc] - f * A[row][cc]) % p) + p) % p);
            b[rr] = static_cast<int>((((b[rr] - f * b[row]) % p) + p) % p);
        }
        pivot_row_of_col[col] = row;
        ++row;
    }
    for (int rr = row; rr < n; ++rr)
        if (((b[rr] % p) + p) % p != 0) return std::nullopt;

    FpSolution s;
    s.particular.assign(n, 0);
    for (int col = 0; col < n; ++col)
        if (pivot_row_of_col[col] >= 0)
            s.particular[col] = ((b[pivot_row_of_col[col]] % p) + p) % p;
    for (int col = 0; col < n; ++col) {
        if (pivot_row_of_col[col] >= 0) continue;
        std::vector<int> v(n, 0);
        v[col] = 1;
        for (int c2 = 0; c2 < n; ++c2)
            if (pivot_row_of_col[c2] >= 0) {
                int a = A[pivot_row_of_col[c2]][col];
                v[c2] = static_cast<int>(((-(long long)a % p) + p) % p);
            }
        s.kernel.push_back(std::move(v));
    }
    return s;
}

} // namespace

std::vector<ProjPoint<PadicNumber>> backward_step(const FrobeniusLift& F,
                                                  const ProjPoint<PadicNumber>& b, long long M,
                                                  std::size_t branch_cap) {
    const int N = F.dim();
    if (static_cast<int>(b.coords().size()) != N + 1)
        throw ConfigError("backward_step: dimension mismatch");
    if (M < 1) throw ConfigError("backward_step: M must be >= 1");

    PadicNumber probe = F.field()->one();
    for (const auto& c : b.coords()) probe = padic_promote(probe, c).first;
    LocalFieldPtr wf = probe.field();
    if (wf->ramified())
        throw RamifiedFieldUnsupported("backward_step: digit solving needs an unramified field");

    const long long p = wf->p();
    const long long q = F.q();
    const FqFieldPtr kF = wf->residue_field();
    const int r = kF->r();
    const int i = b.pivot();

    std::vector<PadicNumber> bc;
    bc.reserve(N + 1);
    for (const auto& c : b.coords()) bc.push_back(padic_embed(c, wf));

    // A wrong digit at position k only contradicts the system at level
    // k + s + (q-1)/q * val(b_j) or so (the leading derivative term of the
    // q-th power carries that much valuation).  Running the digit loop past
    // M by that lag lets every inconsistent branch below depth M die inside
    // the window; anything still alive afterwards is truncated back to M and
    // deduplicated, so the returned classes are honest mod p^M.
    long long vmax = 0;
    for (int t = 0; t <= N; ++t) {
        if (t == i) continue;
        const PadicNumber& c = bc[t];
        long long v = M;
        if (c.state() == PadicNumber::State::kRegular) {
            Rat vr = c.val().finite();
            v = vr.numerator() / vr.denominator();
            if (v < 0) v = 0;
            if (v > M) v = M;
        }
        vmax = std::max(vmax, v);
    }
    // the +2 absorbs mild extra cancellation in the derivative at perturbed
    // roots; fibers degenerate beyond that surface as extra residue classes
    const long long lag = F.s() + vmax + 2;
    const long long K = M + lag;
    if (Rat(K) + Rat(2) > wf->default_prec())
        throw ConfigError("backward_step: M exceeds the certified window");

    // Chart polynomials at the pivot chart: the preimage shares b's pivot,
    // so with x_i = 1 and lambda eliminated the system is, per chart slot,
    //   G_j(z) = z_j^q - b_j + p * S_j(z),  S_j = R_j - b_j * R_i,
    // where R_t is the dehomogenized perturbation of coordinate t.
    Poly<PadicNumber> Ri = dehomogenize(F.perturbations()[i], i);
    std::vector<Poly<PadicNumber>> G;      // indexed by chart slot
    std::vector<Poly<FqElement>> Sbar;     // residue of the S_j
    std::vector<FqElement> xbar;           // the unique residue solution
    G.reserve(N);
    Sbar.reserve(N);
    xbar.reserve(N);
    for (int jc = 0; jc < N; ++jc) {
        int j = jc < i ? jc : jc + 1;
        Poly<PadicNumber> S = dehomogenize(F.perturbations()[j], i) - Ri.scaled(bc[j]);
        Poly<PadicNumber> g(N);
        Mono mq(N, 0);
        mq[jc] = static_cast<int>(q);
        g.add_term(mq, wf->one());
        g.add_term(Mono(N, 0), -bc[j]);
        g = g + S.scaled(wf->from_int(p));
        G.push_back(std::move(g));
        Sbar.push_back(reduce_poly(S));
        xbar.push_back(frobenius_s(fq_embed(reduce_residue(bc[j]), kF), F.s(), true));
    }

    // Residue partials of S_j at xbar; constant across digit levels.
    std::vector<std::vector<FqElement>> L(N, std::vector<FqElement>());
    for (int jc = 0; jc < N; ++jc)
        for (int tc = 0; tc < N; ++tc)
            L[jc].push_back(poly_derivative_var(Sbar[jc], tc).eval(xbar));

    const int n = r * N;
    // Additive digit action: how the level-(k+1) digit of G moves when digit
    // k of the approximation moves by the residue vector d.  Columns over
    // basis digits; the q = 2, k = 1 case picks up the square of the digit
    // (still F_2-linear), every other binomial term sits too deep.
    auto build_matrix = [&](bool with_square) {
        std::vector<std::vector<int>> A(n, std::vector<int>(n, 0));
        for (int tc = 0; tc < N; ++tc)
            for (int a = 0; a < r; ++a) {
                std::vector<int> ecoef(r, 0);
                ecoef[a] = 1;
                FqElement e(kF, ecoef);
                for (int jc = 0; jc < N; ++jc) {
                    FqElement v = L[jc][tc] * e;
                    if (tc == jc && F.s() == 1)
                        v = v + xbar[jc].pow(static_cast<std::uint64_t>(q - 1)) * e;
                    if (tc == jc && with_square) v = v + e * e;
                    const auto& vc = v.coeffs();
                    for (int bi = 0; bi < r; ++bi) A[jc * r + bi][tc * r + a] = vc[bi];
                }
            }
        return A;
    };
    std::vector<std::vector<int>> A1 = build_matrix(q == 2);
    std::vector<std::vector<int>> Ak = (q == 2) ? build_matrix(false) : A1;

    struct Branch {
        std::vector<PadicNumber> z;
    };
    std::vector<Branch> branches;
    {
        Branch b0;
        for (int jc = 0; jc < N; ++jc) b0.z.push_back(lift_plain(xbar[jc], wf));
        branches.push_back(std::move(b0));
    }

    cpp_int ppow = p; // p^(k+1) at level k, starting at k = 1 below
    for (long long k = 1; k <= K; ++k) {
        ppow *= p;
        PadicNumber shift = wf->from_cpp(ppow); // p^(k+1)
        PadicNumber stepu = wf->from_cpp(ppow / p);
        std::vector<Branch> next;
        bool obstructed_all = true;
        for (const auto& br : branches) {
            // level digit of every G_j: requires val >= k+1, and certified
            // digits one level deeper to read the residue off
            std::vector<int> rhs(n, 0);
            bool dead = false;
            bool foggy = false;
            for (int jc = 0; jc < N && !dead; ++jc) {
                PadicNumber gv = G[jc].eval(br.z);
                FqElement digit = kF->zero();
                if (gv.is_exact_zero()) {
                    // digit stays zero
                } else if (gv.state() == PadicNumber::State::kBelowPrecision) {
                    if (gv.val_lower_bound() < Valu(Rat(k + 2))) {
                        foggy = true;
                        break;
                    }
                } else {
                    Valu v = gv.val();
                    if (v < Valu(Rat(k + 1))) {
                        dead = true;
                        break;
                    }
                    if (v < Valu(Rat(k + 2))) {
                        if (gv.abs_prec() < Rat(k + 2))
                            throw PrecisionLoss("backward_step: digit beyond certified window");
                        digit = fq_embed(reduce_residue(gv / shift), kF);
                    }
                }
                const auto& dc = digit.coeffs();
                for (int bi = 0; bi < r; ++bi)
                    rhs[jc * r + bi] = static_cast<int>(((-(long long)dc[bi]) % p + p) % p);
            }
            if (foggy)
                throw PrecisionLoss("backward_step: target digits below certified precision");
            if (dead) continue;

            auto sol = solve_mod_p(k == 1 ? A1 : Ak, rhs, p);
            if (!sol) continue;
            obstructed_all = false;

            // all digit choices, canonical (lexicographically least) first
            std::vector<std::vector<int>> choices;
            std::vector<int> combo(sol->kernel.size(), 0);
            while (true) {
                std::vector<int> d = sol->particular;
                for (size_t kk = 0; kk < combo.size(); ++kk) {
                    if (combo[kk] == 0) continue;
                    for (int c2 = 0; c2 < n; ++c2)
                        d[c2] = static_cast<int>((d[c2] + (long long)combo[kk] * sol->kernel[kk][c2]) % p);
                }
                choices.push_back(std::move(d));
                if (choices.size() > branch_cap)
                    throw ResourceLimit("backward_step: branch cap exceeded");
                size_t pos = 0;
                while (pos < combo.size() && combo[pos] == p - 1) combo[pos++] = 0;
                if (pos == combo.size()) break;
                ++combo[pos];
            }
            std::sort(choices.begin(), choices.end());
            for (const auto& d : choices) {
                Branch nb = br;
                for (int tc = 0; tc < N; ++tc) {
                    std::vector<int> dc(d.begin() + tc * r, d.begin() + (tc + 1) * r);
                    FqElement de(kF, dc);
                    if (!de.is_zero()) nb.z[tc] = nb.z[tc] + stepu * lift_plain(de, wf);
                }
                next.push_back(std::move(nb));
                if (next.size() > branch_cap)
                    throw ResourceLimit("backward_step: branch cap exceeded");
            }
        }
        if (next.empty()) {
            if (obstructed_all || branches.empty())
                throw ExtensionRequired("backward_step: no preimage over the declared field "
                                        "(obstructed at digit " +
                                            std::to_string(k) + ")",
                                        static_cast<int>(k));
            throw ExtensionRequired("backward_step: every digit branch died at level " +
                                        std::to_string(k),
                                    static_cast<int>(k));
        }
        branches = std::move(next);
    }

    std::vector<ProjPoint<PadicNumber>> out;
    out.reserve(branches.size());
    for (const auto& br : branches) {
        std::vector<PadicNumber> coords;
        coords.reserve(N + 1);
        for (int t = 0; t <= N; ++t) {
            if (t == i) {
                coords.push_back(wf->one());
            } else {
                int tc = t < i ? t : t - 1;
                coords.push_back(br.z[tc].truncated(Rat(M)));
            }
        }
        ProjPoint<PadicNumber> pt = normalize_point(std::move(coords));
        bool dup = false;
        for (const auto& seen : out)
            if (indistinguishable(seen, pt)) {
                dup = true;
                break;
            }
        if (dup) continue;
        ProjPoint<PadicNumber> fwd = apply(F, pt, 1);
        if (fwd.pivot() != b.pivot()) continue;
        bool ok = true;
        for (size_t t = 0; t < fwd.coords().size() && ok; ++t) {
            PadicNumber d = fwd.coords()[t] - bc[t];
            if (d.val_lower_bound() < Valu(Rat(M))) ok = false;
        }
        if (ok) out.push_back(std::move(pt));
    }
    if (out.empty())
        throw NonConvergence("backward_step: no branch survived forward verification at depth " +
                             std::to_string(M));
    return out;
}

InvarianceResult invariance_check_hypersurface(const FrobeniusLift& F,
                                               const Poly<PadicNumber>& H, long long l_bound) {
    if (H.nvars() != F.dim() + 1)
        throw ConfigError("invariance_check_hypersurface: arity mismatch");
    if (H.is_exact_zero()) throw ZeroVector("invariance_check_hypersurface: zero polynomial");
    if (!H.is_homogeneous())
        throw InvalidDegree("invariance_check_hypersurface: generator must be homogeneous");
    if (l_bound < 1) throw ConfigError("invariance_check_hypersurface: bound must be >= 1");

    std::vector<Poly<PadicNumber>> pulled; // H o F^l for l = 1..l_bound
    std::vector<Poly<PadicNumber>> comps_l = F.components();
    for (long long l = 1; l <= l_bound; ++l) {
        Poly<PadicNumber> Hl = compose_endo(H, comps_l);
        if (Hl.terms().size() > 200000)
            throw ResourceLimit("invariance_check_hypersurface: pullback blow-up");
        auto quot = exact_divide(Hl, H);
        if (quot) {
            InvarianceResult res;
            res.invariant = true;
            res.l = l;
            res.quotient = *quot;
            return res;
        }
        pulled.push_back(std::move(Hl));
        if (l < l_bound) {
            std::vector<Poly<PadicNumber>> nxt;
            nxt.reserve(comps_l.size());
            size_t total = 0;
            for (const auto& c : comps_l) {
                nxt.push_back(compose_endo(c, F.components()));
                total += nxt.back().terms().size();
            }
            if (total > 200000)
                throw ResourceLimit("invariance_check_hypersurface: iterate blow-up");
            comps_l = std::move(nxt);
        }
    }

    InvarianceResult res;
    res.invariant = false;
    res.l = 0;

    // Witness search: Teichmueller lifts of residue points of the
    // hypersurface over small extensions; a lift that stays on V(H) but
    // leaves it after some iterate proves non-invariance by evaluation.
    const auto& bf = F.field();
    if (bf->ramified()) return res;
    Poly<FqElement> Hbar = reduce_poly(H);
    for (int L = 1; L <= 3 && !res.witness_value; ++L) {
        FqFieldPtr kL = fq_field(bf->p(), bf->r() * L);
        LocalFieldPtr wf =
            L == 1 ? bf : local_field(bf->p(), bf->r() * L, bf->storage_digits() - 2);
        std::vector<std::vector<FqElement>> pts;
        try {
            pts = enumerate_proj_points(kL, F.dim(), 4096);
        } catch (const ResourceLimit&) {
            break;
        }
        for (auto& coords : pts) {
            FqElement hv = Hbar.eval(coords);
            if (!hv.is_zero()) continue;
            std::vector<PadicNumber> lifted;
            lifted.reserve(coords.size());
            for (const auto& c : coords) lifted.push_back(teichmuller_lift(c, wf));
            ProjPoint<PadicNumber> ypt = normalize_point(std::move(lifted));
            if (!H.eval(ypt.coords()).is_zero_at_precision()) continue;
            for (long long l = 1; l <= l_bound; ++l) {
                PadicNumber w = pulled[static_cast<size_t>(l - 1)].eval(ypt.coords());
                if (!w.is_zero_at_precision()) {
                    res.l = l;
                    res.witness_point = ypt.str();
                    res.witness_value = w;
                    break;
                }
            }
            if (res.witness_value) break;
        }
    }
    return res;
}

} // namespace padiclab
