#include "padiclab/orbit.hpp"

#include <algorithm>
#include <utility>

namespace padiclab {

namespace {

// common field of every coordinate of every point, found by promotion
LocalFieldPtr working_field(const FrobeniusLift& F,
                            const std::vector<ProjPoint<PadicNumber>>& pts) {
    PadicNumber probe = F.field()->one();
    for (const auto& pt : pts)
        for (const auto& c : pt.coords()) probe = padic_promote(probe, c).first;
    return probe.field();
}

} // namespace

CoherentOrbit::CoherentOrbit(FrobeniusLift F, std::vector<ProjPoint<PadicNumber>> points)
    : F_(std::move(F)), pts_(std::move(points)) {
    if (pts_.empty()) throw ConfigError("coherent orbit: no points");
    for (const auto& pt : pts_)
        if (static_cast<int>(pt.coords().size()) != F_.dim() + 1)
            throw ConfigError("coherent orbit: dimension mismatch");
    for (size_t i = 1; i < pts_.size(); ++i) {
        ProjPoint<PadicNumber> fwd = apply(F_, pts_[i], 1);
        PadicNumber probe = padic_promote(fwd.coords()[0], pts_[i - 1].coords()[0]).first;
        std::vector<PadicNumber> a, b;
        for (const auto& c : fwd.coords()) a.push_back(padic_embed(c, probe.field()));
        for (const auto& c : pts_[i - 1].coords()) b.push_back(padic_embed(c, probe.field()));
        bool ok = fwd.pivot() == pts_[i - 1].pivot();
        for (size_t t = 0; ok && t < a.size(); ++t)
            if (!indistinguishable(a[t], b[t])) ok = false;
        if (!ok)
            throw ConfigError("coherent orbit: F(b_" + std::to_string(i) +
                              ") does not reproduce b_" + std::to_string(i - 1));
    }
}

TiltPoint tilt_of_orbit(const CoherentOrbit& orbit) {
    const auto& pts = orbit.points();
    const FrobeniusLift& F = orbit.map();
    const long long D = orbit.depth();
    const int N = F.dim();

    const int piv = pts[0].pivot();
    for (const auto& pt : pts)
        if (pt.pivot() != piv)
            throw ChartInstability("tilt_of_orbit: orbit points change pivot chart");

    LocalFieldPtr wf = working_field(F, pts);
    const FqFieldPtr kF = wf->residue_field();
    const long long e = wf->e();
    const long long q = F.q();

    // certified p-order of the level-0 sharp limit, minus two guard digits
    Rat cert(F.s() * D + 1);

    std::vector<PadicNumber> sharp;
    sharp.reserve(N + 1);
    for (int j = 0; j <= N; ++j) {
        PadicNumber z = padic_embed(pts[D].coords()[j], wf);
        // every lift of z's certified class has the same q^D-th power mod
        // p^(k + sD), one p-order gained per q-power, so the canonical digit
        // lift computes the sharp even when z itself carries few digits
        if (!z.is_exact_zero() && !z.abs_prec().is_infinite()) {
            Rat a = z.abs_prec().finite();
            long long k = a.numerator() / a.denominator();
            if (k < 1)
                throw DepthInsufficient(
                    "tilt_of_orbit: the deepest point carries no certified digit");
            if (k > wf->storage_digits()) k = wf->storage_digits();
            z = wf->from_coords(integral_coords(z, static_cast<int>(k)));
        }
        PadicNumber S = z;
        for (long long m = 0; m < D; ++m) S = S.pow(static_cast<std::uint64_t>(q));
        sharp.push_back(S);
        if (!S.is_exact_zero() && S.abs_prec() < Valu(cert)) cert = S.abs_prec().finite();
    }
    Rat cutoff_rat = cert - Rat(2);
    if (cutoff_rat < Rat(1))
        throw DepthInsufficient("tilt_of_orbit: depth " + std::to_string(D) +
                                " certifies no tilt digit");
    BigRat cutoff(cutoff_rat.numerator(), cutoff_rat.denominator());

    PadicNumber pi = wf->uniformizer();
    std::vector<TiltElement> coords;
    coords.reserve(N + 1);
    for (int j = 0; j <= N; ++j) {
        PadicNumber cur = sharp[j];
        std::vector<TiltTerm> terms;
        for (long long dig = 0; BigRat(dig, e) < cutoff; ++dig) {
            if (cur.is_exact_zero() || cur.is_zero_at_precision()) break;
            FqElement c = reduce_residue(cur);
            if (!c.is_zero()) {
                terms.push_back({BigRat(dig, e), c});
                cur = cur - teichmuller_lift(c, wf);
            }
            cur = cur / pi;
        }
        coords.push_back(tilt_make(kF, std::move(terms), cutoff));
    }
    return normalize_point(std::move(coords));
}

std::vector<ProjPoint<FqElement>> residue_orbit(const CoherentOrbit& orbit) {
    std::vector<ProjPoint<FqElement>> out;
    out.reserve(orbit.points().size());
    for (const auto& pt : orbit.points()) out.push_back(reduction_map(pt));
    return out;
}

CoherentOrbit periodic_orbit_of(const FrobeniusLift& F, const ProjPoint<PadicNumber>& x,
                                long long depth, long long period_bound) {
    if (depth < 0 || period_bound < 1) throw ConfigError("periodic_orbit_of: bad bounds");
    std::vector<ProjPoint<PadicNumber>> cycle = {x};
    long long n = 0;
    for (long long l = 1; l <= period_bound; ++l) {
        ProjPoint<PadicNumber> nxt = apply(F, cycle.back(), 1);
        if (indistinguishable(nxt, x)) {
            n = l;
            break;
        }
        cycle.push_back(std::move(nxt));
    }
    if (n == 0)
        throw NotPeriodic("periodic_orbit_of: no period up to " + std::to_string(period_bound));

    std::vector<ProjPoint<PadicNumber>> pts;
    pts.reserve(depth + 1);
    for (long long i = 0; i <= depth; ++i) pts.push_back(cycle[((n - i % n) % n)]);
    return CoherentOrbit(F, std::move(pts));
}

ConjugacyReport conjugacy_audit(const CoherentOrbit& orbit) {
    if (orbit.depth() < 2)
        throw DepthInsufficient("conjugacy_audit: need depth at least 2");

    TiltPoint w = tilt_of_orbit(orbit);

    std::vector<ProjPoint<PadicNumber>> shifted;
    shifted.reserve(orbit.points().size() + 1);
    shifted.push_back(apply(orbit.map(), orbit.points()[0], 1));
    for (const auto& pt : orbit.points()) shifted.push_back(pt);
    TiltPoint ws = tilt_of_orbit(CoherentOrbit(orbit.map(), std::move(shifted)));

    if (ws.pivot() != w.pivot())
        throw ChartInstability("conjugacy_audit: tilts landed in different charts");

    ConjugacyReport rep;
    rep.clean = true;
    bool have_cut = false;
    bool have_bad = false;
    BigRat worst_val;
    std::string worst_norm = "0";
    for (size_t j = 0; j < w.coords().size(); ++j) {
        TiltElement rhs = tilt_frobenius(w.coords()[j], orbit.map().s());
        TiltElement lhs = ws.coords()[j];
        BigRat cut;
        bool cut_known = false;
        if (!lhs.cutoff_infinite()) {
            cut = lhs.cutoff();
            cut_known = true;
        }
        if (!rhs.cutoff_infinite() && (!cut_known || rhs.cutoff() < cut)) {
            cut = rhs.cutoff();
            cut_known = true;
        }
        TiltElement diff = cut_known ? (lhs.truncated(cut) - rhs.truncated(cut)) : (lhs - rhs);
        if (cut_known && (!have_cut || cut < rep.cutoff)) {
            rep.cutoff = cut;
            have_cut = true;
        }
        if (!diff.is_zero_at_precision()) {
            rep.clean = false;
            if (!have_bad || diff.val() < worst_val) {
                worst_val = diff.val();
                worst_norm = diff.norm_str();
                have_bad = true;
            }
        } else if (!have_bad && worst_norm == "0" && !diff.is_exact_zero()) {
            worst_norm = diff.norm_str(); // O(p^-cutoff): the certified bound
        }
    }
    rep.max_discrepancy_norm = worst_norm;
    return rep;
}

} // namespace padiclab
