#include "padiclab/proj.hpp"

namespace padiclab {

ProjPoint<FqElement> reduction_map(const ProjPoint<PadicNumber>& x) {
    std::vector<FqElement> res;
    res.reserve(x.coords().size());
    for (const auto& c : x.coords()) res.push_back(reduce_residue(c));
    return normalize_point(std::move(res));
}

Variety::Variety(std::vector<Poly<PadicNumber>> generators) {
    if (generators.empty()) throw ConfigError("a variety needs at least one generator");
    nvars_ = generators[0].nvars();
    gens_.reserve(generators.size());
    for (auto& g : generators) {
        if (g.nvars() != nvars_)
            throw InvalidDegree("variety generators disagree on the ambient dimension");
        if (!g.is_homogeneous()) throw InvalidDegree("variety generators must be homogeneous");
        gens_.push_back(gauss_normalize(g)); // rejects the zero polynomial
    }
}

std::string Distance::norm_str() const {
    switch (kind) {
        case Kind::kExactZero: return "0";
        case Kind::kZeroAtPrecision: {
            std::ostringstream os;
            os << "O(" << p << "^-" << rat_str(val.finite()) << ")";
            return os.str();
        }
        case Kind::kPositive: return val.norm_str(p);
    }
    return "";
}

Distance distance_to_variety(const ProjPoint<PadicNumber>& y, const Variety& V,
                             std::optional<Rat> certify_threshold) {
    if (static_cast<int>(y.coords().size()) != V.nvars())
        throw InvalidDegree("point and variety live in different projective spaces");
    const LocalFieldPtr& F = y.coords()[y.pivot()].field();
    Rat threshold = certify_threshold
                        ? *certify_threshold
                        : F->default_prec() - Rat(2, F->e());
    bool all_exact_zero = true;
    Valu bound = Valu::infinity();      // min over every generator's val / fog bound
    Valu regular_min = Valu::infinity(); // min over certified generator valuations
    for (const auto& g : V.generators()) {
        PadicNumber v = g.eval(y.coords());
        switch (v.state()) {
            case PadicNumber::State::kExactZero:
                break;
            case PadicNumber::State::kRegular: {
                all_exact_zero = false;
                Valu val = v.val();
                if (val < regular_min) regular_min = val;
                if (val < bound) bound = val;
                break;
            }
            case PadicNumber::State::kBelowPrecision: {
                all_exact_zero = false;
                Valu b = v.val_lower_bound();
                if (b < bound) bound = b;
                break;
            }
        }
    }
    Distance out;
    out.threshold = threshold;
    out.p = F->p();
    if (all_exact_zero) {
        out.kind = Distance::Kind::kExactZero;
        out.val = Valu::infinity();
        return out;
    }
    if (!(bound < Valu(threshold))) {
        out.kind = Distance::Kind::kZeroAtPrecision;
        out.val = bound;
        return out;
    }
    // a certified positive distance requires the minimum to be witnessed by a
    // regular value, with no fog strictly below it
    if (regular_min == bound) {
        out.kind = Distance::Kind::kPositive;
        out.val = regular_min;
        return out;
    }
    throw PrecisionLoss("distance not certifiable: fog below the smallest certified value");
}

} // namespace padiclab
