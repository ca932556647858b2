#include "padiclab/experiments.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "padiclab/closure.hpp"
#include "padiclab/orbit.hpp"
#include "padiclab/parallel.hpp"

namespace padiclab {

namespace {

using nlohmann::ordered_json;

// ---------- realizing config blocks ----------

LocalFieldPtr realize_field(const FieldBlock& fb) {
    LocalFieldPtr U = local_field(fb.p, fb.r, fb.prec);
    if (fb.eisenstein.empty()) return U;
    std::vector<PadicNumber> coeffs;
    coeffs.reserve(fb.eisenstein.size());
    for (long long c : fb.eisenstein) coeffs.push_back(U->from_int(c));
    return eisenstein_step(U, coeffs, fb.prec);
}

FrobeniusLift realize_map(const ExperimentConfig& cfg, const LocalFieldPtr& K) {
    std::vector<Poly<PadicNumber>> P;
    const int nv = cfg.map.N + 1;
    P.reserve(cfg.map.perturbations.size());
    for (const auto& text : cfg.map.perturbations) P.push_back(parse_poly(K, nv, text));
    return FrobeniusLift(K, cfg.map.s, std::move(P));
}

Variety realize_variety(const ExperimentConfig& cfg, const LocalFieldPtr& K) {
    if (cfg.variety_generators.empty())
        throw ConfigError(cfg.experiment.kind + " needs a variety block");
    std::vector<Poly<PadicNumber>> gens;
    gens.reserve(cfg.variety_generators.size());
    for (const auto& text : cfg.variety_generators)
        gens.push_back(parse_poly(K, cfg.map.N + 1, text));
    return Variety(std::move(gens));
}

std::optional<long long> parse_ll(const std::string& s) {
    size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (pos != s.size() || s.empty()) return std::nullopt;
    return v;
}

/// A start coordinate: an integer, or T(a) for the Teichmueller lift of the
/// residue a, written 0, 1, g, or g^k with g the residue field generator.
PadicNumber parse_coordinate(const std::string& text, const LocalFieldPtr& K) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.rfind("T(", 0) == 0 && !t.empty() && t.back() == ')') {
        const std::string inner = t.substr(2, t.size() - 3);
        const FqFieldPtr& kF = K->residue_field();
        FqElement a = kF->zero();
        if (inner == "g") {
            a = kF->gen();
        } else if (inner.rfind("g^", 0) == 0) {
            auto e = parse_ll(inner.substr(2));
            if (!e || *e < 0) throw ConfigError("bad Teichmueller exponent in '" + text + "'");
            a = kF->gen().pow(static_cast<std::uint64_t>(*e));
        } else {
            auto n = parse_ll(inner);
            if (!n) throw ConfigError("bad residue '" + inner + "' in '" + text + "'");
            a = kF->from_int(*n);
        }
        return teichmuller_lift(a, K);
    }
    auto v = parse_ll(t);
    if (!v) throw ConfigError("bad start coordinate '" + text + "'");
    return K->from_int(*v);
}

ProjPoint<PadicNumber> realize_start(const ExperimentConfig& cfg, const LocalFieldPtr& K) {
    if (cfg.experiment.start.empty())
        throw ConfigError(cfg.experiment.kind + " needs 'start = [..]' in the experiment block");
    if (static_cast<int>(cfg.experiment.start.size()) != cfg.map.N + 1)
        throw ConfigError("start point needs exactly N+1 coordinates");
    std::vector<PadicNumber> cs;
    cs.reserve(cfg.experiment.start.size());
    for (const auto& t : cfg.experiment.start) cs.push_back(parse_coordinate(t, K));
    return normalize_point(std::move(cs));
}

// ---------- output plumbing ----------

std::string join_tabs(const std::vector<std::string>& cells) {
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) line += '\t';
        line += cells[i];
    }
    return line;
}

void header_line(ExperimentOutcome& out, const std::string& k, const std::string& v) {
    out.tsv.push_back("# " + k + "=" + v);
    out.data["meta"][k] = v;
}

ExperimentOutcome begin_outcome(const ExperimentConfig& cfg, const LocalFieldPtr& K,
                                const FrobeniusLift& F) {
    ExperimentOutcome out;
    out.data = ordered_json::object();
    out.data["meta"] = ordered_json::object();
    header_line(out, "experiment", cfg.experiment.kind);
    header_line(out, "field", K->str());
    header_line(out, "map", F.str());
    if (!cfg.variety_generators.empty()) {
        std::string g;
        for (size_t i = 0; i < cfg.variety_generators.size(); ++i)
            g += (i ? "; " : "") + cfg.variety_generators[i];
        header_line(out, "variety", g);
    }
    header_line(out, "precision", std::to_string(cfg.experiment.precision));
    header_line(out, "seed", std::to_string(cfg.experiment.seed));
    return out;
}

// ---------- shared measurement helpers ----------

struct PointCheck {
    Distance dist;
    bool member = false;
};

PointCheck classify_point(const ProjPoint<PadicNumber>& pt, const Variety& V, long long R) {
    PointCheck c;
    c.dist = distance_to_variety(pt, V, Rat(R));
    c.member = c.dist.is_zero_at_precision();
    return c;
}

// ---------- backward-orbit construction ----------

/// Certified p-digits shared by every coordinate of b.
long long certified_digits(const ProjPoint<PadicNumber>& b, const LocalFieldPtr& K) {
    long long k = rat_floor(K->default_prec());
    for (size_t j = 0; j < b.coords().size(); ++j) {
        if (static_cast<int>(j) == b.pivot()) continue;
        const PadicNumber& c = b.coords()[j];
        if (c.is_exact_zero() || c.abs_prec().is_infinite()) continue;
        k = std::min(k, rat_floor(c.abs_prec().finite()));
    }
    return k;
}

/// Largest M the backward solver accepts for this target: the digit loop
/// reads the target to level M + s + vmax + 4, so that consumption must fit
/// inside the certified window.  vmax mirrors the solver's own estimate
/// (coordinate valuations capped at M, unknown ones counted as M).
long long choose_step_M(const ProjPoint<PadicNumber>& b, const FrobeniusLift& F,
                        long long floor_M) {
    const long long k = certified_digits(b, F.field());
    for (long long M = k - F.s() - 4; M >= floor_M; --M) {
        long long vmax = 0;
        for (size_t j = 0; j < b.coords().size(); ++j) {
            if (static_cast<int>(j) == b.pivot()) continue;
            const PadicNumber& c = b.coords()[j];
            long long v = M;
            if (c.state() == PadicNumber::State::kRegular) {
                v = rat_floor(c.val().finite());
                if (v < 0) v = 0;
                if (v > M) v = M;
            }
            vmax = std::max(vmax, v);
        }
        if (M + F.s() + vmax + 4 <= k) return M;
    }
    throw PrecisionLoss(
        "backward step would drop below the report precision; raise the field prec");
}

struct Frontier {
    long long at = 0; // depth of the point with no preimage over the field
    int digit = -1;
    std::string what;
};

/// One backward path of the requested depth.  Canonical mode follows branch
/// 0 of every fiber and stops at the first obstruction; random mode explores
/// the fiber tree depth-first in seeded shuffled order and backtracks
/// through dead branches, returning the deepest coherent stretch it saw if
/// no path reaches the full depth.
std::vector<ProjPoint<PadicNumber>> backward_path(const FrobeniusLift& F,
                                                  const ProjPoint<PadicNumber>& start,
                                                  long long depth, long long floor_M,
                                                  bool random, std::uint64_t seed,
                                                  std::optional<Frontier>& frontier) {
    std::vector<ProjPoint<PadicNumber>> pts = {start};
    if (!random) {
        for (long long i = 1; i <= depth; ++i) {
            try {
                long long M = choose_step_M(pts.back(), F, floor_M);
                pts.push_back(backward_step(F, pts.back(), M)[0]);
            } catch (const ExtensionRequired& e) {
                frontier = Frontier{i - 1, e.obstructed_digit, e.what()};
                break;
            }
        }
        return pts;
    }
    std::mt19937_64 rng(seed);
    std::vector<ProjPoint<PadicNumber>> best = pts;
    std::optional<Frontier> deepest;
    std::function<bool()> dfs = [&]() -> bool {
        if (static_cast<long long>(pts.size()) - 1 == depth) return true;
        std::vector<ProjPoint<PadicNumber>> pre;
        try {
            long long M = choose_step_M(pts.back(), F, floor_M);
            pre = backward_step(F, pts.back(), M);
        } catch (const ExtensionRequired& e) {
            long long lvl = static_cast<long long>(pts.size()) - 1;
            if (!deepest || lvl > deepest->at)
                deepest = Frontier{lvl, e.obstructed_digit, e.what()};
            return false;
        }
        // hand-rolled Fisher-Yates so the shuffle is identical on every
        // platform for a fixed seed
        for (size_t a = pre.size(); a > 1; --a)
            std::swap(pre[a - 1], pre[rng() % a]);
        for (auto& y : pre) {
            pts.push_back(std::move(y));
            if (static_cast<long long>(pts.size()) > static_cast<long long>(best.size()))
                best = pts;
            if (dfs()) return true;
            pts.pop_back();
        }
        return false;
    };
    if (!dfs()) {
        frontier = deepest;
        return best;
    }
    return pts;
}

/// Every fiber node level by level, parent order then branch order, so the
/// enumeration is deterministic under any thread count.
struct TreeLevels {
    std::vector<std::vector<ProjPoint<PadicNumber>>> levels;
    std::optional<Frontier> frontier; // set when the whole tree dies early
};

TreeLevels backward_tree(const FrobeniusLift& F, const ProjPoint<PadicNumber>& start,
                         long long depth, long long floor_M, unsigned threads,
                         std::size_t node_cap = 4096) {
    TreeLevels T;
    T.levels.push_back({start});
    for (long long i = 1; i <= depth; ++i) {
        const auto& parents = T.levels.back();
        std::vector<std::vector<ProjPoint<PadicNumber>>> kids(parents.size());
        std::vector<std::optional<Frontier>> dead(parents.size());
        parallel_for(parents.size(), [&](size_t j) {
            try {
                long long M = choose_step_M(parents[j], F, floor_M);
                kids[j] = backward_step(F, parents[j], M);
            } catch (const ExtensionRequired& e) {
                dead[j] = Frontier{i - 1, e.obstructed_digit, e.what()};
            }
        }, threads);
        std::vector<ProjPoint<PadicNumber>> next;
        std::optional<Frontier> fr;
        for (size_t j = 0; j < parents.size(); ++j) {
            if (dead[j] && !fr) fr = dead[j];
            for (auto& y : kids[j]) next.push_back(std::move(y));
            if (next.size() > node_cap)
                throw ResourceLimit("backward tree exceeds the node cap");
        }
        if (next.empty()) {
            T.frontier = fr;
            break;
        }
        T.levels.push_back(std::move(next));
    }
    return T;
}

// ---------- residue covering ----------

using ResPt = ProjPoint<FqElement>;

bool in_list(const std::vector<ResPt>& L, const ResPt& x) {
    for (const auto& y : L)
        if (indistinguishable(y, x)) return true;
    return false;
}

ResPt frob_point(const ResPt& x, long long sm, bool inverse) {
    std::vector<FqElement> cs;
    cs.reserve(x.coords().size());
    for (const auto& c : x.coords()) cs.push_back(frobenius_s(c, sm, inverse));
    return normalize_point(std::move(cs));
}

/// Least r with every chain residue inside the union of F^i images,
/// 0 <= i <= r, of the member's inverse-Frobenius residue orbit.
std::optional<long long> covering_index(const std::vector<ResPt>& chain,
                                        const ResPt& member, long long s,
                                        long long bound) {
    std::vector<ResPt> orbit = {member};
    while (true) {
        ResPt nxt = frob_point(orbit.back(), s, true);
        if (indistinguishable(nxt, orbit.front())) break;
        orbit.push_back(std::move(nxt));
        if (orbit.size() > 4096) throw ResourceLimit("residue orbit failed to close");
    }
    std::vector<ResPt> covered = orbit;
    for (long long r = 0; r <= bound; ++r) {
        if (r > 0)
            for (const auto& o : orbit) {
                ResPt img = frob_point(o, s * r, false);
                if (!in_list(covered, img)) covered.push_back(std::move(img));
            }
        bool all = true;
        for (const auto& c : chain)
            if (!in_list(covered, c)) {
                all = false;
                break;
            }
        if (all) return r;
    }
    return std::nullopt;
}

// ---------- the four drivers ----------

ExperimentOutcome tv_gap_impl(const ExperimentConfig& cfg, unsigned threads) {
    const LocalFieldPtr K = realize_field(cfg.field);
    const FrobeniusLift F = realize_map(cfg, K);
    const Variety V = realize_variety(cfg, K);
    const long long R = cfg.experiment.precision;
    const long long M = R + 4;
    const long long bound = cfg.experiment.period_bound;
    if (R < 2) throw ConfigError("tv_gap needs precision >= 2");
    if (bound < 1) throw ConfigError("tv_gap needs period_bound >= 1");

    ExperimentOutcome out = begin_outcome(cfg, K, F);
    header_line(out, "period_bound", std::to_string(bound));
    out.tsv.push_back(join_tabs({"m", "count", "members", "level_delta", "delta", "stabilized"}));
    out.data["rows"] = ordered_json::array();

    bool have_gap = false;
    Rat gap_val; // valuation of the running minimum distance over nonmembers
    std::vector<std::optional<Rat>> deltas;
    bool stabilized = false;
    for (long long m = 1; m <= bound; ++m) {
        auto per = enumerate_periodic(F, static_cast<int>(m), M);
        std::vector<PointCheck> checks(per.size());
        parallel_for(per.size(), [&](size_t i) {
            checks[i] = classify_point(per[i].point, V, R);
        }, threads);
        long long members = 0;
        bool have_level = false;
        Rat level_val;
        for (const auto& c : checks) {
            if (c.member) {
                ++members;
                continue;
            }
            Rat v = c.dist.val.finite();
            if (!have_level || v > level_val) {
                level_val = v;
                have_level = true;
            }
        }
        if (have_level && (!have_gap || level_val > gap_val)) {
            gap_val = level_val;
            have_gap = true;
        }
        deltas.push_back(have_gap ? std::optional<Rat>(gap_val) : std::nullopt);

        std::string level_str = have_level ? Valu(level_val).norm_str(K->p()) : "-";
        std::string delta_str = have_gap ? Valu(gap_val).norm_str(K->p()) : "-";
        std::string stab = "-";
        if (m == bound && bound >= 2 && deltas[static_cast<size_t>(bound - 1)] &&
            deltas[static_cast<size_t>(bound - 2)]) {
            stabilized = *deltas[static_cast<size_t>(bound - 1)] ==
                         *deltas[static_cast<size_t>(bound - 2)];
            stab = stabilized ? "yes" : "no";
        }
        out.tsv.push_back(join_tabs({std::to_string(m), std::to_string(per.size()),
                                     std::to_string(members), level_str, delta_str, stab}));
        ordered_json row;
        row["m"] = m;
        row["count"] = static_cast<long long>(per.size());
        row["members"] = members;
        row["level_delta"] = level_str;
        row["delta"] = delta_str;
        out.data["rows"].push_back(std::move(row));

        // the verified statement guarantees a uniform positive gap; the
        // running minimum sinking to half the membership precision is
        // treated as a collapse toward zero
        if (have_gap && Rat(2) * gap_val >= Rat(R)) {
            std::ostringstream os;
            os << "tv_gap: the minimum distance over nonmember periodic points fell to "
               << Valu(gap_val).norm_str(K->p()) << " at period " << m
               << ", inside the membership window " << K->p() << "^-" << R;
            throw TheoremViolation(os.str());
        }
    }
    out.data["stabilized"] = stabilized;
    return out;
}

ExperimentOutcome dmm_impl(const ExperimentConfig& cfg, unsigned threads) {
    const LocalFieldPtr K = realize_field(cfg.field);
    const FrobeniusLift F = realize_map(cfg, K);
    const Variety V = realize_variety(cfg, K);
    const long long R = cfg.experiment.precision;
    const long long M = R + 4;
    const long long bound = cfg.experiment.period_bound;
    const bool hyper = V.generators().size() == 1;

    ExperimentOutcome out = begin_outcome(cfg, K, F);
    header_line(out, "period_bound", std::to_string(bound));
    header_line(out, "l_bound", std::to_string(cfg.experiment.l_bound));

    InvarianceResult inv;
    if (hyper) {
        inv = invariance_check_hypersurface(F, V.generators()[0], cfg.experiment.l_bound);
        header_line(out, "invariant", inv.invariant ? "yes" : "no");
        if (inv.invariant) {
            header_line(out, "l", std::to_string(inv.l));
            header_line(out, "quotient", inv.quotient.str());
        } else {
            if (inv.witness_point) header_line(out, "witness_point", *inv.witness_point);
            if (inv.witness_value) header_line(out, "witness_value", inv.witness_value->str());
        }
    } else {
        header_line(out, "invariant", "not-tested (several generators; sampled evidence only)");
    }

    out.tsv.push_back(join_tabs({"m", "count", "on_variety", "forward_stay"}));
    out.data["rows"] = ordered_json::array();
    for (long long m = 1; m <= bound; ++m) {
        auto per = enumerate_periodic(F, static_cast<int>(m), M);
        struct Row {
            bool member = false;
            bool stays = false;
        };
        std::vector<Row> rr(per.size());
        parallel_for(per.size(), [&](size_t i) {
            PointCheck c = classify_point(per[i].point, V, R);
            bool stays = false;
            if (c.member) stays = classify_point(apply(F, per[i].point), V, R).member;
            rr[i] = {c.member, stays};
        }, threads);
        long long on = 0, stay = 0;
        for (size_t i = 0; i < rr.size(); ++i) {
            if (!rr[i].member) continue;
            ++on;
            if (rr[i].stays) ++stay;
            else if (hyper && inv.invariant) {
                std::ostringstream os;
                os << "dmm_check: " << per[i].point.str()
                   << " lies on the invariant variety but its forward image leaves it";
                throw TheoremViolation(os.str());
            }
        }
        out.tsv.push_back(join_tabs({std::to_string(m), std::to_string(per.size()),
                                     std::to_string(on), std::to_string(stay)}));
        ordered_json row;
        row["m"] = m;
        row["count"] = static_cast<long long>(per.size());
        row["on_variety"] = on;
        row["forward_stay"] = stay;
        out.data["rows"].push_back(std::move(row));
    }
    out.data["invariant"] = hyper ? ordered_json(inv.invariant) : ordered_json(nullptr);
    if (hyper && inv.invariant) out.data["l"] = inv.l;
    return out;
}

ExperimentOutcome backward_impl(const ExperimentConfig& cfg, unsigned threads) {
    const LocalFieldPtr K = realize_field(cfg.field);
    const FrobeniusLift F = realize_map(cfg, K);
    const Variety V = realize_variety(cfg, K);
    const ProjPoint<PadicNumber> start = realize_start(cfg, K);
    const long long R = cfg.experiment.precision;
    const long long D = cfg.experiment.depth;
    if (D < 1) throw ConfigError("backward_dml needs depth >= 1");
    if (R < 2) throw ConfigError("backward_dml needs precision >= 2");

    ExperimentOutcome out = begin_outcome(cfg, K, F);
    header_line(out, "depth", std::to_string(D));
    header_line(out, "branch", cfg.experiment.branch);
    header_line(out, "degree_bound", std::to_string(cfg.experiment.degree_bound));
    {
        std::string s;
        for (size_t i = 0; i < cfg.experiment.start.size(); ++i)
            s += (i ? ", " : "") + cfg.experiment.start[i];
        header_line(out, "start", "[" + s + "]");
    }

    std::vector<std::vector<ProjPoint<PadicNumber>>> levels;
    std::optional<Frontier> frontier;
    if (cfg.experiment.branch == "all") {
        TreeLevels T = backward_tree(F, start, D, R + 2, threads);
        levels = std::move(T.levels);
        frontier = T.frontier;
    } else {
        auto path = backward_path(F, start, D, R + 2,
                                  cfg.experiment.branch == "random", cfg.experiment.seed,
                                  frontier);
        for (auto& pt : path) levels.push_back({std::move(pt)});
    }

    struct Item {
        long long level;
        long long node;
        const ProjPoint<PadicNumber>* pt;
    };
    std::vector<Item> items;
    for (size_t i = 0; i < levels.size(); ++i)
        for (size_t n = 0; n < levels[i].size(); ++n)
            items.push_back({static_cast<long long>(i), static_cast<long long>(n),
                             &levels[i][n]});
    std::vector<PointCheck> checks(items.size());
    std::vector<ResPt> residues;
    residues.reserve(items.size());
    for (const auto& it : items) residues.push_back(reduction_map(*it.pt));
    parallel_for(items.size(), [&](size_t t) {
        checks[t] = classify_point(*items[t].pt, V, R);
    }, threads);

    out.tsv.push_back(join_tabs({"i", "node", "point", "distance", "member"}));
    out.data["rows"] = ordered_json::array();
    bool have_gap = false;
    Rat gap_val;
    std::optional<size_t> first_member;
    for (size_t t = 0; t < items.size(); ++t) {
        const bool member = checks[t].member;
        if (member && !first_member) first_member = t;
        if (!member) {
            Rat v = checks[t].dist.val.finite();
            if (!have_gap || v > gap_val) {
                gap_val = v;
                have_gap = true;
            }
        }
        out.tsv.push_back(join_tabs({std::to_string(items[t].level),
                                     std::to_string(items[t].node), items[t].pt->str(),
                                     checks[t].dist.norm_str(), member ? "yes" : "no"}));
        ordered_json row;
        row["i"] = items[t].level;
        row["node"] = items[t].node;
        row["point"] = items[t].pt->str();
        row["distance"] = checks[t].dist.norm_str();
        row["member"] = member;
        out.data["rows"].push_back(std::move(row));
    }

    const std::string gap_str = have_gap ? Valu(gap_val).norm_str(K->p()) : "-";
    out.tsv.push_back("# gap=" + gap_str);
    out.data["gap"] = gap_str;
    long long member_count = 0;
    for (const auto& c : checks)
        if (c.member) ++member_count;
    out.tsv.push_back("# members=" + std::to_string(member_count));
    out.data["members"] = member_count;

    if (frontier) {
        out.tsv.push_back("# frontier_depth=" + std::to_string(frontier->at));
        out.tsv.push_back("# frontier_digit=" + std::to_string(frontier->digit));
        out.data["frontier"] = ordered_json::object();
        out.data["frontier"]["depth"] = frontier->at;
        out.data["frontier"]["digit"] = frontier->digit;
        out.data["frontier"]["what"] = frontier->what;
    }

    if (first_member) {
        const ResPt& mres = residues[*first_member];
        ClosureReport crep = closure_of_root_orbit(
            mres, mres.pivot(), F.s(), cfg.experiment.degree_bound, K->residue_field()->r());
        if (!crep.stability.stable)
            throw TheoremViolation(
                "backward_dml: the covering closure ideal is not Frobenius stable");
        auto cov = covering_index(residues, mres, F.s(),
                                  crep.residue_period + static_cast<long long>(levels.size()));
        out.tsv.push_back("# covering_r=" + (cov ? std::to_string(*cov) : std::string("-")));
        out.tsv.push_back("# closure_period=" + std::to_string(crep.residue_period));
        out.tsv.push_back("# closure_stable_r=" + std::to_string(crep.stability.r));
        out.tsv.push_back(std::string("# closure_saturated=") +
                          (crep.saturated ? "yes" : "no"));
        std::string ideal;
        auto lines = crep.ideal.str_lines();
        for (size_t i = 0; i < lines.size(); ++i) ideal += (i ? "; " : "") + lines[i];
        out.tsv.push_back("# closure_ideal=" + ideal);
        out.data["covering_r"] = cov ? ordered_json(*cov) : ordered_json(nullptr);
        out.data["closure"] = ordered_json::object();
        out.data["closure"]["period"] = crep.residue_period;
        out.data["closure"]["stable_r"] = crep.stability.r;
        out.data["closure"]["saturated"] = crep.saturated;
        out.data["closure"]["ideal"] = lines;
    }
    return out;
}

ExperimentOutcome tilt_impl(const ExperimentConfig& cfg, unsigned threads) {
    const LocalFieldPtr K = realize_field(cfg.field);
    const FrobeniusLift F = realize_map(cfg, K);
    const long long R = cfg.experiment.precision;
    const long long M = R + 4;
    const long long D = cfg.experiment.depth;
    const long long bound = cfg.experiment.period_bound;

    ExperimentOutcome out = begin_outcome(cfg, K, F);
    header_line(out, "depth", std::to_string(D));
    header_line(out, "period_bound", std::to_string(bound));

    if (!cfg.experiment.start.empty()) {
        if (cfg.experiment.branch == "all")
            throw ConfigError("tilt_demo audits one orbit; branch must be canonical or random");
        const ProjPoint<PadicNumber> start = realize_start(cfg, K);
        std::optional<Frontier> frontier;
        auto pts = backward_path(F, start, D, R + 2, cfg.experiment.branch == "random",
                                 cfg.experiment.seed, frontier);
        if (frontier)
            throw ExtensionRequired("tilt_demo: the backward orbit is obstructed at depth " +
                                        std::to_string(frontier->at),
                                    frontier->digit);
        CoherentOrbit orb(F, std::move(pts));
        ConjugacyReport rep = conjugacy_audit(orb);
        TiltPoint tp = tilt_of_orbit(orb);
        header_line(out, "orbit_depth", std::to_string(orb.depth()));
        header_line(out, "audit_clean", rep.clean ? "yes" : "no");
        header_line(out, "audit_cutoff", rep.cutoff.str());
        header_line(out, "audit_norm", rep.max_discrepancy_norm);
        header_line(out, "tilt", tp.str());
        if (!rep.clean)
            throw TheoremViolation("tilt_demo: the shift/Frobenius audit found a discrepancy " +
                                   rep.max_discrepancy_norm);
    }

    out.tsv.push_back(join_tabs(
        {"m", "residue", "period", "depth", "constant", "audit_cutoff", "audit_norm"}));
    out.data["rows"] = ordered_json::array();
    const long long Dm = std::max<long long>(D, 2);
    for (long long m = 1; m <= bound; ++m) {
        auto per = enumerate_periodic(F, static_cast<int>(m), M);
        struct Row {
            std::string residue;
            int period = 1;
            bool constant = false;
            std::string cutoff;
            std::string norm;
            bool clean = false;
        };
        std::vector<Row> rows(per.size());
        parallel_for(per.size(), [&](size_t i) {
            CoherentOrbit orb = periodic_orbit_of(F, per[i].point, Dm, m);
            TiltPoint tp = tilt_of_orbit(orb);
            ConjugacyReport rep = conjugacy_audit(orb);
            bool ok = true;
            for (size_t j = 0; j < tp.coords().size(); ++j) {
                const TiltElement& z = tp.coords()[j];
                const FqElement& a = per[i].residue.coords()[j];
                if (z.terms().empty()) {
                    if (!a.is_zero()) ok = false;
                } else if (z.terms().size() != 1 || z.terms()[0].exp != BigRat(0)) {
                    ok = false;
                } else {
                    auto [x, y] = fq_promote(z.terms()[0].coeff, a);
                    if (!(x == y)) ok = false;
                }
            }
            rows[i] = {per[i].residue.str(), per[i].period, ok,
                       rep.cutoff.str(),    rep.max_discrepancy_norm, rep.clean};
        }, threads);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].constant)
                throw TheoremViolation("tilt_demo: periodic point with residue " +
                                       rows[i].residue + " tilts to a nonconstant series");
            if (!rows[i].clean)
                throw TheoremViolation("tilt_demo: audit discrepancy " + rows[i].norm +
                                       " at residue " + rows[i].residue);
            out.tsv.push_back(join_tabs({std::to_string(m), rows[i].residue,
                                         std::to_string(rows[i].period), std::to_string(Dm),
                                         "yes", rows[i].cutoff, rows[i].norm}));
            ordered_json row;
            row["m"] = m;
            row["residue"] = rows[i].residue;
            row["period"] = rows[i].period;
            row["depth"] = Dm;
            row["constant"] = true;
            row["audit_cutoff"] = rows[i].cutoff;
            row["audit_norm"] = rows[i].norm;
            out.data["rows"].push_back(std::move(row));
        }
    }
    return out;
}

} // namespace

ExperimentOutcome run_tv_gap(const ExperimentConfig& cfg, unsigned threads) {
    return tv_gap_impl(cfg, threads);
}
ExperimentOutcome run_dmm_check(const ExperimentConfig& cfg, unsigned threads) {
    return dmm_impl(cfg, threads);
}
ExperimentOutcome run_backward_dml(const ExperimentConfig& cfg, unsigned threads) {
    return backward_impl(cfg, threads);
}
ExperimentOutcome run_tilt_demo(const ExperimentConfig& cfg, unsigned threads) {
    return tilt_impl(cfg, threads);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    const std::string& k = cfg.experiment.kind;
    if (k == "tv_gap") return run_tv_gap(cfg, threads);
    if (k == "dmm_check") return run_dmm_check(cfg, threads);
    if (k == "backward_dml") return run_backward_dml(cfg, threads);
    if (k == "tilt_demo") return run_tilt_demo(cfg, threads);
    throw ConfigError("unknown experiment kind '" + k + "'");
}

void write_outcome(const ExperimentOutcome& out, const std::string& dir,
                   const std::string& base) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream f(fs::path(dir) / (base + ".tsv"), std::ios::binary);
        if (!f) throw ConfigError("cannot write outputs under '" + dir + "'");
        for (const auto& line : out.tsv) f << line << "\n";
    }
    {
        std::ofstream f(fs::path(dir) / (base + ".json"), std::ios::binary);
        if (!f) throw ConfigError("cannot write outputs under '" + dir + "'");
        f << out.data.dump(2) << "\n";
    }
}

} // namespace padiclab
