#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "padiclab/config.hpp"
#include "padiclab/errors.hpp"
#include "padiclab/experiments.hpp"

using namespace padiclab;

namespace {

std::string cfg_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool has(const std::string& s, const std::string& needle) {
    return s.find(needle) != std::string::npos;
}

const char* kSquareDiag = R"(# squaring map on the projective line
field {
    p = 2
    r = 1
    prec = 32
}
map {
    s = 1
    N = 1
    P = [0, 0]
}
variety {
    generators = [x0 - x1]
}
experiment {
    kind = tv_gap
    period_bound = 2
    precision = 8
}
output {
    path = diag
}
)";

} // namespace

TEST_CASE("config: full round trip") {
    std::string text = R"(field {
    p = 2
    r = 2
    prec = 48
}
map {
    p = 2
    s = 1
    N = 1
    P = [
        x0*x1,
        0
    ]
}
variety {
    generators = [x0 - x1, x1^2]
}
experiment {
    kind = backward_dml
    period_bound = 3
    depth = 5
    precision = 6
    degree_bound = 2
    seed = 11
    branch = random
    start = [1, T(g)]
    l_bound = 4
}
output {
    path = demo_run
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    CHECK(cfg.field.p == 2);
    CHECK(cfg.field.r == 2);
    CHECK(cfg.field.prec == 48);
    CHECK(cfg.field.eisenstein.empty());
    CHECK(cfg.map.s == 1);
    CHECK(cfg.map.N == 1);
    REQUIRE(cfg.map.perturbations.size() == 2);
    CHECK(cfg.map.perturbations[0] == "x0*x1");
    CHECK(cfg.map.perturbations[1] == "0");
    REQUIRE(cfg.variety_generators.size() == 2);
    CHECK(cfg.variety_generators[1] == "x1^2");
    CHECK(cfg.experiment.kind == "backward_dml");
    CHECK(cfg.experiment.period_bound == 3);
    CHECK(cfg.experiment.depth == 5);
    CHECK(cfg.experiment.precision == 6);
    CHECK(cfg.experiment.degree_bound == 2);
    CHECK(cfg.experiment.seed == 11);
    CHECK(cfg.experiment.branch == "random");
    REQUIRE(cfg.experiment.start.size() == 2);
    CHECK(cfg.experiment.start[1] == "T(g)");
    CHECK(cfg.experiment.l_bound == 4);
    CHECK(cfg.output_path == "demo_run");
}

TEST_CASE("config: eisenstein entry and defaults") {
    std::string text = R"(field {
    p = 3
    eisenstein = [3, 0, 1]
}
map {
    s = 1
    N = 1
    P = [0, 0]
}
experiment {
    kind = tilt_demo
}
output {
    path = e
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    CHECK(cfg.field.p == 3);
    CHECK(cfg.field.r == 1);             // defaulted
    REQUIRE(cfg.field.eisenstein.size() == 3);
    CHECK(cfg.field.eisenstein[0] == 3);
    CHECK(cfg.field.eisenstein[2] == 1);
    CHECK(cfg.experiment.period_bound == 4); // defaulted
    CHECK(cfg.experiment.branch == "canonical");
    CHECK(cfg.variety_generators.empty());
}

TEST_CASE("config: rejections carry line numbers") {
    // unknown key in the field block, line 2
    CHECK(has(cfg_error("field {\n bogus = 3\n}\n"), "config line 2"));
    CHECK(has(cfg_error("field {\n bogus = 3\n}\n"), "unknown key 'bogus'"));
    // unknown block
    CHECK(has(cfg_error("blob {\n}\n"), "unknown block 'blob'"));
    // unterminated block and list
    CHECK(has(cfg_error("field {\n p = 2\n"), "unterminated block 'field'"));
    CHECK(has(cfg_error("map {\n P = [x0,\n"), "unterminated '[' list"));
    // non-integer scalar
    CHECK(has(cfg_error("field {\n p = two\n}\n"), "expected an integer"));
    // trailing text after a list
    CHECK(has(cfg_error("map {\n P = [0, 0] junk\n}\n"), "trailing text after ']'"));
    // empty list item
    CHECK(has(cfg_error("map {\n P = [0,, 0]\n}\n"), "empty list item"));
    // eisenstein must be monic
    CHECK(has(cfg_error("field {\n eisenstein = [2, 2]\n}\n"), "monic"));
    // map p must agree with the field block
    std::string mism = "field {\n p = 2\n}\nmap {\n p = 3\n s = 1\n N = 1\n P = [0, 0]\n}\n";
    CHECK(has(cfg_error(mism), "map p disagrees"));
    // branch vocabulary
    CHECK(has(cfg_error("experiment {\n kind = tv_gap\n branch = sideways\n}\n"),
              "branch must be canonical, random, or all"));
    // duplicate block
    CHECK(has(cfg_error("field {\n}\nfield {\n}\n"), "duplicate field block"));
}

TEST_CASE("config: whole-file validation") {
    CHECK(has(cfg_error("field {\n p = 2\n}\n"), "missing map block"));
    std::string no_out = "field {\n}\nmap {\n N = 1\n P = [0, 0]\n}\nexperiment {\n kind = tv_gap\n}\n";
    CHECK(has(cfg_error(no_out), "missing output block"));
    std::string bad_kind =
        "field {\n}\nmap {\n N = 1\n P = [0, 0]\n}\nexperiment {\n kind = nope\n}\noutput {\n path = x\n}\n";
    CHECK(has(cfg_error(bad_kind), "unknown experiment kind 'nope'"));
    std::string arity =
        "field {\n}\nmap {\n N = 2\n P = [0, 0]\n}\nexperiment {\n kind = tv_gap\n}\noutput {\n path = x\n}\n";
    CHECK(has(cfg_error(arity), "exactly N+1"));
}

TEST_CASE("config: file loading") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "padiclab_cfg_test";
    fs::create_directories(dir);
    fs::path file = dir / "a.cfg";
    {
        std::ofstream f(file);
        f << kSquareDiag;
    }
    ExperimentConfig cfg = parse_config_file(file.string());
    CHECK(cfg.experiment.kind == "tv_gap");
    CHECK(cfg.output_path == "diag");
    CHECK_THROWS_AS(parse_config_file((dir / "missing.cfg").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("tv_gap: squaring keeps the diagonal at distance one") {
    ExperimentConfig cfg = parse_config_text(kSquareDiag);
    ExperimentOutcome out = run_experiment(cfg, 2);

    // census 3 and 5, one member (the Teichmueller point over residue 1)
    // per level, minimum nonmember distance 1 throughout
    REQUIRE(out.data["rows"].size() == 2);
    CHECK(out.data["rows"][0]["m"] == 1);
    CHECK(out.data["rows"][0]["count"] == 3);
    CHECK(out.data["rows"][0]["members"] == 1);
    CHECK(out.data["rows"][0]["delta"] == "1");
    CHECK(out.data["rows"][1]["count"] == 5);
    CHECK(out.data["rows"][1]["members"] == 1);
    CHECK(out.data["rows"][1]["delta"] == "1");
    CHECK(out.data["stabilized"] == true);
    CHECK(out.data["meta"]["experiment"] == "tv_gap");

    // last tsv row carries the stabilization verdict
    REQUIRE(!out.tsv.empty());
    CHECK(has(out.tsv.back(), "yes"));
}

TEST_CASE("tv_gap: a distance collapse aborts the run") {
    // the perturbed map fixes [1 : -1] exactly, at distance 1/2 from the
    // diagonal; report precision 2 puts that inside the collapse window
    std::string text = R"(field {
    p = 2
    prec = 32
}
map {
    s = 1
    N = 1
    P = [x0*x1, 0]
}
variety {
    generators = [x0 - x1]
}
experiment {
    kind = tv_gap
    period_bound = 1
    precision = 2
}
output {
    path = collapse
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    CHECK_THROWS_AS(run_experiment(cfg, 1), TheoremViolation);
}

TEST_CASE("tv_gap: needs a variety block") {
    std::string text =
        "field {\n}\nmap {\n N = 1\n P = [0, 0]\n}\nexperiment {\n kind = tv_gap\n}\noutput {\n path = x\n}\n";
    ExperimentConfig cfg = parse_config_text(text);
    CHECK_THROWS_AS(run_experiment(cfg, 1), ConfigError);
}

TEST_CASE("dmm_check: the standard conic is invariant under squaring") {
    std::string text = R"(field {
    p = 2
    prec = 24
}
map {
    s = 1
    N = 2
    P = [0, 0, 0]
}
variety {
    generators = [x0*x2 - x1^2]
}
experiment {
    kind = dmm_check
    period_bound = 2
    precision = 6
}
output {
    path = conic
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    ExperimentOutcome out = run_experiment(cfg, 2);
    CHECK(out.data["meta"]["invariant"] == "yes");
    CHECK(out.data["meta"]["l"] == "1");
    CHECK(out.data["invariant"] == true);
    REQUIRE(out.data["rows"].size() == 2);
    CHECK(out.data["rows"][0]["count"] == 7);
    CHECK(out.data["rows"][0]["on_variety"] == 3);
    CHECK(out.data["rows"][0]["forward_stay"] == 3);
    CHECK(out.data["rows"][1]["count"] == 21);
    CHECK(out.data["rows"][1]["on_variety"] == 5);
    CHECK(out.data["rows"][1]["forward_stay"] == 5);
}

TEST_CASE("dmm_check: a moved hyperplane is reported, not fatal") {
    std::string text = R"(field {
    p = 2
    prec = 24
}
map {
    s = 1
    N = 1
    P = [x0*x1, 0]
}
variety {
    generators = [x0 - x1]
}
experiment {
    kind = dmm_check
    period_bound = 2
    precision = 6
    l_bound = 3
}
output {
    path = moved
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    ExperimentOutcome out = run_experiment(cfg, 2);
    CHECK(out.data["meta"]["invariant"] == "no");
    CHECK(out.data["invariant"] == false);
    CHECK(out.data["meta"].contains("witness_value"));
    REQUIRE(out.data["rows"].size() == 2);
    CHECK(out.data["rows"][0]["count"] == 3);
}

TEST_CASE("backward_dml: an all-member chain reports its covering closure") {
    std::string text = R"(field {
    p = 2
    prec = 32
}
map {
    s = 1
    N = 1
    P = [0, 0]
}
variety {
    generators = [x0 - x1]
}
experiment {
    kind = backward_dml
    depth = 3
    precision = 6
    degree_bound = 2
    branch = canonical
    start = [1, 1]
}
output {
    path = member_chain
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    ExperimentOutcome out = run_experiment(cfg, 2);
    REQUIRE(out.data["rows"].size() == 4);
    for (const auto& row : out.data["rows"]) CHECK(row["member"] == true);
    CHECK(out.data["gap"] == "-");
    CHECK(out.data["members"] == 4);
    CHECK(!out.data.contains("frontier"));
    CHECK(out.data["covering_r"] == 0);
    CHECK(out.data["closure"]["period"] == 1);
    CHECK(out.data["closure"]["saturated"] == true);
    // field header line plus the echelon basis of the point ideal at x0 = 1
    REQUIRE(out.data["closure"]["ideal"].size() == 3);
}

TEST_CASE("backward_dml: obstruction frontiers are reported in-band") {
    // 9 has the square roots -3 and 3 in Z_2, neither of which is a square
    std::string base = R"(field {
    p = 2
    prec = 24
}
map {
    s = 1
    N = 1
    P = [0, 0]
}
variety {
    generators = [x0 - x1]
}
experiment {
    kind = backward_dml
    depth = 3
    precision = 6
    seed = 5
    start = [1, 9]
)";
    for (std::string branch : {"canonical", "random", "all"}) {
        std::string text = base + "    branch = " + branch + "\n}\noutput {\n    path = ob\n}\n";
        ExperimentConfig cfg = parse_config_text(text);
        ExperimentOutcome out = run_experiment(cfg, 2);
        REQUIRE(out.data.contains("frontier"));
        CHECK(out.data["frontier"]["depth"] == 1);
        CHECK(out.data["members"] == 0);
        // canonical and random walk one branch; all holds both roots
        size_t expect_rows = branch == "all" ? 3 : 2;
        CHECK(out.data["rows"].size() == expect_rows);
        CHECK(out.data["gap"] == "2^-3"); // |1 - 9| = 2^-3 beats |1 -(+-3)|
    }
}

TEST_CASE("backward_dml: precision exhaustion is a PrecisionLoss") {
    std::string text = R"(field {
    p = 2
    prec = 16
}
map {
    s = 1
    N = 1
    P = [0, 0]
}
variety {
    generators = [x0 - x1]
}
experiment {
    kind = backward_dml
    depth = 12
    precision = 6
    start = [1, 1]
}
output {
    path = shallow
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    CHECK_THROWS_AS(run_experiment(cfg, 1), PrecisionLoss);
}

TEST_CASE("tilt_demo: teichmueller orbit audits clean and census is constant") {
    // the canonical branch from [1 : T(g)] runs into the exact sixth root
    // of unity 1 + g, whose fiber is empty over this field; the seeded
    // depth-first mode backtracks through such dead ends
    std::string text = R"(field {
    p = 2
    r = 2
    prec = 48
}
map {
    s = 1
    N = 1
    P = [0, 0]
}
experiment {
    kind = tilt_demo
    depth = 4
    period_bound = 2
    precision = 6
    branch = random
    seed = 3
    start = [1, T(g)]
}
output {
    path = teich
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    ExperimentOutcome out = run_experiment(cfg, 2);
    CHECK(out.data["meta"]["orbit_depth"] == "4");
    CHECK(out.data["meta"]["audit_clean"] == "yes");
    CHECK(out.data["meta"].contains("tilt"));
    REQUIRE(out.data["rows"].size() == 8); // 3 points over F_2, 5 over F_4
    for (const auto& row : out.data["rows"]) CHECK(row["constant"] == true);
}

TEST_CASE("tilt_demo: a depth-1 start orbit cannot be audited") {
    std::string text = R"(field {
    p = 2
    r = 2
    prec = 48
}
map {
    s = 1
    N = 1
    P = [0, 0]
}
experiment {
    kind = tilt_demo
    depth = 1
    period_bound = 1
    precision = 6
    start = [1, T(g)]
}
output {
    path = shallow_tilt
}
)";
    ExperimentConfig cfg = parse_config_text(text);
    CHECK_THROWS_AS(run_experiment(cfg, 1), DepthInsufficient);
}

TEST_CASE("experiment outputs are thread-count independent and written intact") {
    ExperimentConfig cfg = parse_config_text(kSquareDiag);
    ExperimentOutcome a = run_experiment(cfg, 1);
    ExperimentOutcome b = run_experiment(cfg, 4);
    CHECK(a.tsv == b.tsv);
    CHECK(a.data.dump(2) == b.data.dump(2));

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "padiclab_out_test";
    fs::remove_all(dir);
    write_outcome(a, dir.string(), "diag");
    write_outcome(b, dir.string(), "diag_again");
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream os;
        os << f.rdbuf();
        return os.str();
    };
    std::string tsv1 = slurp(dir / "diag.tsv");
    CHECK(tsv1 == slurp(dir / "diag_again.tsv"));
    CHECK(slurp(dir / "diag.json") == slurp(dir / "diag_again.json"));
    std::string joined;
    for (const auto& line : a.tsv) joined += line + "\n";
    CHECK(tsv1 == joined);
    CHECK(slurp(dir / "diag.json") == a.data.dump(2) + "\n");
    fs::remove_all(dir);
}

TEST_CASE("start point realization rejects malformed coordinates") {
    std::string base = R"(field {
    p = 2
    r = 2
    prec = 32
}
map {
    s = 1
    N = 1
    P = [0, 0]
}
variety {
    generators = [x0 - x1]
}
experiment {
    kind = backward_dml
    depth = 1
    precision = 4
)";
    auto with_start = [&](const std::string& start) {
        return base + "    start = " + start + "\n}\noutput {\n    path = s\n}\n";
    };
    // arity
    ExperimentConfig one = parse_config_text(with_start("[1]"));
    CHECK_THROWS_AS(run_experiment(one, 1), ConfigError);
    // unparseable coordinate
    ExperimentConfig bad = parse_config_text(with_start("[1, fish]"));
    CHECK_THROWS_AS(run_experiment(bad, 1), ConfigError);
    ExperimentConfig bade = parse_config_text(with_start("[1, T(g^x)]"));
    CHECK_THROWS_AS(run_experiment(bade, 1), ConfigError);
    // missing start entirely
    ExperimentConfig none = parse_config_text(base + "}\noutput {\n    path = s\n}\n");
    CHECK_THROWS_AS(run_experiment(none, 1), ConfigError);
    // a teichmueller power parses and runs
    ExperimentConfig ok = parse_config_text(with_start("[1, T(g^2)]"));
    ExperimentOutcome out = run_experiment(ok, 1);
    CHECK(out.data["rows"].size() == 2);
}
