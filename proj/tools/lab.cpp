// Command-line driver: parses an experiment config, runs it, and writes the
// TSV/JSON outputs.  Exit codes: 0 success (including reported obstruction
// frontiers), 1 configuration or arithmetic errors, 2 a violated verified
// statement, 3 a resource cap.
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "padiclab/config.hpp"
#include "padiclab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic experiments for lifts of Frobenius on projective space"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    unsigned threads = 0;
    long long precision = -1;

    CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--threads", threads, "worker threads, 0 = hardware default");
    run->add_option("--precision", precision, "override the config's report precision");

    CLI11_PARSE(app, argc, argv);

    try {
        padiclab::ExperimentConfig cfg = padiclab::parse_config_file(config_path);
        if (precision >= 0) cfg.experiment.precision = precision;
        padiclab::ExperimentOutcome out = padiclab::run_experiment(cfg, threads);
        const std::string base =
            cfg.output_path.empty() ? cfg.experiment.kind : cfg.output_path;
        padiclab::write_outcome(out, out_dir, base);
        std::printf("%s/%s.tsv\n%s/%s.json\n", out_dir.c_str(), base.c_str(),
                    out_dir.c_str(), base.c_str());
        return 0;
    } catch (const padiclab::TheoremViolation& e) {
        std::fprintf(stderr, "theorem violation: %s\n", e.what());
        return 2;
    } catch (const padiclab::ResourceLimit& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
