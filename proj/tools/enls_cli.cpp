#include "enls/run.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <string>

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    long seed = -1;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "JSON configuration file")->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", opts.seed, "override the config seed");
    sub->add_option("--threads", opts.threads, "override the config thread count");
}

int execute(const std::string& experiment, const CommonOpts& opts) {
    enls::json config;
    try {
        config = enls::load_json_file(opts.config_path);
    } catch (const enls::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return enls::exit_io;
    } catch (const enls::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return enls::exit_config;
    }
    if (!config.is_object()) {
        std::fprintf(stderr, "error: config root must be a JSON object\n");
        return enls::exit_config;
    }
    if (config.contains("experiment") && config.at("experiment") != experiment) {
        std::fprintf(stderr, "error: config experiment '%s' does not match subcommand '%s'\n",
                     config.at("experiment").get<std::string>().c_str(), experiment.c_str());
        return enls::exit_config;
    }
    config["experiment"] = experiment;
    if (opts.seed >= 0) config["seed"] = opts.seed;
    if (opts.threads > 0) config["threads"] = opts.threads;

    const enls::RunResult result = enls::run(config, opts.out_dir);
    std::printf("%s\n", result.summary.dump(2).c_str());
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral simulator for expectation-coupled cubic Schrodinger dynamics"};
    app.require_subcommand(1);

    const char* experiments[] = {"simulate",     "equilibrium-check", "perturbed",
                                 "blowup",       "sphere-lemma",      "operator-compare",
                                 "scattering-probe"};
    const char* blurbs[] = {
        "evolve an ensemble and record conservation diagnostics",
        "measure phase accuracy and density drift on an exact equilibrium",
        "track the modified energy of a perturbed equilibrium",
        "drive a focusing ensemble to the virial blow-up criterion",
        "check spherical harmonic kernel sums and quadrature orthonormality",
        "compare operator-flow covariance with the evolved mode ensemble",
        "probe scattering via Cauchy differences or the Morawetz rate"};

    std::vector<CommonOpts> opts(std::size(experiments));
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(experiments); ++i) {
        CLI::App* sub = app.add_subcommand(experiments[i], blurbs[i]);
        add_common(sub, opts[i]);
        subs.push_back(sub);
    }

    std::string cmp_a, cmp_b;
    CLI::App* cmp = app.add_subcommand("compare", "diff the diagnostics of two finished runs");
    cmp->add_option("run_a", cmp_a, "first run directory")->required();
    cmp->add_option("run_b", cmp_b, "second run directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (cmp->parsed()) {
        try {
            const enls::json report = enls::compare(cmp_a, cmp_b);
            std::printf("%s\n", report.dump(2).c_str());
            return report.value("identical", false) ? enls::exit_ok : 1;
        } catch (const enls::IoError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return enls::exit_io;
        }
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) return execute(experiments[i], opts[i]);
    return enls::exit_config;
}
