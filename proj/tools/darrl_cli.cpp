#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "darrl/abstract_rl.hpp"
#include "darrl/cat_io.hpp"
#include "darrl/harness.hpp"

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_summary(const darrl::AlgorithmSummary& s, double level) {
    std::printf("%-11s runs=%d reached_%.2f=%d median_episodes=%s final_mean=%.3f\n", darrl::to_string(s.algorithm).c_str(),
                s.runs, level, s.reached,
                s.median_episodes ? darrl::format_number(*s.median_episodes).c_str() : "n/a", s.final_mean);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"darrl: dynamic abstraction refinement for Q-learning"};
    app.require_subcommand(1);

    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> env;
    std::optional<int> size;
    std::optional<int> episodes;
    std::optional<std::string> out;

    auto* train = app.add_subcommand("train", "run one algorithm over the configured seeds");
    train->add_option("--config", config_file, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    train->add_option("--seed", seed, "run this single seed instead of the config's list");
    train->add_option("--env", env, "environment name");
    train->add_option("--size", size, "environment size");
    train->add_option("--episodes", episodes, "training episodes per run");
    train->add_option("--out", out, "output directory");

    double level = 0.9;
    auto* compare = app.add_subcommand("compare", "run dar_rl and q_learning on shared seeds");
    compare->add_option("--config", config_file, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    compare->add_option("--level", level, "success level for the episodes-to-reach summary")->capture_default_str();

    std::string cat_file;
    auto* dot = app.add_subcommand("export-dot", "render a tree document as Graphviz DOT on stdout");
    dot->add_option("--cat", cat_file, "tree document (JSON)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            darrl::ConfigOverrides ov;
            ov.seed = seed;
            ov.env = env;
            ov.size = size;
            ov.episodes = episodes;
            if (out) ov.out = *out;
            const auto cfg = darrl::load_experiment_config(config_file, ov);
            const auto set = darrl::run_experiment(cfg);
            print_summary(darrl::summarize(cfg.algorithm, set.runs, 0.9), 0.9);
            std::printf("wrote %zu files to %s\n", set.files.size(), set.root.string().c_str());
        } else if (*compare) {
            const auto cfg = darrl::load_experiment_config(config_file);
            const auto res = darrl::run_compare(cfg, level);
            print_summary(res.dar_rl, level);
            print_summary(res.q_learning, level);
            std::printf("wrote %zu files to %s\n", res.artifacts.files.size(), res.artifacts.root.string().c_str());
        } else if (*dot) {
            std::cout << darrl::export_cat_dot(read_text(cat_file));
        }
    } catch (const darrl::ConfigError& e) {
        std::cerr << "config error:\n";
        for (const auto& p : e.problems()) std::cerr << "  - " << p << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
