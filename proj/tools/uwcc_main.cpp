// uwcc — underwater color correction CLI.
//
// Subcommands take a JSON job/manifest file; see README for the schemas.
// Exit codes: 0 ok, 2 validation error, 3 numerical failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "uwcc/pipeline.hpp"

namespace {

int run(const std::string& cmd, const std::string& path) {
    try {
        if (cmd == "evaluate") {
            uwcc::run_evaluate(uwcc::load_manifest(path));
        } else {
            uwcc::FrameJob job = uwcc::load_job(path);
            if (cmd == "simulate") uwcc::run_simulate(job);
            else if (cmd == "estimate") uwcc::run_estimate(job);
            else if (cmd == "correct") uwcc::run_correct(job);
            else uwcc::run_correct_sparse(job);
        }
        return 0;
    } catch (const uwcc::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const uwcc::numeric_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Physics-based underwater image color correction"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        const char* arg_help;
    };
    const Sub subs[] = {
        {"simulate", "Degrade a clean frame through the water model", "job JSON file"},
        {"estimate", "Estimate attenuation coefficients from a chart frame", "job JSON file"},
        {"correct", "Dense-correct a frame with a scalar range", "job JSON file"},
        {"correct-sparse", "Correct patches around tracked keypoints", "job JSON file"},
        {"evaluate", "Score corrected series against the chart", "manifest JSON file"},
    };

    std::string cmd, path;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        auto* opt = sub->add_option("file", s.arg_help);
        opt->required()->check(CLI::ExistingFile);
        sub->callback([&cmd, &path, sub, opt, name = std::string(s.name)] {
            cmd = name;
            path = opt->as<std::string>();
            (void)sub;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return run(cmd, path);
}
