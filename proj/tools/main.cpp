#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sgkdv/io.hpp"
#include "sgkdv/manifest.hpp"
#include "sgkdv/run.hpp"

namespace {

struct Args {
    std::string manifest;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    unsigned jobs = 1;
};

void print(const sgkdv::RunResult& r) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
    for (const auto& g : r.gates)
        std::cout << (g.passed ? "PASS " : "FAIL ") << g.name << (g.detail.empty() ? "" : "  (" + g.detail + ")")
                  << "\n";
    if (!r.out_dir.empty()) std::cout << "output: " << r.out_dir.string() << "\n";
}

int run_experiment(const std::string& name, const Args& a) {
    std::string text;
    try {
        text = sgkdv::read_file(a.manifest);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    sgkdv::ParseOutcome p = sgkdv::parse_manifest(text);
    if (p.ok() && p.manifest->experiment != name) {
        std::cerr << "error: manifest experiment is '" << p.manifest->experiment << "' but subcommand is '" << name
                  << "'\n";
        return 2;
    }
    sgkdv::RunOptions opt;
    opt.out = a.out;
    opt.seed = a.seed;
    opt.jobs = a.jobs;
    const sgkdv::RunResult r = p.ok() ? sgkdv::run(std::move(*p.manifest), opt, p.warnings)
                                      : sgkdv::run_text(text, opt);
    print(r);
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sgkdv: stochastic generalized KdV numerical lab"};
    app.require_subcommand(1);
    Args args;
    int code = 0;
    for (const char* name :
         {"simulate", "oscint", "probe-kato", "probe-strichartz", "beta", "ensemble", "scatter"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
        sub->add_option("--manifest", args.manifest, "manifest JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", args.seed, "override the manifest seed");
        sub->add_option("--out", args.out, "output directory");
        sub->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->callback([&args, &code, n = std::string(name)] { code = run_experiment(n, args); });
    }
    std::string dir;
    CLI::App* rep = app.add_subcommand("report", "merge ensemble partials and aggregate gate results");
    rep->add_option("--out", dir, "directory holding run outputs")->required();
    rep->callback([&] {
        const sgkdv::RunResult r = sgkdv::report(dir);
        print(r);
        code = r.exit_code;
    });
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int c = app.exit(e);
        return c == 0 ? 0 : 2;
    }
    return code;
}
