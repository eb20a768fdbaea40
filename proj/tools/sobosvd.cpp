#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sobosvd/error.hpp"
#include "sobosvd/experiment.hpp"
#include "sobosvd/parallel.hpp"
#include "sobosvd/testlib.hpp"
#include "sobosvd/verify.hpp"

namespace {

void apply_threads(std::size_t requested) {
    std::size_t n = requested;
    if (const char* env = std::getenv("SOBOSVD_THREADS")) {
        try {
            n = std::stoul(env);
        } catch (const std::exception&) {
            std::cerr << "sobosvd: ignoring SOBOSVD_THREADS='" << env << "'\n";
        }
    }
    sobosvd::set_thread_count(n == 0 ? 1 : n);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted SVD/HOSVD of sampled functions with Sobolev-norm error checks"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    std::size_t threads = 1;
    auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
    run->add_option("--config", config, "Config file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides the config)");
    run->add_option("--threads", threads, "Worker threads (SOBOSVD_THREADS overrides)");

    std::string case_spec;
    std::vector<std::size_t> sizes;
    auto* verify = app.add_subcommand("verify", "Run the check suite on one catalog case");
    verify->add_option("--case", case_spec, "Case name, e.g. SINSUM(1,0.5)")->required();
    verify->add_option("--n", sizes, "Grid size, one value or one per mode")->required()->expected(1, -1);
    verify->add_option("--threads", threads, "Worker threads (SOBOSVD_THREADS overrides)");

    auto* list = app.add_subcommand("list-cases", "List the analytic catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sobosvd::kExitConfig;
    }

    apply_threads(threads);

    if (*run) {
        std::optional<std::filesystem::path> out;
        if (!out_dir.empty()) out = out_dir;
        return sobosvd::run(config, out);
    }

    if (*verify) {
        try {
            return sobosvd::verify_case(case_spec, sizes, std::cout);
        } catch (const sobosvd::Error& e) {
            std::cerr << "sobosvd: " << e.what() << "\n";
            return sobosvd::kExitConfig;
        }
    }

    if (*list) {
        for (const std::string& name : sobosvd::list_cases()) {
            const sobosvd::AnalyticCase c = sobosvd::get_case(name);
            std::cout << name << "\t" << c.dim << "d\t" << c.description << "\n";
        }
    }
    return 0;
}
