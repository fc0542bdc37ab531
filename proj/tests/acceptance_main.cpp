#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "smax/acceptance.hpp"
#include "smax/report.hpp"

namespace {

void usage(const char* prog) {
    std::fprintf(stderr,
                 "usage: %s [--only CHECK] [--seed U64] [--threads N] [--list]\n", prog);
}

}  // namespace

int main(int argc, char** argv) {
    std::uint64_t seed = smax::kAcceptanceSeed;
    int threads = 1;
    std::string only;
    bool list = false;

    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = argv[++i];
        } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            threads = std::atoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--list") == 0) {
            list = true;
        } else {
            usage(argv[0]);
            return 2;
        }
    }

    const auto& names = smax::acceptance_names();
    if (list) {
        for (const auto& n : names) std::printf("%s\n", n.c_str());
        return 0;
    }
    if (!only.empty()) {
        bool known = false;
        for (const auto& n : names) known = known || n == only;
        if (!known) {
            std::fprintf(stderr, "unknown check: %s\n", only.c_str());
            return 2;
        }
    }

    bool all_ok = true;
    for (const auto& name : names) {
        if (!only.empty() && name != only) continue;
        const auto start = std::chrono::steady_clock::now();
        try {
            auto records = smax::run_acceptance(name, seed, threads);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            const bool ok = smax::all_pass(records);
            std::printf("[%s] %-22s %3zu records  %6.1fs\n", ok ? "PASS" : "FAIL",
                        name.c_str(), records.size(), secs);
            std::fflush(stdout);
            if (!ok) {
                all_ok = false;
                std::fputs(smax::failing_lines(records).c_str(), stderr);
            }
        } catch (const std::exception& e) {
            std::printf("[FAIL] %-22s (error: %s)\n", name.c_str(), e.what());
            std::fflush(stdout);
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}
