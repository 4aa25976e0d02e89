// Acceptance gate: runs the twelve committed experiment configs and holds
// each to its check set and wall-clock budget. One line per criterion.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bbm/experiments.hpp"

namespace {

struct Criterion {
    const char* file;
    const char* what;
    double budget_seconds;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {"criterion01.json", "index relations, ranges, reference packs", 1.0},
        {"criterion02.json", "partition of unity and block reconstruction", 5.0},
        {"criterion03.json", "group unitarity, composition, commutation", 5.0},
        {"criterion04.json", "propagator grid vs direct kernel quadrature", 60.0},
        {"criterion05.json", "decay envelope domination, rates, p=2 constancy", 120.0},
        {"criterion06.json", "multiplier and decay quotients with drift control", 180.0},
        {"criterion07.json", "product estimates across nine index tuples", 120.0},
        {"criterion08.json", "space-time bounds, nesting, custom symbol", 300.0},
        {"criterion09.json", "fixed-point solver, scaling, weighted persistence", 180.0},
        {"criterion10.json", "traveling waves: profiles, propagation, invariants", 120.0},
        {"criterion11.json", "weighted convolution bound and regime rejection", 1.0},
        {"criterion12.json", "byte-identical rerun of a full experiment", 10.0},
    };
    return list;
}

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path config_dir =
        argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::path(BBM_ACCEPT_CONFIGS);
    const std::filesystem::path out_dir =
        std::filesystem::temp_directory_path() / "bbm_acceptance_out";
    std::filesystem::remove_all(out_dir);

    int failed = 0, index = 0;
    for (const Criterion& cr : criteria()) {
        ++index;
        std::string verdict = "PASS";
        std::string detail;
        int checks = 0;
        double elapsed = 0.0;

        try {
            std::ifstream in(config_dir / cr.file, std::ios::binary);
            if (!in) throw std::runtime_error("cannot read " + (config_dir / cr.file).string());
            std::ostringstream buf;
            buf << in.rdbuf();
            const bbm::json raw = bbm::json::parse(buf.str());

            const auto t0 = std::chrono::steady_clock::now();
            const bbm::ExperimentOutcome out = bbm::run_config(raw, out_dir.string());
            elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            checks = static_cast<int>(out.manifest.at("checks").size());
            if (!out.all_pass) {
                verdict = "FAIL";
                for (const auto& ch : out.manifest.at("checks"))
                    if (!ch.at("pass").get<bool>())
                        detail += "\n        failed check: " + ch.at("name").get<std::string>();
            }
            if (elapsed > cr.budget_seconds) {
                verdict = "FAIL";
                detail += "\n        over budget";
            }
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = std::string("\n        error: ") + e.what();
        }

        if (verdict == "FAIL") ++failed;
        std::printf("%s  %02d  %-52s %2d checks  %6.2fs <= %gs%s\n", verdict.c_str(), index,
                    cr.what, checks, elapsed, cr.budget_seconds, detail.c_str());
        std::fflush(stdout);
    }

    if (failed > 0) std::printf("%d of %zu criteria failed\n", failed, criteria().size());
    return failed == 0 ? 0 : 1;
}
