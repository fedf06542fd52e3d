// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Thresholds are pinned inside pbg::checks.

#include <cstdio>

#include "pbg/checks.hpp"

int main() {
    const auto results = pbg::checks::run_all({});
    bool all_pass = true;
    int index = 1;
    for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %-48s measured %.3e  threshold %.3e\n",
                    r.pass ? "PASS" : "FAIL", index++, r.name.c_str(), r.measured, r.threshold);
        if (!r.detail.empty()) {
            std::printf("                  %s\n", r.detail.c_str());
        }
        all_pass = all_pass && r.pass;
    }
    std::printf("acceptance: %s\n", all_pass ? "PASS" : "FAIL");
    return all_pass ? 0 : 1;
}
