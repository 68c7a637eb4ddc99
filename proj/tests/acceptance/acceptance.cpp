// One line per acceptance criterion; exit status is the number of failures.

#include "permsym/checks.hpp"

#include <fmt/format.h>

#include <functional>
#include <string>
#include <vector>

using namespace permsym::checks;

int main(int argc, char** argv)
{
    // Optional argument: run only the listed criteria, e.g. "1,7,10".
    std::vector<bool> selected(11, argc < 2);
    if (argc >= 2) {
        std::string list = argv[1];
        std::size_t pos = 0;
        while (pos < list.size()) {
            const auto next = list.find(',', pos);
            const int k = std::stoi(list.substr(pos, next - pos));
            if (k >= 1 && k <= 10) selected[static_cast<std::size_t>(k)] = true;
            pos = next == std::string::npos ? list.size() : next + 1;
        }
    }
    const std::vector<std::function<CheckResult()>> criteria = {
        [] { return dense_equivalence(3); },
        [] { return dimension_anchors(); },
        [] { return method_agreement(6, 4); },
        [] { return star_isomorphism(4); },
        [] { return schur_weyl_dimensions(8); },
        [] { return monotonicity(50, 4); },
        [] { return fidelity_anchors(); },
        [] { return multiplicativity(5); },
        [] { return flagged_additivity(5); },
        [] { return scale_demo(0.1, 10, 4, 1800.0); },
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i + 1]) continue;
        const auto r = criteria[i]();
        failures += r.pass ? 0 : 1;
        fmt::print("AC{} {} {} ({:.1f}s): {}\n", i + 1, r.pass ? "PASS" : "FAIL", r.name, r.seconds, r.detail);
        std::fflush(stdout);
    }
    return failures;
}
