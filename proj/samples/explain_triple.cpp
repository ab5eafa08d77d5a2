// Prints the three-way alignment and counts for one triple.
//
//   explain_triple "original" "predicted" "expected"

#include <iomanip>
#include <iostream>

#include "spellbench/spellbench.hpp"

int main(int argc, char** argv) {
    using namespace spellbench;
    EvalTriple t{"I am going to the librari to studdy", "I am going to the public library to study",
                 "I am going to the library to study"};
    if (argc == 4) t = {argv[1], argv[2], argv[3]};

    const auto aligned = triple_align(t);
    auto show = [](const std::optional<std::string>& s) { return s ? *s : std::string("-"); };
    std::cout << std::left << std::setw(14) << "original" << std::setw(14) << "predicted" << std::setw(14)
              << "expected" << "\n";
    for (const auto& r : aligned.records) {
        std::cout << std::setw(14) << show(r.original_token) << std::setw(14) << show(r.predicted_token)
                  << std::setw(14) << show(r.expected_token) << (r.hallucinated ? "hallucinated" : "") << "\n";
    }
    const std::vector<EvalTriple> corpus{t};
    const auto report = evaluate_corpus(corpus);
    std::cout << "\ndetection F1 " << report.detection.f1 << ", correction F0.5 " << report.correction.f0_5 << "\n";
    std::cout << report_to_json(report).dump(2) << "\n";
}
