#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spellbench/cli.hpp"

namespace {

void add_norm_flags(CLI::App* cmd, spellbench::NormConfig& norm, std::string& zwj) {
    cmd->add_flag("--no-nfc", [&norm](std::int64_t) { norm.unicode_form = false; },
                  "skip canonical composition (NFC)");
    cmd->add_option("--zwj", zwj, "zero-width joiner policy")
        ->check(CLI::IsMember({"keep", "strip", "cluster"}))
        ->default_val("cluster");
    cmd->add_flag("--lowercase", norm.lowercase, "lowercase before comparing");
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = spellbench::cli;

    CLI::App app{"spellbench: hallucination-robust spell-correction evaluation and error injection"};
    app.require_subcommand(1);

    std::string zwj = "cluster";

    cli::EvaluateOptions eval;
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold sentences");
    evaluate->add_option("jsonl", eval.jsonl, "JSONL file of {original, predicted, expected} records");
    evaluate->add_option("--parallel", eval.parallel, "original, predicted and expected line files")
        ->expected(3);
    evaluate->add_flag("--legacy", eval.legacy, "positional word-by-word comparison without alignment");
    evaluate->add_option("--report", eval.report_path, "write the JSON report here");
    add_norm_flags(evaluate, eval.norm, zwj);

    cli::EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "estimate an error model from noisy/clean parallel text");
    estimate->add_option("noisy", est.noisy, "noisy sentences, one per line")->required();
    estimate->add_option("clean", est.clean, "clean sentences, one per line")->required();
    estimate->add_option("--out", est.out, "model JSON path (default: stdout)");
    add_norm_flags(estimate, est.norm, zwj);

    cli::InjectOptions inj;
    double pass_through = -1.0;
    auto* inject = app.add_subcommand("inject", "inject synthetic spelling errors into clean text");
    inject->add_option("input", inj.input, "clean sentences, one per line")->required();
    inject->add_option("--model", inj.model, "error model JSON")->required();
    inject->add_option("--pass-through", pass_through, "probability that a word stays unchanged")
        ->check(CLI::Range(0.0, 1.0));
    inject->add_option("--seed", inj.seed, "random seed")->default_val(0);
    inject->add_option("--max-edits", inj.max_edits, "edits per corrupted word (upper bound)")
        ->check(CLI::PositiveNumber)
        ->default_val(1);
    inject->add_option("--out", inj.out, "output path")->required();
    add_norm_flags(inject, inj.norm, zwj);

    cli::MeasureOptions meas;
    auto* measure = app.add_subcommand("measure", "share of grapheme clusters differing from the clean text");
    measure->add_option("noisy", meas.noisy, "noisy sentences")->required();
    measure->add_option("clean", meas.clean, "clean sentences")->required();
    add_norm_flags(measure, meas.norm, zwj);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kExitFatal;
    }

    const auto policy = spellbench::parse_zwj_policy(zwj);
    if (evaluate->parsed()) {
        eval.norm.zwj_policy = policy;
        return cli::cmd_evaluate(eval, std::cout, std::cerr);
    }
    if (estimate->parsed()) {
        est.norm.zwj_policy = policy;
        return cli::cmd_estimate(est, std::cout, std::cerr);
    }
    if (inject->parsed()) {
        inj.norm.zwj_policy = policy;
        if (pass_through >= 0.0) inj.pass_through = pass_through;
        return cli::cmd_inject(inj, std::cout, std::cerr);
    }
    meas.norm.zwj_policy = policy;
    return cli::cmd_measure(meas, std::cout, std::cerr);
}
