#pragma once

// Implementations of the spellbench subcommands. Each returns the process
// exit status: 0 success, 1 fatal I/O or format error, 2 finished with
// per-line errors.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spellbench/inject.hpp"
#include "spellbench/io.hpp"
#include "spellbench/metrics.hpp"
#include "spellbench/parallel.hpp"

namespace spellbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

inline constexpr std::size_t kChunkLines = 4096;

struct EvaluateOptions {
    std::string jsonl;                  // canonical input
    std::vector<std::string> parallel;  // or: original, predicted, expected
    NormConfig norm;
    bool legacy = false;
    std::string report_path;
};

struct EstimateOptions {
    std::string noisy;
    std::string clean;
    std::string out;  // empty: stdout
    NormConfig norm;
};

struct InjectOptions {
    std::string input;
    std::string model;
    std::optional<double> pass_through;  // default: model's pass_through_default
    std::uint64_t seed = 0;
    unsigned max_edits = 1;
    std::string out;
    NormConfig norm;
};

struct MeasureOptions {
    std::string noisy;
    std::string clean;
    NormConfig norm;
};

namespace detail {

inline bool readable(const std::string& path, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot open " << path << "\n";
        return false;
    }
    return true;
}

struct PendingLine {
    std::size_t line;
    std::optional<EvalTriple> triple;
    std::string error;
};

// Evaluates one chunk in parallel and folds the results in input order.
inline void evaluate_chunk(std::vector<PendingLine>& chunk, const NormConfig& norm, EvalMode mode,
                           CorpusAccumulator& acc, std::vector<LineError>& errors) {
    std::vector<std::optional<std::vector<TripleRecord>>> records(chunk.size());
    parallel_for(chunk.size(), [&](std::size_t i) {
        auto& p = chunk[i];
        if (!p.triple) return;
        try {
            records[i] = evaluation_records(*p.triple, norm, mode);
        } catch (const std::exception& ex) {
            p.error = ex.what();
        }
    });
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        if (records[i]) acc.add_records(*records[i]);
        else errors.push_back({chunk[i].line, chunk[i].error});
    }
    chunk.clear();
}

inline std::string fmt(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

}  // namespace detail

inline void print_summary(const MetricReport& r, bool legacy, std::ostream& out) {
    out << (legacy ? "positional (legacy) evaluation\n" : "aligned evaluation\n");
    out << "sentences      " << r.n_sentences << "\n";
    out << "hallucinated   " << r.n_hallucinated << "\n";
    out << "               precision  recall     F1         F0.5\n";
    out << "detection      " << detail::fmt(r.detection.precision) << "     " << detail::fmt(r.detection.recall)
        << "     " << detail::fmt(r.detection.f1) << "     " << detail::fmt(r.detection.f0_5) << "\n";
    out << "correction     " << detail::fmt(r.correction.precision) << "     " << detail::fmt(r.correction.recall)
        << "     " << detail::fmt(r.correction.f1) << "     " << detail::fmt(r.correction.f0_5) << "\n";
    const auto& c = r.counts;
    out << "counts         det tp=" << c.det_tp << " fp=" << c.det_fp << " fn=" << c.det_fn << " tn=" << c.det_tn
        << " | cor tp=" << c.cor_tp << " fp=" << c.cor_fp << " fn=" << c.cor_fn << "\n";
    if (!r.errors.empty()) out << "errors         " << r.errors.size() << " malformed line(s)\n";
}

inline int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
    const bool parallel_mode = !opt.parallel.empty();
    if (parallel_mode == !opt.jsonl.empty()) {
        err << "error: give either a JSONL file or three parallel files\n";
        return kExitFatal;
    }
    if (parallel_mode && opt.parallel.size() != 3) {
        err << "error: parallel mode needs original, predicted and expected files\n";
        return kExitFatal;
    }
    const std::vector<std::string> paths = parallel_mode ? opt.parallel : std::vector<std::string>{opt.jsonl};
    for (const auto& p : paths)
        if (!detail::readable(p, err)) return kExitFatal;

    std::size_t total_lines = count_lines(paths[0]);
    if (parallel_mode) {
        for (std::size_t k = 1; k < 3; ++k) {
            const std::size_t n = count_lines(paths[k]);
            if (n != total_lines) {
                err << "error: line count mismatch: " << paths[0] << " has " << total_lines << ", " << paths[k]
                    << " has " << n << "\n";
                return kExitFatal;
            }
        }
    }
    if (total_lines == 0) {
        err << "error: no triples in input\n";
        return kExitFatal;
    }

    const EvalMode mode = opt.legacy ? EvalMode::legacy : EvalMode::aligned;
    std::vector<std::ifstream> streams;
    for (const auto& p : paths) streams.emplace_back(p, std::ios::binary);

    CorpusAccumulator acc;
    std::vector<LineError> errors;
    std::vector<detail::PendingLine> chunk;
    chunk.reserve(kChunkLines);
    std::size_t line_no = 0;
    std::string lines[3];
    while (std::getline(streams[0], lines[0])) {
        ++line_no;
        detail::PendingLine p{line_no, std::nullopt, {}};
        if (parallel_mode) {
            std::getline(streams[1], lines[1]);
            std::getline(streams[2], lines[2]);
            p.triple = EvalTriple{lines[0], lines[1], lines[2]};
        } else {
            try {
                p.triple = triple_from_json_line(lines[0]);
            } catch (const std::exception& ex) {
                p.error = ex.what();
            }
        }
        chunk.push_back(std::move(p));
        if (chunk.size() == kChunkLines) detail::evaluate_chunk(chunk, opt.norm, mode, acc, errors);
    }
    detail::evaluate_chunk(chunk, opt.norm, mode, acc, errors);

    MetricReport report = acc.report();
    report.errors = std::move(errors);

    if (!opt.report_path.empty()) {
        std::ofstream rep(opt.report_path, std::ios::binary);
        if (!rep) {
            err << "error: cannot write " << opt.report_path << "\n";
            return kExitFatal;
        }
        rep << report_to_json(report).dump(2) << "\n";
    }
    print_summary(report, opt.legacy, out);
    for (const auto& e : report.errors) err << "line " << e.line << ": " << e.message << "\n";
    return report.errors.empty() ? kExitOk : kExitPartial;
}

inline int cmd_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& err) {
    if (!detail::readable(opt.noisy, err) || !detail::readable(opt.clean, err)) return kExitFatal;
    const std::size_t n = count_lines(opt.noisy);
    const std::size_t m = count_lines(opt.clean);
    if (n != m) {
        err << "error: line count mismatch: " << opt.noisy << " has " << n << ", " << opt.clean << " has " << m
            << "\n";
        return kExitFatal;
    }
    if (n == 0) {
        err << "error: empty corpus\n";
        return kExitFatal;
    }

    std::ifstream noisy(opt.noisy, std::ios::binary), clean(opt.clean, std::ios::binary);
    ErrorModelEstimator total(opt.norm);
    std::vector<std::pair<std::string, std::string>> chunk;
    std::size_t line_no = 0;
    auto flush = [&] {
        const std::size_t workers = std::max<std::size_t>(1, std::min(thread_count(), chunk.size()));
        std::vector<ErrorModelEstimator> parts(workers, ErrorModelEstimator(opt.norm));
        const std::size_t block = (chunk.size() + workers - 1) / workers;
        parallel_for(workers, [&](std::size_t w) {
            const std::size_t end = std::min(chunk.size(), (w + 1) * block);
            for (std::size_t i = w * block; i < end; ++i) {
                try {
                    parts[w].add(chunk[i].first, chunk[i].second);
                } catch (const DecodeError& ex) {
                    throw FormatError("line " + std::to_string(line_no - chunk.size() + i + 1) + ": " + ex.what());
                }
            }
        });
        for (const auto& p : parts) total.merge(p);
        chunk.clear();
    };
    try {
        std::string a, b;
        while (std::getline(noisy, a) && std::getline(clean, b)) {
            ++line_no;
            chunk.emplace_back(std::move(a), std::move(b));
            if (chunk.size() == kChunkLines) flush();
        }
        flush();
        const ErrorModel model = total.model();
        const std::string text = model_to_json(model).dump(2);
        if (opt.out.empty()) {
            out << text << "\n";
        } else {
            std::ofstream f(opt.out, std::ios::binary);
            if (!f) {
                err << "error: cannot write " << opt.out << "\n";
                return kExitFatal;
            }
            f << text << "\n";
            out << "wrote error model from " << total.pairs() << " sentence pairs to " << opt.out << "\n";
        }
        out << "proportions    ";
        for (auto t : kErrorTypes) out << to_string(t) << "=" << detail::fmt(model.proportion(t)) << " ";
        out << "\n";
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitFatal;
    }
    return kExitOk;
}

inline int cmd_inject(const InjectOptions& opt, std::ostream& out, std::ostream& err) {
    if (!detail::readable(opt.input, err) || !detail::readable(opt.model, err)) return kExitFatal;
    try {
        ErrorModel model;
        {
            std::ifstream mf(opt.model, std::ios::binary);
            json j;
            try {
                j = json::parse(mf);
            } catch (const json::parse_error& ex) {
                throw ModelError(opt.model + ": " + ex.what());
            }
            model = model_from_json(j);
        }
        InjectionConfig cfg;
        cfg.pass_through_rate = opt.pass_through.value_or(model.pass_through_default);
        cfg.seed = opt.seed;
        cfg.max_edits_per_word = opt.max_edits;
        cfg.validate();

        std::ifstream in(opt.input, std::ios::binary);
        std::ofstream dst(opt.out, std::ios::binary);
        if (!dst) {
            err << "error: cannot write " << opt.out << "\n";
            return kExitFatal;
        }

        ErrorPercentageMeter meter(opt.norm);
        std::vector<std::string> chunk;
        std::vector<bool> terminated;
        std::uint64_t first = 0;
        auto flush = [&] {
            std::vector<std::string> noisy;
            try {
                noisy = inject_errors(chunk, model, cfg, opt.norm, first);
            } catch (const DecodeError& ex) {
                throw FormatError("input line in block starting at " + std::to_string(first + 1) + ": " + ex.what());
            }
            for (std::size_t i = 0; i < chunk.size(); ++i) {
                dst << noisy[i];
                if (terminated[i]) dst << '\n';
                meter.add(noisy[i], chunk[i]);
            }
            first += chunk.size();
            chunk.clear();
            terminated.clear();
        };
        std::string line;
        bool term = false;
        while (read_line(in, line, term)) {
            chunk.push_back(line);
            terminated.push_back(term);
            if (chunk.size() == kChunkLines) flush();
        }
        flush();
        if (!dst.flush()) {
            err << "error: failed writing " << opt.out << "\n";
            return kExitFatal;
        }
        out << "sentences      " << first << "\n";
        out << "error percentage " << std::setprecision(6) << std::fixed << meter.value() << "\n";
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitFatal;
    }
    return kExitOk;
}

inline int cmd_measure(const MeasureOptions& opt, std::ostream& out, std::ostream& err) {
    if (!detail::readable(opt.noisy, err) || !detail::readable(opt.clean, err)) return kExitFatal;
    const std::size_t n = count_lines(opt.noisy);
    const std::size_t m = count_lines(opt.clean);
    if (n != m) {
        err << "error: line count mismatch: " << opt.noisy << " has " << n << ", " << opt.clean << " has " << m
            << "\n";
        return kExitFatal;
    }
    std::ifstream noisy(opt.noisy, std::ios::binary), clean(opt.clean, std::ios::binary);
    ErrorPercentageMeter meter(opt.norm);
    std::size_t line_no = 0;
    std::string a, b;
    try {
        while (std::getline(noisy, a) && std::getline(clean, b)) {
            ++line_no;
            meter.add(a, b);
        }
    } catch (const std::exception& ex) {
        err << "error: line " << line_no << ": " << ex.what() << "\n";
        return kExitFatal;
    }
    out << std::setprecision(6) << std::fixed << meter.value() << "\n";
    return kExitOk;
}

}  // namespace spellbench::cli
