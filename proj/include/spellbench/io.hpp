#pragma once

// JSON encodings for reports, error models and triple lines, plus small
// line-oriented file helpers.

#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spellbench/inject.hpp"
#include "spellbench/metrics.hpp"
#include "spellbench/triple.hpp"

namespace spellbench {

using json = nlohmann::json;

inline json scores_to_json(const Scores& s) {
    return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"f0.5", s.f0_5}};
}

inline Scores scores_from_json(const json& j) {
    Scores s;
    s.precision = j.at("precision").get<double>();
    s.recall = j.at("recall").get<double>();
    s.f1 = j.at("f1").get<double>();
    s.f0_5 = j.at("f0.5").get<double>();
    return s;
}

inline json counts_to_json(const CountTable& c) {
    return json{{"det_tp", c.det_tp}, {"det_fp", c.det_fp}, {"det_fn", c.det_fn}, {"det_tn", c.det_tn},
                {"cor_tp", c.cor_tp}, {"cor_fp", c.cor_fp}, {"cor_fn", c.cor_fn}};
}

inline CountTable counts_from_json(const json& j) {
    CountTable c;
    c.det_tp = j.at("det_tp").get<std::uint64_t>();
    c.det_fp = j.at("det_fp").get<std::uint64_t>();
    c.det_fn = j.at("det_fn").get<std::uint64_t>();
    c.det_tn = j.at("det_tn").get<std::uint64_t>();
    c.cor_tp = j.at("cor_tp").get<std::uint64_t>();
    c.cor_fp = j.at("cor_fp").get<std::uint64_t>();
    c.cor_fn = j.at("cor_fn").get<std::uint64_t>();
    return c;
}

inline json report_to_json(const MetricReport& r) {
    json errors = json::array();
    for (const auto& e : r.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
    return json{{"detection", scores_to_json(r.detection)},
                {"correction", scores_to_json(r.correction)},
                {"counts", counts_to_json(r.counts)},
                {"n_sentences", r.n_sentences},
                {"n_hallucinated", r.n_hallucinated},
                {"errors", std::move(errors)}};
}

inline MetricReport report_from_json(const json& j) {
    MetricReport r;
    r.detection = scores_from_json(j.at("detection"));
    r.correction = scores_from_json(j.at("correction"));
    r.counts = counts_from_json(j.at("counts"));
    r.n_sentences = j.at("n_sentences").get<std::size_t>();
    r.n_hallucinated = j.at("n_hallucinated").get<std::size_t>();
    if (auto it = j.find("errors"); it != j.end())
        for (const auto& e : *it) r.errors.push_back({e.at("line").get<std::size_t>(), e.at("message").get<std::string>()});
    return r;
}

inline json model_to_json(const ErrorModel& m) {
    json props = json::object();
    for (auto t : kErrorTypes) props[std::string(to_string(t))] = m.proportion(t);
    json confusion = json::object();
    for (const auto& [g, row] : m.confusion) confusion[g] = row;
    return json{{"proportions", std::move(props)},
                {"confusion", std::move(confusion)},
                {"insert_pool", m.insert_pool},
                {"pass_through_default", m.pass_through_default}};
}

/// Parses and validates an error model. Missing confusion/insert_pool are
/// treated as empty.
inline ErrorModel model_from_json(const json& j) {
    ErrorModel m;
    try {
        const auto& props = j.at("proportions");
        for (auto t : kErrorTypes) m.proportion(t) = props.at(std::string(to_string(t))).get<double>();
        if (auto it = j.find("confusion"); it != j.end())
            m.confusion = it->get<std::map<std::string, GraphemeCounts>>();
        if (auto it = j.find("insert_pool"); it != j.end()) m.insert_pool = it->get<GraphemeCounts>();
        if (auto it = j.find("pass_through_default"); it != j.end()) m.pass_through_default = it->get<double>();
    } catch (const json::exception& ex) {
        throw ModelError(std::string("malformed error model: ") + ex.what());
    }
    m.validate();
    return m;
}

/// Parses one JSONL triple record {"original", "predicted", "expected"}.
inline EvalTriple triple_from_json_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& ex) {
        throw FormatError(std::string("invalid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw FormatError("triple line is not a JSON object");
    EvalTriple t;
    auto field = [&](const char* key, std::string& dst) {
        auto it = j.find(key);
        if (it == j.end()) throw FormatError(std::string("missing key '") + key + "'");
        if (!it->is_string()) throw FormatError(std::string("key '") + key + "' is not a string");
        dst = it->get<std::string>();
    };
    field("original", t.original);
    field("predicted", t.predicted);
    field("expected", t.expected);
    return t;
}

inline std::string triple_to_json_line(const EvalTriple& t) {
    return json{{"original", t.original}, {"predicted", t.predicted}, {"expected", t.expected}}.dump();
}

/// Reads one line; `terminated` reports whether it ended with '\n'.
inline bool read_line(std::istream& in, std::string& line, bool& terminated) {
    if (!std::getline(in, line)) return false;
    terminated = !in.eof();
    return true;
}

inline std::size_t count_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace spellbench
