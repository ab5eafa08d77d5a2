#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "spellbench/io.hpp"
#include "spellbench/metrics.hpp"

using namespace spellbench;

namespace {

const EvalTriple kFigureOne{"I am going to the librari to studdy", "I am going to the public library to study",
                            "I am going to the library to study"};

TripleRecord rec(std::optional<std::string> o, std::optional<std::string> p, std::optional<std::string> e) {
    TripleRecord r;
    r.original_token = std::move(o);
    r.predicted_token = std::move(p);
    r.expected_token = std::move(e);
    r.hallucinated = r.predicted_token && !r.original_token && !r.expected_token;
    return r;
}

// Test-side restatement of the truth table, written out case by case.
CountTable reference_counts(const std::vector<TripleRecord>& records) {
    CountTable c;
    for (const auto& r : records) {
        if (r.hallucinated) {
            ++c.det_fp;
            ++c.cor_fp;
            continue;
        }
        const std::string o = r.original_token.value_or("\x01"), p = r.predicted_token.value_or("\x01"),
                          e = r.expected_token.value_or("\x01");
        if (o == e && p == o) ++c.det_tn;
        if (o == e && p != o) {
            ++c.det_fp;
            ++c.cor_fp;
        }
        if (o != e && p == o) {
            ++c.det_fn;
            ++c.cor_fn;
        }
        if (o != e && p != o && p == e) {
            ++c.det_tp;
            ++c.cor_tp;
        }
        if (o != e && p != o && p != e) {
            ++c.det_tp;
            ++c.cor_fp;
            ++c.cor_fn;
        }
    }
    return c;
}

std::vector<EvalTriple> one(const EvalTriple& t) { return {t}; }

}  // namespace

TEST(Classify, TableExamples) {
    const auto fixed = classify(rec("librari", "library", "library"));
    EXPECT_EQ(fixed.det_tp, 1u);
    EXPECT_EQ(fixed.cor_tp, 1u);
    EXPECT_EQ(fixed.det_fp + fixed.det_fn + fixed.det_tn + fixed.cor_fp + fixed.cor_fn, 0u);

    const auto halluc = classify(rec(std::nullopt, "public", std::nullopt));
    EXPECT_EQ(halluc, (CountTable{0, 1, 0, 0, 0, 1, 0}));

    const auto untouched = classify(rec("to", "to", "to"));
    EXPECT_EQ(untouched, (CountTable{0, 0, 0, 1, 0, 0, 0}));

    // wrong correction of a real error: detected, but a correction FP and FN
    EXPECT_EQ(classify(rec("librari", "librory", "library")), (CountTable{1, 0, 0, 0, 0, 1, 1}));
    // missed error
    EXPECT_EQ(classify(rec("librari", "librari", "library")), (CountTable{0, 0, 1, 0, 0, 0, 1}));
    // correct word changed
    EXPECT_EQ(classify(rec("study", "studied", "study")), (CountTable{0, 1, 0, 0, 0, 1, 0}));
    // system deleted an expected word
    EXPECT_EQ(classify(rec("to", std::nullopt, "to")), (CountTable{0, 1, 0, 0, 0, 1, 0}));
    // system kept a word the gold removes
    EXPECT_EQ(classify(rec("very", "very", std::nullopt)), (CountTable{0, 0, 1, 0, 0, 0, 1}));
}

TEST(Classify, RejectsInconsistentRecords) {
    EXPECT_THROW(classify(TripleRecord{}), ConsistencyError);
    auto r = rec("a", "b", "a");
    r.hallucinated = true;
    EXPECT_THROW(classify(r), ConsistencyError);
    TripleRecord lone;
    lone.predicted_token = "x";
    EXPECT_THROW(classify(lone), ConsistencyError);
}

TEST(FBeta, Examples) {
    EXPECT_DOUBLE_EQ(f_beta(1.0, 1.0, 0.5), 1.0);
    EXPECT_NEAR(f_beta(2.0 / 3.0, 1.0, 0.5), 1.25 * (2.0 / 3.0) / (0.25 * (2.0 / 3.0) + 1.0), 1e-15);
    EXPECT_NEAR(f_beta(2.0 / 3.0, 1.0, 0.5), 0.7142857142857143, 1e-12);
    EXPECT_EQ(f_beta(0.0, 0.0, 1.0), 0.0);
    for (double p : {0.1, 0.37, 0.5, 0.99})
        for (double b : {0.25, 0.5, 1.0, 2.0}) EXPECT_NEAR(f_beta(p, p, b), p, 1e-15);
    EXPECT_THROW(f_beta(0.5, 0.5, 0.0), std::invalid_argument);
    EXPECT_THROW(f_beta(0.5, 0.5, -1.0), std::invalid_argument);
}

TEST(Score, ZeroDenominatorConvention) {
    const auto empty = score(0, 0, 0);
    EXPECT_EQ(empty, (Scores{1.0, 1.0, 1.0, 1.0}));
    const auto no_predictions = score(0, 0, 3);
    EXPECT_EQ(no_predictions.precision, 0.0);
    EXPECT_EQ(no_predictions.recall, 0.0);
    EXPECT_EQ(no_predictions.f1, 0.0);
    const auto no_errors = score(0, 2, 0);
    EXPECT_EQ(no_errors.precision, 0.0);
    EXPECT_EQ(no_errors.recall, 0.0);
}

TEST(EvaluateCorpus, FigureOne) {
    // Hand-enumerated records for the example
    const std::vector<TripleRecord> by_hand{
        rec("I", "I", "I"),       rec("am", "am", "am"),
        rec("going", "going", "going"), rec("to", "to", "to"),
        rec("the", "the", "the"), rec(std::nullopt, "public", std::nullopt),
        rec("librari", "library", "library"), rec("to", "to", "to"),
        rec("studdy", "study", "study")};
    const CountTable want = reference_counts(by_hand);
    EXPECT_EQ(want, (CountTable{2, 1, 0, 6, 2, 1, 0}));

    const auto r = evaluate_corpus(one(kFigureOne));
    EXPECT_EQ(r.counts, want);
    EXPECT_EQ(r.n_sentences, 1u);
    EXPECT_EQ(r.n_hallucinated, 1u);
    EXPECT_NEAR(r.detection.precision, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.detection.recall, 1.0, 1e-12);
    EXPECT_NEAR(r.detection.f1, 0.8, 1e-9);
    EXPECT_NEAR(r.correction.precision, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.correction.recall, 1.0, 1e-12);
    EXPECT_NEAR(r.correction.f0_5, 0.7142857142857143, 1e-9);
}

TEST(EvaluateCorpus, UntouchedCorpusScoresOne) {
    const std::vector<EvalTriple> corpus{{"a b c", "a b c", "a b c"}, {"the library", "the library", "the library"}};
    const auto r = evaluate_corpus(corpus);
    EXPECT_EQ(r.counts, (CountTable{0, 0, 0, 5, 0, 0, 0}));
    EXPECT_EQ(r.detection, (Scores{1.0, 1.0, 1.0, 1.0}));
    EXPECT_EQ(r.correction, (Scores{1.0, 1.0, 1.0, 1.0}));
}

TEST(EvaluateCorpus, PerfectCorrector) {
    std::mt19937 rng(41);
    std::vector<EvalTriple> corpus;
    std::uint64_t errors = 0;
    for (int i = 0; i < 50; ++i) {
        auto t = gen::random_triple(rng);
        t.predicted = t.expected;
        for (std::size_t k = 0; k < t.expected.size(); ++k) errors += t.original[k] != t.expected[k];
        corpus.push_back(t.triple());
    }
    const auto r = evaluate_corpus(corpus);
    EXPECT_EQ(r.counts.det_tp, errors);
    EXPECT_EQ(r.counts.cor_tp, errors);
    EXPECT_EQ(r.counts.det_fp + r.counts.det_fn + r.counts.cor_fp + r.counts.cor_fn, 0u);
    EXPECT_EQ(r.detection.f1, 1.0);
    EXPECT_EQ(r.correction.f0_5, 1.0);
}

TEST(EvaluateCorpus, BadTriplesAreReportedAndSkipped) {
    const std::vector<EvalTriple> corpus{kFigureOne, {"a", "a", ""}, {"a\xFF", "a", "a"}, kFigureOne};
    const auto r = evaluate_corpus(corpus);
    ASSERT_EQ(r.errors.size(), 2u);
    EXPECT_EQ(r.errors[0].line, 2u);
    EXPECT_EQ(r.errors[1].line, 3u);
    EXPECT_EQ(r.n_sentences, 2u);
    EXPECT_EQ(r.counts.det_tp, 4u);
}

TEST(LegacyEvaluate, CascadesAfterInsertion) {
    const auto aligned = evaluate_corpus(one(kFigureOne));
    const auto legacy = legacy_evaluate(one(kFigureOne));
    // the shift still flags both misspelled positions, but no correction
    // lines up with its gold word any more
    EXPECT_EQ(legacy.counts.det_tp, 2u);
    EXPECT_GT(legacy.counts.det_fp, aligned.counts.det_fp);
    EXPECT_EQ(legacy.counts.cor_tp, 0u);
    EXPECT_LT(legacy.correction.f0_5, aligned.correction.f0_5);
}

TEST(LegacyEvaluate, LeadingInsertionExample) {
    const auto t = one({"a b c", "x a b c", "a b c"});
    const auto legacy = legacy_evaluate(t);
    EXPECT_EQ(legacy.counts.det_tp, 0u);
    EXPECT_GE(legacy.counts.det_fp, 3u);
    EXPECT_EQ(legacy.counts.det_fp, 4u);

    const auto aligned = evaluate_corpus(t);
    EXPECT_EQ(aligned.counts.det_tp, 0u);
    EXPECT_EQ(aligned.counts.det_fp, 1u);
    EXPECT_EQ(aligned.counts.det_tn, 3u);
    EXPECT_EQ(aligned.n_hallucinated, 1u);
}

TEST(LegacyEvaluate, AgreesWithoutInsertionsOrDeletions) {
    std::mt19937 rng(43);
    std::vector<EvalTriple> corpus;
    for (int i = 0; i < 200; ++i) corpus.push_back(gen::random_triple(rng).triple());
    const auto a = evaluate_corpus(corpus);
    const auto l = legacy_evaluate(corpus);
    EXPECT_EQ(a, l);
}

TEST(MetricProperties, RandomTriples) {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto t = gen::random_triple(rng);
        const auto base = evaluate_corpus(one(t.triple()));
        const auto& c = base.counts;
        ASSERT_LE(c.cor_tp, c.det_tp);
        ASSERT_EQ(c.det_tp + c.det_fp + c.det_fn + c.det_tn, t.expected.size());
        ASSERT_EQ(c, reference_counts(triple_align(t.triple()).records));

        for (const auto* s : {&base.detection, &base.correction}) {
            for (double f : {s->f1, s->f0_5}) {
                ASSERT_GE(f, std::min(s->precision, s->recall) - 1e-12);
                ASSERT_LE(f, std::max(s->precision, s->recall) + 1e-12);
            }
        }

        // appending an untouched correct word only adds a true negative
        auto appended = t;
        appended.original.push_back("garden");
        appended.predicted.push_back("garden");
        appended.expected.push_back("garden");
        auto want = c;
        ++want.det_tn;
        ASSERT_EQ(evaluate_corpus(one(appended.triple())).counts, want) << "trial " << trial;

        // a novel word inserted into the prediction is one FP each, nothing else
        auto inserted = t;
        const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, t.predicted.size())(rng);
        inserted.predicted.insert(inserted.predicted.begin() + static_cast<std::ptrdiff_t>(pos), gen::novel(rng));
        want = c;
        ++want.det_fp;
        ++want.cor_fp;
        const auto after = evaluate_corpus(one(inserted.triple()));
        ASSERT_EQ(after.counts, want) << "trial " << trial;
        ASSERT_EQ(after.n_hallucinated, base.n_hallucinated + 1);
    }
}

TEST(MetricProperties, MicroAggregationIsAssociative) {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<EvalTriple> left, right, all;
        const int n = std::uniform_int_distribution<int>(0, 40)(rng);
        const int split = std::uniform_int_distribution<int>(0, n)(rng);
        for (int i = 0; i < n; ++i) {
            const auto t = gen::random_triple(rng).triple();
            (i < split ? left : right).push_back(t);
            all.push_back(t);
        }
        const auto l = evaluate_corpus(left), r = evaluate_corpus(right), whole = evaluate_corpus(all);
        const auto merged = make_report(l.counts + r.counts, l.n_sentences + r.n_sentences,
                                        l.n_hallucinated + r.n_hallucinated);
        ASSERT_EQ(merged, whole);
    }
}

TEST(ReportJson, RoundTrip) {
    std::mt19937 rng(59);
    std::vector<EvalTriple> corpus{kFigureOne, {"a", "b", ""}};
    for (int i = 0; i < 30; ++i) corpus.push_back(gen::random_triple(rng).triple());
    const auto r = evaluate_corpus(corpus);
    const auto text = report_to_json(r).dump();
    EXPECT_EQ(report_from_json(json::parse(text)), r);

    const auto j = json::parse(report_to_json(evaluate_corpus(one(kFigureOne))).dump());
    EXPECT_DOUBLE_EQ(j["detection"]["f1"].get<double>(), 0.8);
    EXPECT_TRUE(j["correction"].contains("f0.5"));
    EXPECT_EQ(j["counts"]["det_tp"].get<int>(), 2);
    EXPECT_EQ(j["n_hallucinated"].get<int>(), 1);
}
