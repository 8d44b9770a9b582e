#include "msgw/errors.hpp"
#include "msgw/evaluation.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace msgw;
using testsupport::fixtures_dir;
using testsupport::read_file;

namespace {

// Replies with a fixed text chosen by the dataset's location.
class LookupBackend : public GeneratorBackend {
public:
    LookupBackend(std::initializer_list<std::pair<const std::string, std::string>> replies) : replies_(replies) {}
    std::string backend_id() const override { return "lookup"; }
    Bulletin generate(const GenerationRequest& req) const override {
        auto d = deserialize_dataset(*req.dataset());
        auto it = replies_.find(d.location_name());
        if (it == replies_.end())
            throw BackendError(BackendErrorKind::BadResponse, "no reply");
        return Bulletin(it->second, backend_id(), d.location_name());
    }

private:
    std::map<std::string, std::string> replies_;
};

std::string dataset_named(const std::string& name) {
    auto d = parse_page(read_file(fixtures_dir() / "pages/fixture_paris.html")).dataset;
    return serialize_dataset(ForecastDataset(name, d.coordinate(), d.date(), d.slots()));
}

std::string corpus_line(const std::string& location, const std::string& reference) {
    return nlohmann::json{{"input", nlohmann::json::parse(dataset_named(location))}, {"reference", reference}}.dump() +
           "\n";
}

std::vector<std::string> toks(const std::string& s) { return eval_tokenize(s).tokens(); }

} // namespace

TEST(Tokenize, Examples) {
    EXPECT_EQ(toks("7°C to 14 km/h"), (std::vector<std::string>{"7", "c", "to", "14", "km", "h"}));
    EXPECT_TRUE(eval_tokenize("").empty());
    EXPECT_EQ(toks("Rain, RAIN; rain!"), (std::vector<std::string>{"rain", "rain", "rain"}));
    EXPECT_EQ(toks("Zürich-Nord"), (std::vector<std::string>{"zürich", "nord"}));
}

TEST(RougeN, HandComputed) {
    auto s = rouge_n(eval_tokenize("the cat sat"), eval_tokenize("the cat ran"), 2);
    EXPECT_DOUBLE_EQ(s.precision, 0.5);
    EXPECT_DOUBLE_EQ(s.recall, 0.5);
    EXPECT_DOUBLE_EQ(s.f1, 0.5);
    auto u = rouge_n(eval_tokenize("the sky is clear"), eval_tokenize("the sky is mostly clear"), 1);
    EXPECT_DOUBLE_EQ(u.precision, 1.0);
    EXPECT_DOUBLE_EQ(u.recall, 0.8);
    EXPECT_NEAR(u.f1, 8.0 / 9.0, 1e-12);
}

TEST(RougeN, ClippedCounts) {
    // "the" appears 3 times in the candidate but once in the reference.
    auto s = rouge_n(eval_tokenize("the the the"), eval_tokenize("the cat"), 1);
    EXPECT_DOUBLE_EQ(s.precision, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.recall, 0.5);
}

TEST(RougeN, DegenerateInputs) {
    auto a = eval_tokenize("rain today");
    auto one = eval_tokenize("rain");
    auto empty = eval_tokenize("");
    auto same = rouge_n(a, a, 2);
    EXPECT_EQ(same.f1, 1.0);
    auto short_side = rouge_n(one, a, 2);
    EXPECT_EQ(short_side.precision, 0.0);
    EXPECT_EQ(short_side.f1, 0.0);
    EXPECT_EQ(rouge_n(empty, empty, 1).f1, 0.0);
    EXPECT_THROW(rouge_n(a, a, 0), ValueError);
}

TEST(RougeL, HandComputed) {
    auto s = rouge_l(eval_tokenize("rain later today"), eval_tokenize("rain expected later today"));
    EXPECT_DOUBLE_EQ(s.precision, 1.0);
    EXPECT_DOUBLE_EQ(s.recall, 0.75);
    EXPECT_NEAR(s.f1, 6.0 / 7.0, 1e-12);
    auto d = rouge_l(eval_tokenize("a b"), eval_tokenize("c d"));
    EXPECT_EQ(d.precision, 0.0);
    EXPECT_EQ(d.recall, 0.0);
    EXPECT_EQ(d.f1, 0.0);
    EXPECT_EQ(rouge_l(eval_tokenize(""), eval_tokenize("x")).f1, 0.0);
}

TEST(Rouge, MatchesOracle) {
    std::mt19937_64 rng(123);
    for (int i = 0; i < 500; ++i) {
        auto c = testsupport::random_tokens(rng, 1, 30, 10);
        auto r = testsupport::random_tokens(rng, 1, 30, 10);
        auto cs = eval_tokenize(testsupport::join_tokens(c));
        auto rs = eval_tokenize(testsupport::join_tokens(r));
        for (int n : {1, 2, 3}) {
            auto got = rouge_n(cs, rs, n);
            auto want = testsupport::oracle_rouge_n(c, r, n);
            EXPECT_NEAR(got.precision, want.p, 1e-12);
            EXPECT_NEAR(got.recall, want.r, 1e-12);
            EXPECT_NEAR(got.f1, want.f, 1e-12);
        }
        auto got = rouge_l(cs, rs);
        auto want = testsupport::oracle_rouge_l(c, r);
        EXPECT_NEAR(got.precision, want.p, 1e-12);
        EXPECT_NEAR(got.recall, want.r, 1e-12);
        EXPECT_NEAR(got.f1, want.f, 1e-12);
    }
}

TEST(Rouge, SwapAndRangeProperties) {
    std::mt19937_64 rng(321);
    for (int i = 0; i < 500; ++i) {
        auto c = eval_tokenize(testsupport::join_tokens(testsupport::random_tokens(rng, 0, 25, 6)));
        auto r = eval_tokenize(testsupport::join_tokens(testsupport::random_tokens(rng, 0, 25, 6)));
        for (int n : {1, 2}) {
            auto ab = rouge_n(c, r, n), ba = rouge_n(r, c, n);
            EXPECT_EQ(ab.precision, ba.recall);
            EXPECT_EQ(ab.recall, ba.precision);
            EXPECT_NEAR(ab.f1, ba.f1, 1e-15);
        }
        auto ab = rouge_l(c, r), ba = rouge_l(r, c);
        EXPECT_EQ(ab.precision, ba.recall);
        EXPECT_NEAR(ab.f1, ba.f1, 1e-15);
        for (const auto& t : {rouge_n(c, r, 1), rouge_n(c, r, 2), ab}) {
            for (double v : {t.precision, t.recall, t.f1}) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
    }
}

TEST(Rouge, SubstringRelation) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) {
        auto ref = testsupport::random_tokens(rng, 1, 30, 8);
        std::uniform_int_distribution<std::size_t> start(0, ref.size() - 1);
        auto s = start(rng);
        std::uniform_int_distribution<std::size_t> len(1, ref.size() - s);
        std::vector<std::string> cand(ref.begin() + static_cast<long>(s),
                                      ref.begin() + static_cast<long>(s + len(rng)));
        auto c = eval_tokenize(testsupport::join_tokens(cand));
        auto r = eval_tokenize(testsupport::join_tokens(ref));
        EXPECT_GE(rouge_l(c, r).f1 + 1e-12, rouge_n(c, r, static_cast<int>(cand.size())).f1);
    }
}

TEST(JudgePrompt, Verbatim) {
    const std::string instruction =
        "For the following AI-generated weather bulletin, provide a ranking of how plausible it is given the weather "
        "data in the provided weather API JSON. A rank of 0 means completely not plausible, 1/2 means it is ok but "
        "has some mistakes, 1 means perfectly plausible. Your answer should be a single number.";
    EXPECT_EQ(kJudgeInstruction, instruction);
    auto prompt = build_judge_prompt("{\"a\":1}", "Sunny.");
    EXPECT_EQ(prompt, instruction + "\n{\"a\":1}\nSunny.");
    EXPECT_EQ(prompt.find("<INPUT_JSON>"), std::string::npos);
    EXPECT_EQ(prompt.find("<METEO_BULLETIN_TEXT>"), std::string::npos);
    EXPECT_THROW(build_judge_prompt("doc", ""), ValueError);
    EXPECT_THROW(build_judge_prompt("", "text"), ValueError);
}

TEST(JudgeReply, Parse) {
    EXPECT_EQ(parse_judge_reply("1"), 1.0);
    EXPECT_EQ(parse_judge_reply(" 1/2\n"), 0.5);
    EXPECT_EQ(parse_judge_reply("0.5."), 0.5);
    EXPECT_EQ(parse_judge_reply("0"), 0.0);
    EXPECT_EQ(parse_judge_reply("1."), 1.0);
    for (const char* bad : {"plausible", "", "2", "0.75", "1..", "1 /2", "½", "one"}) {
        try {
            parse_judge_reply(bad);
            ADD_FAILURE() << bad;
        } catch (const JudgeParseError& e) {
            EXPECT_EQ(e.raw_reply(), bad);
        }
    }
}

TEST(JudgeScore, StubServer) {
    std::vector<std::string> replies = {"1", "1/2", "garbage"};
    testsupport::StubMessageServer judge("/judge", [&](const std::string& prompt, int i) {
        EXPECT_EQ(prompt.rfind(std::string(kJudgeInstruction), 0), 0u);
        return replies[static_cast<std::size_t>(i) % replies.size()];
    });
    NetworkHttpClient client;
    EvalRecord record{"{\"doc\":1}", "ref", "cand", {}};
    EXPECT_EQ(judge_score(record, judge.url(), client), 1.0);
    EXPECT_EQ(std::get<double>(record.scores.at("judge")), 1.0);
    EXPECT_EQ(judge_score(record, judge.url(), client), 0.5);
    EXPECT_THROW(judge_score(record, judge.url(), client), JudgeError);
    EXPECT_THROW(judge_score(record, judge.url("/missing"), client), JudgeError);
    EXPECT_THROW(judge_score(record, "http://127.0.0.1:1/judge", client), JudgeError);
}

TEST(RunEval, IdentityCorpus) {
    std::string corpus;
    auto backend = make_template_service_backend();
    for (const auto* name : {"paris", "berlin", "oslo"}) {
        auto d = parse_page(read_file(fixtures_dir() / (std::string("pages/fixture_") + name + ".html"))).dataset;
        corpus += nlohmann::json{{"input", nlohmann::json::parse(serialize_dataset(d))},
                                 {"reference", render_template_bulletin(d)}}
                      .dump() +
                  "\n";
    }
    std::istringstream in(corpus);
    auto report = run_eval(in, *backend, MetricSelection{});
    EXPECT_EQ(report.record_count, 3u);
    EXPECT_EQ(report.rouge1->f1, 1.0);
    EXPECT_EQ(report.rouge2->f1, 1.0);
    EXPECT_EQ(report.rougeL->f1, 1.0);
}

TEST(RunEval, MeanOfPerRecordScores) {
    LookupBackend backend({{"A", "the cat sat"}, {"B", "rain later today"}});
    std::istringstream in(corpus_line("A", "the cat ran") + corpus_line("B", "rain later today"));
    auto report = run_eval(in, backend, MetricSelection{});
    EXPECT_NEAR(report.rouge2->f1, 0.75, 1e-12);
    EXPECT_NEAR(report.rouge1->f1, (2.0 / 3.0 + 1.0) / 2.0, 1e-12);
    ASSERT_EQ(report.records.size(), 2u);
    EXPECT_EQ(report.records[0].line, 1u);
    EXPECT_EQ(report.records[0].record.candidate_text, "the cat sat");
}

TEST(RunEval, SkipsMalformedLinesAndCountsFailures) {
    LookupBackend backend({{"A", "x y"}});
    std::string corpus = "not json\n\n" + corpus_line("A", "x y") + R"({"input": {}, "reference": "r"})" + "\n" +
                         R"({"input": "<html></html>", "reference": "r"})" + "\n" + R"({"reference": "r"})" + "\n" +
                         corpus_line("A", "") + corpus_line("Z", "unknown to the backend");
    std::istringstream in(corpus);
    auto report = run_eval(in, backend, MetricSelection{});
    EXPECT_EQ(report.record_count, 2u);
    EXPECT_EQ(report.skipped_lines, 5u);
    EXPECT_EQ(report.failed_records, 1u);
    EXPECT_EQ(report.rouge1->f1, 1.0);
    ASSERT_EQ(report.records.size(), 2u);
    EXPECT_TRUE(report.records[1].error);
}

TEST(RunEval, AcceptsStoredPagesAsInput) {
    auto page = read_file(fixtures_dir() / "pages/fixture_oslo.html");
    std::istringstream in(nlohmann::json{{"input", page}, {"reference", "x"}}.dump() + "\n");
    auto report = run_eval(in, *make_template_service_backend(), MetricSelection{});
    EXPECT_EQ(report.record_count, 1u);
    EXPECT_EQ(report.records[0].record.candidate_text, render_template_bulletin(parse_page(page).dataset));
}

TEST(RunEval, EmptyCorpus) {
    std::istringstream in("\n\nbad\n");
    EXPECT_THROW(run_eval(in, EchoBackend{}, MetricSelection{}), EmptyCorpusError);
}

TEST(RunEval, JudgeMeanOverFourRecords) {
    std::vector<std::string> replies = {"1", "0.5", "1.", "1/2"};
    testsupport::StubMessageServer judge("/", [&](const std::string&, int i) {
        return replies[static_cast<std::size_t>(i)];
    });
    LookupBackend backend({{"A", "a"}, {"B", "b"}, {"C", "c"}, {"D", "d"}});
    std::istringstream in(corpus_line("A", "a") + corpus_line("B", "b") + corpus_line("C", "c") +
                          corpus_line("D", "d"));
    MetricSelection metrics;
    metrics.rouge = false;
    metrics.judge_endpoint = judge.url();
    metrics.client = std::make_shared<NetworkHttpClient>();
    auto report = run_eval(in, backend, metrics);
    EXPECT_NEAR(*report.judge_mean, 0.75, 1e-12);
    EXPECT_EQ(report.judge_errors, 0u);
    EXPECT_FALSE(report.rouge1);
}

TEST(RunEval, ExternalScorerSlot) {
    testsupport::StubMessageServer scorer("/score", [](const std::string& m, int i) {
        auto pair = nlohmann::json::parse(m);
        EXPECT_TRUE(pair.contains("candidate"));
        EXPECT_TRUE(pair.contains("reference"));
        return i == 0 ? std::string("0.25") : std::string("high");
    });
    LookupBackend backend({{"A", "a"}, {"B", "b"}});
    std::istringstream in(corpus_line("A", "a") + corpus_line("B", "b"));
    MetricSelection metrics;
    metrics.bleurt_endpoint = scorer.url();
    metrics.client = std::make_shared<NetworkHttpClient>();
    auto report = run_eval(in, backend, metrics);
    EXPECT_EQ(*report.bleurt_mean, 0.25);
    EXPECT_EQ(report.bleurt_errors, 1u);
    auto json = report.to_json();
    EXPECT_EQ(json["bleurt_mean"], 0.25);
    EXPECT_TRUE(validate_report_schema(json));
}

TEST(Report, JsonSchema) {
    LookupBackend backend({{"A", "the cat sat"}});
    std::istringstream in(corpus_line("A", "the cat ran"));
    auto report = run_eval(in, backend, MetricSelection{});
    auto json = report.to_json();
    std::string why;
    EXPECT_TRUE(validate_report_schema(json, &why)) << why;
    EXPECT_EQ(json["record_count"], 1);
    EXPECT_NEAR(json["rouge2"]["f1"].get<double>(), 0.5, 1e-12);
    EXPECT_FALSE(json.contains("judge_mean"));

    auto broken = nlohmann::json::parse(json.dump());
    broken["rouge1"]["f1"] = 1.5;
    EXPECT_FALSE(validate_report_schema(broken, &why));
    EXPECT_NE(why.find("rouge1"), std::string::npos);
    broken.erase("records");
    EXPECT_FALSE(validate_report_schema(broken));
}

TEST(Report, ExampleReportFixtureHasValidShape) {
    auto json = nlohmann::json::parse(read_file(fixtures_dir() / "example_report.json"));
    std::string why;
    EXPECT_TRUE(validate_report_schema(json, &why)) << why;
}

TEST(Report, MeansTable) {
    EvalReport report;
    report.record_count = 2;
    report.rouge1 = ScoreTriple{1.0, 0.5, 2.0 / 3.0};
    report.judge_mean = 0.75;
    auto table = format_means_table(report);
    EXPECT_NE(table.find("ROUGE-1  P 1.000  R 0.500  F 0.667"), std::string::npos) << table;
    EXPECT_NE(table.find("judge    0.750 (errors 0)"), std::string::npos) << table;
    EXPECT_EQ(table.find("ROUGE-2"), std::string::npos);
}
