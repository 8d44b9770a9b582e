#include "msgw/evaluation.hpp"

#include "msgw/errors.hpp"
#include "msgw/provider.hpp"
#include "msgw/text.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <unordered_map>

namespace msgw {

TokenSequence eval_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char32_t cp : text::decode_utf8(text)) {
        if (text::is_alnum(cp)) {
            text::append_utf8(current, text::to_lower(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return TokenSequence(std::move(tokens));
}

namespace {

std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
    std::unordered_map<std::string, int> counts;
    if (tokens.size() < n)
        return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (std::size_t k = 1; k < n; ++k)
            key.append(1, '\x1f').append(tokens[i + k]);
        ++counts[key];
    }
    return counts;
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

ScoreTriple rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n) {
    if (n < 1)
        throw ValueError("ROUGE-N needs n >= 1");
    auto un = static_cast<std::size_t>(n);
    auto cand = ngram_counts(candidate.tokens(), un);
    auto ref = ngram_counts(reference.tokens(), un);
    std::size_t overlap = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end())
            overlap += static_cast<std::size_t>(std::min(count, it->second));
    }
    auto cand_total = candidate.size() >= un ? candidate.size() - un + 1 : 0;
    auto ref_total = reference.size() >= un ? reference.size() - un + 1 : 0;
    return ScoreTriple::from(ratio(overlap, cand_total), ratio(overlap, ref_total));
}

ScoreTriple rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
    const auto& a = candidate.tokens();
    const auto& b = reference.tokens();
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            row[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], row[j - 1]);
        std::swap(prev, row);
    }
    auto lcs = prev[b.size()];
    return ScoreTriple::from(ratio(lcs, a.size()), ratio(lcs, b.size()));
}

std::string build_judge_prompt(std::string_view input_document, std::string_view bulletin) {
    if (input_document.empty() || bulletin.empty())
        throw ValueError("judge prompt needs a non-empty document and bulletin");
    std::string prompt(kJudgeInstruction);
    prompt.append("\n").append(input_document).append("\n").append(bulletin);
    return prompt;
}

double parse_judge_reply(std::string_view reply) {
    auto value = text::trim(reply);
    if (!value.empty() && value.back() == '.')
        value.remove_suffix(1);
    if (value == "0")
        return 0.0;
    if (value == "0.5" || value == "1/2")
        return 0.5;
    if (value == "1")
        return 1.0;
    throw JudgeParseError(std::string(reply));
}

namespace {

// One round trip over the {"message"} contract; transport and protocol
// failures are reported through make_error.
template <typename MakeError>
std::string exchange_message(const HttpClient& client, const std::string& endpoint, const std::string& message,
                             MakeError&& make_error) {
    HttpResponse response;
    try {
        response = client.post_json(endpoint, nlohmann::json{{"message", message}}.dump());
    } catch (const TransportError& e) {
        throw make_error(std::string("transport failure: ") + e.what());
    }
    if (response.status != 200)
        throw make_error("HTTP " + std::to_string(response.status));
    auto reply = nlohmann::json::parse(response.body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("message") || !reply["message"].is_string())
        throw make_error("reply has no message field");
    return reply["message"].get<std::string>();
}

std::optional<ForecastDataset> decode_corpus_input(const nlohmann::json& input) {
    try {
        if (input.is_object())
            return deserialize_dataset(input.dump());
        if (input.is_string()) {
            const auto& s = input.get_ref<const std::string&>();
            auto trimmed = text::trim(s);
            if (!trimmed.empty() && trimmed.front() == '{')
                return deserialize_dataset(s);
            return parse_page(s).dataset;
        }
    } catch (const ParseError&) {
    }
    return std::nullopt;
}

nlohmann::ordered_json triple_json(const ScoreTriple& t) {
    return nlohmann::ordered_json{{"p", t.precision}, {"r", t.recall}, {"f1", t.f1}};
}

ScoreTriple mean_triple(const std::vector<ScoreTriple>& values) {
    ScoreTriple sum;
    for (const auto& v : values) {
        sum.precision += v.precision;
        sum.recall += v.recall;
        sum.f1 += v.f1;
    }
    auto n = static_cast<double>(values.size());
    return ScoreTriple{sum.precision / n, sum.recall / n, sum.f1 / n};
}

double mean(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum / static_cast<double>(values.size());
}

} // namespace

double judge_score(EvalRecord& record, const std::string& judge_endpoint, const HttpClient& client) {
    std::string prompt;
    try {
        prompt = build_judge_prompt(record.input_document, record.candidate_text);
    } catch (const ValueError& e) {
        throw JudgeError(e.what());
    }
    auto reply = exchange_message(client, judge_endpoint, prompt,
                                  [](const std::string& what) { return JudgeError("judge: " + what); });
    double score = parse_judge_reply(reply);
    record.scores["judge"] = score;
    return score;
}

EvalReport run_eval(std::istream& corpus, const GeneratorBackend& backend, const MetricSelection& metrics) {
    if ((metrics.judge_endpoint || metrics.bleurt_endpoint) && !metrics.client)
        throw ValueError("judge or external scorer selected without an HTTP client");

    EvalReport report;
    std::vector<ScoreTriple> r1, r2, rl;
    std::vector<double> judge, bleurt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(corpus, line)) {
        ++line_no;
        if (text::trim(line).empty())
            continue;
        auto parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("input") ||
            !parsed.contains("reference") || !parsed["reference"].is_string() ||
            text::trim(parsed["reference"].get_ref<const std::string&>()).empty()) {
            ++report.skipped_lines;
            continue;
        }
        auto dataset = decode_corpus_input(parsed["input"]);
        if (!dataset) {
            ++report.skipped_lines;
            continue;
        }
        ++report.record_count;

        RecordResult result;
        result.line = line_no;
        result.record.input_document = serialize_dataset(*dataset);
        result.record.reference_text = parsed["reference"].get<std::string>();
        auto request = GenerationRequest::forecast("What is the weather in " + dataset->location_name() + " today?",
                                                   result.record.input_document);
        try {
            result.record.candidate_text = backend.generate(request).text();
        } catch (const std::exception& e) {
            result.error = e.what();
            ++report.failed_records;
            report.records.push_back(std::move(result));
            continue;
        }

        if (metrics.rouge) {
            auto cand = eval_tokenize(result.record.candidate_text);
            auto ref = eval_tokenize(result.record.reference_text);
            auto s1 = rouge_n(cand, ref, 1);
            auto s2 = rouge_n(cand, ref, 2);
            auto sl = rouge_l(cand, ref);
            result.record.scores["rouge1"] = s1;
            result.record.scores["rouge2"] = s2;
            result.record.scores["rougeL"] = sl;
            r1.push_back(s1);
            r2.push_back(s2);
            rl.push_back(sl);
        }
        if (metrics.judge_endpoint) {
            try {
                judge.push_back(judge_score(result.record, *metrics.judge_endpoint, *metrics.client));
            } catch (const JudgeError& e) {
                result.judge_error = e.what();
                ++report.judge_errors;
            }
        }
        if (metrics.bleurt_endpoint) {
            try {
                nlohmann::json pair{{"candidate", result.record.candidate_text},
                                    {"reference", result.record.reference_text}};
                auto reply = exchange_message(*metrics.client, *metrics.bleurt_endpoint, pair.dump(),
                                              [](const std::string& what) { return Error("scorer: " + what); });
                auto value = nlohmann::json::parse(reply, nullptr, false);
                if (!value.is_number() || value.get<double>() < 0.0 || value.get<double>() > 1.0)
                    throw Error("scorer: reply is not a number in [0, 1]");
                result.record.scores["bleurt"] = value.get<double>();
                bleurt.push_back(value.get<double>());
            } catch (const Error& e) {
                result.bleurt_error = e.what();
                ++report.bleurt_errors;
            }
        }
        report.records.push_back(std::move(result));
    }
    if (corpus.bad())
        throw IoError("error while reading corpus");
    if (report.record_count == 0)
        throw EmptyCorpusError();

    if (!r1.empty()) {
        report.rouge1 = mean_triple(r1);
        report.rouge2 = mean_triple(r2);
        report.rougeL = mean_triple(rl);
    }
    if (!judge.empty())
        report.judge_mean = mean(judge);
    if (!bleurt.empty())
        report.bleurt_mean = mean(bleurt);
    return report;
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json out;
    out["record_count"] = record_count;
    out["skipped_lines"] = skipped_lines;
    out["failed_records"] = failed_records;
    auto triple_or_null = [](const std::optional<ScoreTriple>& t) {
        return t ? triple_json(*t) : nlohmann::ordered_json(nullptr);
    };
    out["rouge1"] = triple_or_null(rouge1);
    out["rouge2"] = triple_or_null(rouge2);
    out["rougeL"] = triple_or_null(rougeL);
    if (judge_mean || judge_errors > 0) {
        out["judge_mean"] = judge_mean ? nlohmann::ordered_json(*judge_mean) : nlohmann::ordered_json(nullptr);
        out["judge_errors"] = judge_errors;
    }
    if (bleurt_mean || bleurt_errors > 0) {
        out["bleurt_mean"] = bleurt_mean ? nlohmann::ordered_json(*bleurt_mean) : nlohmann::ordered_json(nullptr);
        out["bleurt_errors"] = bleurt_errors;
    }
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json row;
        row["line"] = r.line;
        row["reference"] = r.record.reference_text;
        row["candidate"] = r.record.candidate_text;
        nlohmann::ordered_json scores = nlohmann::ordered_json::object();
        for (const auto& [name, score] : r.record.scores) {
            if (const auto* t = std::get_if<ScoreTriple>(&score))
                scores[name] = triple_json(*t);
            else
                scores[name] = std::get<double>(score);
        }
        row["scores"] = std::move(scores);
        if (r.error)
            row["error"] = *r.error;
        if (r.judge_error)
            row["judge_error"] = *r.judge_error;
        if (r.bleurt_error)
            row["bleurt_error"] = *r.bleurt_error;
        rows.push_back(std::move(row));
    }
    out["records"] = std::move(rows);
    return out;
}

std::string format_means_table(const EvalReport& report) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "records %zu (skipped lines %zu, failed %zu)\n", report.record_count,
                  report.skipped_lines, report.failed_records);
    out += buf;
    auto triple_row = [&](const char* name, const std::optional<ScoreTriple>& t) {
        if (!t)
            return;
        std::snprintf(buf, sizeof buf, "%-8s P %.3f  R %.3f  F %.3f\n", name, t->precision, t->recall, t->f1);
        out += buf;
    };
    triple_row("ROUGE-1", report.rouge1);
    triple_row("ROUGE-2", report.rouge2);
    triple_row("ROUGE-L", report.rougeL);
    if (report.judge_mean || report.judge_errors) {
        if (report.judge_mean)
            std::snprintf(buf, sizeof buf, "%-8s %.3f (errors %zu)\n", "judge", *report.judge_mean,
                          report.judge_errors);
        else
            std::snprintf(buf, sizeof buf, "%-8s n/a (errors %zu)\n", "judge", report.judge_errors);
        out += buf;
    }
    if (report.bleurt_mean) {
        std::snprintf(buf, sizeof buf, "%-8s %.4f (errors %zu)\n", "BLEURT", *report.bleurt_mean,
                      report.bleurt_errors);
        out += buf;
    }
    return out;
}

bool validate_report_schema(const nlohmann::json& report, std::string* why) {
    auto fail = [why](const std::string& msg) {
        if (why)
            *why = msg;
        return false;
    };
    auto unit = [](const nlohmann::json& v) { return v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0; };
    auto triple_ok = [&](const nlohmann::json& t) {
        return t.is_null() || (t.is_object() && t.contains("p") && t.contains("r") && t.contains("f1") &&
                               unit(t["p"]) && unit(t["r"]) && unit(t["f1"]));
    };
    if (!report.is_object())
        return fail("report is not an object");
    if (!report.contains("record_count") || !report["record_count"].is_number_unsigned())
        return fail("record_count missing or not a non-negative integer");
    for (const char* key : {"rouge1", "rouge2", "rougeL"}) {
        if (!report.contains(key) || !triple_ok(report[key]))
            return fail(std::string(key) + " missing or not a {p, r, f1} object in [0, 1]");
    }
    for (const char* key : {"judge_mean", "bleurt_mean"}) {
        if (report.contains(key) && !report[key].is_null() && !unit(report[key]))
            return fail(std::string(key) + " is not a number in [0, 1]");
    }
    if (!report.contains("records") || !report["records"].is_array())
        return fail("records missing or not an array");
    for (const auto& r : report["records"]) {
        if (!r.is_object() || !r.contains("scores") || !r["scores"].is_object())
            return fail("record without a scores object");
    }
    return true;
}

} // namespace msgw
