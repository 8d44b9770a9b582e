#ifndef MSGW_EVALUATION_HPP
#define MSGW_EVALUATION_HPP

#include "msgw/domain.hpp"
#include "msgw/generation.hpp"
#include "msgw/http_client.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msgw {

class TokenSequence;
TokenSequence eval_tokenize(std::string_view text);

/// Tokens as seen by the ROUGE metrics. Only eval_tokenize builds these.
class TokenSequence {
public:
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    bool empty() const noexcept { return tokens_.empty(); }

private:
    explicit TokenSequence(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {}
    friend TokenSequence eval_tokenize(std::string_view text);

    std::vector<std::string> tokens_;
};

// ROUGE-N with clipped n-gram counts. Throws ValueError for n < 1.
ScoreTriple rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n);

// ROUGE-L from the longest common subsequence of tokens.
ScoreTriple rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

inline constexpr std::string_view kJudgeInstruction =
    "For the following AI-generated weather bulletin, provide a ranking of how plausible it is given the weather "
    "data in the provided weather API JSON. A rank of 0 means completely not plausible, 1/2 means it is ok but has "
    "some mistakes, 1 means perfectly plausible. Your answer should be a single number.";

// Instruction, newline, input document, newline, bulletin.
// Throws ValueError when either argument is empty.
std::string build_judge_prompt(std::string_view input_document, std::string_view bulletin);

// "0", "0.5", "1/2" or "1", optionally followed by a period, surrounding
// whitespace ignored. Throws JudgeParseError otherwise.
double parse_judge_reply(std::string_view reply);

// Posts the judge prompt over the {"message"} contract, parses the reply and
// stores it as record.scores["judge"]. Every failure surfaces as JudgeError.
double judge_score(EvalRecord& record, const std::string& judge_endpoint, const HttpClient& client);

struct MetricSelection {
    bool rouge = true;
    std::optional<std::string> judge_endpoint;
    // External learned-metric scorer speaking the same {"message"} contract.
    std::optional<std::string> bleurt_endpoint;
    std::shared_ptr<const HttpClient> client;
};

struct RecordResult {
    std::size_t line = 0;
    EvalRecord record;
    std::optional<std::string> error;
    std::optional<std::string> judge_error;
    std::optional<std::string> bleurt_error;
};

/// Corpus-level aggregate. Means are arithmetic means of the per-record values
/// (per-record F1 averaged, not pooled counts) over records that produced the
/// metric.
struct EvalReport {
    std::size_t record_count = 0;
    std::size_t skipped_lines = 0;
    std::size_t failed_records = 0;
    std::optional<ScoreTriple> rouge1;
    std::optional<ScoreTriple> rouge2;
    std::optional<ScoreTriple> rougeL;
    std::optional<double> judge_mean;
    std::size_t judge_errors = 0;
    std::optional<double> bleurt_mean;
    std::size_t bleurt_errors = 0;
    std::vector<RecordResult> records;

    nlohmann::ordered_json to_json() const;
};

/// Corpus lines are {"input": <forecast document object or string>,
/// "reference": "<text>"}. String inputs may hold a canonical forecast
/// document or a stored provider page. Malformed lines are skipped and
/// counted; blank lines are ignored. Throws EmptyCorpusError when no record
/// is valid.
EvalReport run_eval(std::istream& corpus, const GeneratorBackend& backend, const MetricSelection& metrics);

// Means table for terminals, one metric per line.
std::string format_means_table(const EvalReport& report);

// Checks the report file shape (field names and types, value ranges) without
// looking at the values' magnitudes. On failure, *why says what is wrong.
bool validate_report_schema(const nlohmann::json& report, std::string* why = nullptr);

} // namespace msgw

#endif
