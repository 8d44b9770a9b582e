#include "msgw/input_processing.hpp"

#include "msgw/errors.hpp"
#include "msgw/text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

namespace msgw {

Lexicon::Lexicon(const std::vector<std::string>& terms) {
    for (const auto& term : terms)
        add(term);
}

Lexicon Lexicon::seed() {
    return Lexicon({"weather", "rain", "snow", "wind", "sunny", "cloudy", "forecast", "temperature", "storm", "fog",
                    "humidity", "precipitation"});
}

Lexicon Lexicon::load(std::istream& source) {
    if (!source)
        throw IoError("lexicon source is not readable");
    Lexicon lexicon;
    std::string line;
    while (std::getline(source, line)) {
        auto term = text::trim(line);
        if (term.empty() || term.front() == '#')
            continue;
        lexicon.add(term);
    }
    if (source.bad())
        throw IoError("error while reading lexicon source");
    return lexicon;
}

Lexicon Lexicon::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open lexicon file " + path.string());
    return load(in);
}

void Lexicon::add(std::string_view term) {
    auto tokens = text::match_tokens(normalize(term));
    if (!tokens.empty() && std::find(terms_.begin(), terms_.end(), tokens) == terms_.end())
        terms_.push_back(std::move(tokens));
}

bool Lexicon::matches(const std::vector<std::string>& query_tokens) const {
    for (const auto& term : terms_) {
        auto hit = std::search(query_tokens.begin(), query_tokens.end(), term.begin(), term.end());
        if (hit != query_tokens.end())
            return true;
    }
    return false;
}

QueryClass classify(std::string_view query, const Lexicon& lexicon, const Gazetteer& gazetteer) {
    auto tokens = text::match_tokens(normalize(query));
    if (text::trim(query).empty())
        throw EmptyInputError();
    if (lexicon.matches(tokens) && gazetteer.find_in_text(query))
        return QueryClass::WeatherQuery;
    return QueryClass::GeneralQuery;
}

TimeWindow extract_timeframe(std::string_view query) {
    auto tokens = text::match_tokens(normalize(query));
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "today")
            return TimeWindow::today();
        if (tokens[i] == "tomorrow")
            return TimeWindow::next_days(1);
        if (tokens[i] == "next" && i + 2 < tokens.size() && (tokens[i + 2] == "days" || tokens[i + 2] == "day")) {
            const auto& count = tokens[i + 1];
            int days = 0;
            auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), days);
            if (ec == std::errc{} && ptr == count.data() + count.size() && days >= 1 && days <= 14)
                return TimeWindow::next_days(days);
        }
    }
    return TimeWindow::today();
}

QueryAnalysis analyze(std::string_view query, const Lexicon& lexicon, const Gazetteer& gazetteer) {
    QueryAnalysis qa;
    qa.original_text = std::string(query);
    qa.query_class = classify(query, lexicon, gazetteer);
    if (qa.query_class == QueryClass::WeatherQuery) {
        qa.location = gazetteer.find_in_text(query);
        // The provider serves only the current day.
        qa.window_clamped = extract_timeframe(query).kind() != TimeWindow::Kind::Today;
    }
    qa.window = TimeWindow::today();
    return qa;
}

std::string strip_control_chars(std::string_view input) {
    std::string out;
    out.reserve(input.size());
    for (char c : input) {
        auto u = static_cast<unsigned char>(c);
        if ((u < 0x20 && c != '\n') || u == 0x7F)
            continue;
        out.push_back(c);
    }
    return out;
}

std::string sanitize(std::string_view query) {
    if (text::utf8_length(query) > kMaxInputChars)
        throw InputTooLongError();
    auto cleaned = strip_control_chars(query);
    auto trimmed = text::trim(cleaned);
    if (trimmed.empty())
        throw EmptyInputError();
    return std::string(trimmed);
}

} // namespace msgw
