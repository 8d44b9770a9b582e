#ifndef MSGW_INPUT_PROCESSING_HPP
#define MSGW_INPUT_PROCESSING_HPP

#include "msgw/domain.hpp"
#include "msgw/gazetteer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace msgw {

inline constexpr std::size_t kMaxInputChars = 1500;

/// Weather vocabulary used by the classifier. Terms are stored as normalized
/// token sequences and matched on token boundaries.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(const std::vector<std::string>& terms);

    // weather, rain, snow, wind, sunny, cloudy, forecast, temperature, storm,
    // fog, humidity, precipitation
    static Lexicon seed();

    // One term per line, '#' comments. Throws IoError.
    static Lexicon load(std::istream& source);
    static Lexicon load_file(const std::filesystem::path& path);

    void add(std::string_view term);
    bool matches(const std::vector<std::string>& query_tokens) const;
    std::size_t size() const noexcept { return terms_.size(); }

private:
    std::vector<std::vector<std::string>> terms_;
};

// WeatherQuery iff the query has a lexicon term and a known place.
// Throws EmptyInputError when the query is blank.
QueryClass classify(std::string_view query, const Lexicon& lexicon, const Gazetteer& gazetteer);

// "today", "tomorrow" and "next N days" (1 <= N <= 14); default Today.
TimeWindow extract_timeframe(std::string_view query);

// classify + place lookup + timeframe, then the current-day clamp: weather
// queries asking for future days come back as Today with window_clamped set.
QueryAnalysis analyze(std::string_view query, const Lexicon& lexicon, const Gazetteer& gazetteer);

// Drops ASCII control characters other than '\n' and trims. Throws
// InputTooLongError past 1500 code points, EmptyInputError when nothing is left.
std::string sanitize(std::string_view query);

// Control-character strip only (no trim, no limit).
std::string strip_control_chars(std::string_view input);

} // namespace msgw

#endif
