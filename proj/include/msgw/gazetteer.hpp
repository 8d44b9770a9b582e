#ifndef MSGW_GAZETTEER_HPP
#define MSGW_GAZETTEER_HPP

#include "msgw/domain.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace msgw {

// Lowercase, strip diacritics to base letters, collapse internal whitespace
// to single spaces and trim. Idempotent.
std::string normalize(std::string_view name);

struct GazetteerEntry {
    std::string display_name;
    std::string normalized_name;
    GeoCoordinate coordinate;
    std::uint64_t population = 0;
};

/// Read-only place-name index built once at startup.
///
/// Names are keyed by their punctuation-stripped normalized tokens, so
/// "Paris?" in a query matches the entry "Paris". Several entries may share
/// a key (homonym cities); they are kept ordered by descending population.
class Gazetteer {
public:
    Gazetteer() = default;

    // Ignores entries whose name normalizes to nothing.
    void add(std::string display_name, GeoCoordinate coordinate, std::uint64_t population);

    // All entries registered under normalize(name), most populous first.
    std::vector<const GazetteerEntry*> lookup(std::string_view name) const;

    // Leftmost-longest match of any known name in the query; homonyms resolve
    // to the highest population.
    std::optional<Place> find_in_text(std::string_view query) const;

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t max_name_tokens() const noexcept { return max_name_tokens_; }
    std::size_t skipped_lines() const noexcept { return skipped_lines_; }
    const std::vector<GazetteerEntry>& entries() const noexcept { return entries_; }

    // Tab-separated name, latitude, longitude, population. '#' lines and blank
    // lines are ignored; malformed lines are skipped and counted.
    // Throws IoError on a failed stream, EmptyGazetteerError when nothing loads.
    static Gazetteer load(std::istream& source);
    static Gazetteer load_file(const std::filesystem::path& path);

private:
    std::vector<GazetteerEntry> entries_;
    std::unordered_map<std::string, std::vector<std::size_t>> index_;
    std::size_t max_name_tokens_ = 0;
    std::size_t skipped_lines_ = 0;
};

} // namespace msgw

#endif
