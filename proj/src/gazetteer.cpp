#include "msgw/gazetteer.hpp"

#include "msgw/errors.hpp"
#include "msgw/text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

namespace msgw {

std::string normalize(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    bool pending_space = false;
    for (char32_t cp : text::decode_utf8(name)) {
        if (text::is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (auto folded = text::fold_diacritic(cp); !folded.empty())
            out += folded;
        else
            text::append_utf8(out, text::to_lower(cp));
    }
    return out;
}

namespace {

std::string index_key(std::string_view name) {
    return text::join(text::match_tokens(normalize(name)), " ");
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
    field = text::trim(field);
    if (field.empty())
        return false;
    if (field.front() == '+')
        field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    return ec == std::errc{} && ptr == field.data() + field.size();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos)
            break;
        start = tab + 1;
    }
    return fields;
}

} // namespace

void Gazetteer::add(std::string display_name, GeoCoordinate coordinate, std::uint64_t population) {
    auto key = index_key(display_name);
    if (key.empty())
        return;
    auto normalized = normalize(display_name);
    entries_.push_back(GazetteerEntry{std::move(display_name), std::move(normalized), coordinate, population});
    auto& bucket = index_[key];
    bucket.push_back(entries_.size() - 1);
    std::stable_sort(bucket.begin(), bucket.end(), [this](std::size_t a, std::size_t b) {
        return entries_[a].population > entries_[b].population;
    });
    max_name_tokens_ = std::max(max_name_tokens_, text::match_tokens(key).size());
}

std::vector<const GazetteerEntry*> Gazetteer::lookup(std::string_view name) const {
    std::vector<const GazetteerEntry*> found;
    auto it = index_.find(index_key(name));
    if (it == index_.end())
        return found;
    for (auto idx : it->second)
        found.push_back(&entries_[idx]);
    return found;
}

std::optional<Place> Gazetteer::find_in_text(std::string_view query) const {
    auto tokens = text::match_tokens(normalize(query));
    for (std::size_t start = 0; start < tokens.size(); ++start) {
        auto widest = std::min(max_name_tokens_, tokens.size() - start);
        for (auto width = widest; width >= 1; --width) {
            std::string window = tokens[start];
            for (std::size_t k = 1; k < width; ++k)
                window.append(" ").append(tokens[start + k]);
            auto it = index_.find(window);
            if (it != index_.end()) {
                const auto& best = entries_[it->second.front()];
                return Place{best.display_name, best.coordinate};
            }
        }
    }
    return std::nullopt;
}

Gazetteer Gazetteer::load(std::istream& source) {
    if (!source)
        throw IoError("gazetteer source is not readable");
    Gazetteer g;
    std::string line;
    while (std::getline(source, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#')
            continue;
        auto fields = split_tabs(line);
        double lat = 0.0;
        double lon = 0.0;
        std::uint64_t population = 0;
        if (fields.size() != 4 || index_key(fields[0]).empty() || !parse_number(fields[1], lat) ||
            !parse_number(fields[2], lon) || !parse_number(fields[3], population) ||
            !(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
            ++g.skipped_lines_;
            continue;
        }
        g.add(std::string(text::trim(fields[0])), GeoCoordinate(lat, lon), population);
    }
    if (source.bad())
        throw IoError("error while reading gazetteer source");
    if (g.entries_.empty())
        throw EmptyGazetteerError();
    return g;
}

Gazetteer Gazetteer::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open gazetteer file " + path.string());
    return load(in);
}

} // namespace msgw
