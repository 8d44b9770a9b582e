#ifndef MSGW_PROVIDER_HPP
#define MSGW_PROVIDER_HPP

#include "msgw/domain.hpp"
#include "msgw/http_client.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace msgw {

inline constexpr std::string_view kDefaultProviderBase = "https://www.meteoblue.com/en/weather/week";

/// Where the forecast payload and the bulletin paragraph live inside a page.
/// The payload is the text between data_begin and data_end; when
/// data_entity_encoded is set (payload carried in an HTML attribute) entities
/// are decoded before parsing.
struct PageMarkers {
    std::string data_begin = R"(<script type="application/json" id="forecast-data">)";
    std::string data_end = "</script>";
    std::string bulletin_begin = R"(<p class="bulletin">)";
    std::string bulletin_end = "</p>";
    bool data_entity_encoded = false;
};

struct ProviderDocument {
    std::string raw_page;
    ForecastDataset dataset;
    std::optional<std::string> reference_bulletin;
};

// "{|lat|}{N|S}_{|lon|}{E|W}" with exactly three decimals, rounded half away
// from zero on the shortest decimal form of each value.
std::string format_coordinate(const GeoCoordinate& c);

// base + "/" + format_coordinate(c), never doubling the separator.
std::string build_url(const GeoCoordinate& c, std::string_view base = kDefaultProviderBase);

/// Extracts the embedded hourly forecast and the bulletin paragraph.
///
/// The payload is an object with location, latitude, longitude, date
/// (YYYY-MM-DD) and an "hourly" object of 24-element arrays: temperature,
/// felt_temperature, wind_speed, wind_direction, precipitation,
/// precipitation_probability, cloud_cover. Hourly values are resampled to
/// 3-hour slots: instantaneous quantities take the slot's first hour,
/// precipitation is summed, probability is the maximum.
///
/// Throws ParseError (NoDataBlock, BadPayload or InvariantViolation).
ProviderDocument parse_page(std::string_view html, const PageMarkers& markers = {});

// Fixture page template: the inverse of parse_page for a dataset.
std::string render_page(const ForecastDataset& dataset, const std::optional<std::string>& bulletin,
                        const PageMarkers& markers = {});

struct ProviderOptions {
    std::string base_url = std::string(kDefaultProviderBase);
    PageMarkers markers;
};

// GET build_url(c); one retry on transport failure. Throws ProviderError for
// non-200 statuses and transport failures; ParseError propagates.
ProviderDocument fetch_forecast(const GeoCoordinate& c, const HttpClient& client, const ProviderOptions& options = {});

/// Canonical forecast document handed to generators. Keys, in order:
/// location, latitude, longitude, date, slots[8]{time, temperature,
/// felt_temperature, wind_speed, wind_direction, precipitation,
/// precipitation_probability, cloud_cover}. Two-space indented; integral
/// values print without a fraction.
std::string serialize_dataset(const ForecastDataset& dataset);

// Inverse of serialize_dataset; also accepts any whitespace layout.
// Throws ParseError (BadPayload or InvariantViolation).
ForecastDataset deserialize_dataset(std::string_view document);

/// Offline provider: serves the pages of a directory keyed by the formatted
/// coordinate of each page's own payload. GET of a URL whose last path
/// segment is an unknown coordinate answers 404.
class FixtureHttpClient : public HttpClient {
public:
    // Throws IoError when the directory is unreadable. Pages that fail to
    // parse are not indexed.
    explicit FixtureHttpClient(const std::filesystem::path& pages_dir, const PageMarkers& markers = {});

    HttpResponse get(const std::string& url) const override;
    HttpResponse post_json(const std::string& url, const std::string& body) const override;

    std::size_t page_count() const noexcept { return pages_.size(); }

private:
    std::map<std::string, std::string> pages_;
};

} // namespace msgw

#endif
