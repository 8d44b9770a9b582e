#include "msgw/provider.hpp"

#include "msgw/errors.hpp"
#include "msgw/html.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace msgw {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

constexpr std::size_t kHoursPerDay = 24;
constexpr std::size_t kHoursPerSlot = 3;

// Rounds a non-negative value to three decimals, half away from zero, working
// on its shortest round-trip decimal form.
std::string three_decimals(double value) {
    std::array<char, 512> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
    std::string repr(buf.data(), end);
    auto dot = repr.find('.');
    std::string int_part = repr.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : repr.substr(dot + 1);
    bool round_up = frac.size() > 3 && frac[3] >= '5';
    frac.resize(3, '0');
    std::string digits = int_part + frac;
    if (round_up) {
        auto i = digits.size();
        while (i > 0) {
            --i;
            if (digits[i] == '9') {
                digits[i] = '0';
            } else {
                ++digits[i];
                break;
            }
            if (i == 0)
                digits.insert(digits.begin(), '1');
        }
    }
    return digits.substr(0, digits.size() - 3) + "." + digits.substr(digits.size() - 3);
}

ordered_json number(double value) {
    if (std::trunc(value) == value && std::fabs(value) < 1e15)
        return static_cast<std::int64_t>(value);
    return value;
}

std::string slot_time(int slot_index) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:00", slot_index * static_cast<int>(kHoursPerSlot));
    return buf;
}

[[noreturn]] void bad_payload(const std::string& detail) {
    throw ParseError(ParseErrorKind::BadPayload, detail);
}

[[noreturn]] void invariant_violation(const std::string& detail) {
    throw ParseError(ParseErrorKind::InvariantViolation, detail);
}

double get_number(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number())
        bad_payload(std::string("missing numeric field '") + key + "'");
    return it->get<double>();
}

std::string get_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        bad_payload(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

int as_percent(double value, const char* what) {
    if (std::trunc(value) != value || value < 0.0 || value > 100.0)
        invariant_violation(std::string(what) + " must be an integer percentage");
    return static_cast<int>(value);
}

GeoCoordinate make_coordinate(double lat, double lon) {
    try {
        return GeoCoordinate(lat, lon);
    } catch (const ValueError& e) {
        invariant_violation(e.what());
    }
}

std::chrono::year_month_day make_date(const std::string& text) {
    try {
        return parse_date(text);
    } catch (const ValueError& e) {
        bad_payload(e.what());
    }
}

WeatherSlot make_slot(const SlotValues& values) {
    try {
        return WeatherSlot(values);
    } catch (const ValueError& e) {
        invariant_violation("slot " + std::to_string(values.slot_index) + ": " + e.what());
    }
}

ForecastDataset make_dataset(std::string location, GeoCoordinate coordinate, std::chrono::year_month_day date,
                             std::vector<WeatherSlot> slots) {
    try {
        return ForecastDataset(std::move(location), coordinate, date, std::move(slots));
    } catch (const ValueError& e) {
        invariant_violation(e.what());
    }
}

std::vector<double> hourly_series(const json& hourly, const char* key) {
    auto it = hourly.find(key);
    if (it == hourly.end() || !it->is_array())
        bad_payload(std::string("missing hourly series '") + key + "'");
    if (it->size() != kHoursPerDay)
        bad_payload(std::string("hourly series '") + key + "' has " + std::to_string(it->size()) +
                    " records, expected 24");
    std::vector<double> values;
    values.reserve(kHoursPerDay);
    for (const auto& v : *it) {
        if (!v.is_number())
            bad_payload(std::string("non-numeric value in hourly series '") + key + "'");
        values.push_back(v.get<double>());
    }
    return values;
}

ForecastDataset decode_payload(const json& payload) {
    if (!payload.is_object())
        bad_payload("forecast payload is not an object");
    auto location = get_string(payload, "location");
    auto lat = get_number(payload, "latitude");
    auto lon = get_number(payload, "longitude");
    auto date = make_date(get_string(payload, "date"));
    auto hourly_it = payload.find("hourly");
    if (hourly_it == payload.end() || !hourly_it->is_object())
        bad_payload("missing 'hourly' object");
    const auto& hourly = *hourly_it;

    auto temperature = hourly_series(hourly, "temperature");
    auto felt = hourly_series(hourly, "felt_temperature");
    auto wind_speed = hourly_series(hourly, "wind_speed");
    auto wind_direction = hourly_series(hourly, "wind_direction");
    auto precipitation = hourly_series(hourly, "precipitation");
    auto probability = hourly_series(hourly, "precipitation_probability");
    auto cloud = hourly_series(hourly, "cloud_cover");

    std::vector<WeatherSlot> slots;
    for (std::size_t k = 0; k < kSlotsPerDay; ++k) {
        auto first = k * kHoursPerSlot;
        SlotValues v;
        v.slot_index = static_cast<int>(k);
        v.temperature_c = temperature[first];
        v.felt_temperature_c = felt[first];
        v.wind_speed_kmh = wind_speed[first];
        v.wind_direction_deg = wind_direction[first];
        double precip_sum = 0.0;
        int max_probability = 0;
        for (std::size_t h = first; h < first + kHoursPerSlot; ++h) {
            if (precipitation[h] < 0.0)
                invariant_violation("negative hourly precipitation");
            precip_sum += precipitation[h];
            max_probability = std::max(max_probability, as_percent(probability[h], "precipitation_probability"));
        }
        v.precipitation_mm = precip_sum;
        v.precipitation_probability_pct = max_probability;
        v.cloud_cover_pct = as_percent(cloud[first], "cloud_cover");
        slots.push_back(make_slot(v));
    }
    return make_dataset(std::move(location), make_coordinate(lat, lon), date, std::move(slots));
}

std::string last_path_segment(const std::string& url) {
    auto path = split_url(url).path;
    auto query = path.find_first_of("?#");
    if (query != std::string::npos)
        path.resize(query);
    while (!path.empty() && path.back() == '/')
        path.pop_back();
    return path.substr(path.rfind('/') + 1);
}

} // namespace

std::string format_coordinate(const GeoCoordinate& c) {
    auto lat = c.latitude_deg();
    auto lon = c.longitude_deg();
    return three_decimals(std::fabs(lat)) + (lat < 0 ? "S" : "N") + "_" + three_decimals(std::fabs(lon)) +
           (lon < 0 ? "W" : "E");
}

std::string build_url(const GeoCoordinate& c, std::string_view base) {
    std::string url(base);
    while (!url.empty() && url.back() == '/')
        url.pop_back();
    return url + "/" + format_coordinate(c);
}

ProviderDocument parse_page(std::string_view html, const PageMarkers& markers) {
    auto begin = html.find(markers.data_begin);
    if (html.empty() || markers.data_begin.empty() || begin == std::string_view::npos)
        throw ParseError(ParseErrorKind::NoDataBlock, "forecast data block not found");
    begin += markers.data_begin.size();
    auto end = html.find(markers.data_end, begin);
    if (end == std::string_view::npos)
        throw ParseError(ParseErrorKind::NoDataBlock, "forecast data block is not terminated");

    std::string payload_text(html.substr(begin, end - begin));
    if (markers.data_entity_encoded)
        payload_text = decode_html_entities(payload_text);
    auto payload = json::parse(payload_text, nullptr, false);
    if (payload.is_discarded())
        bad_payload("forecast data block is not valid JSON");

    ProviderDocument doc{std::string(html), decode_payload(payload), std::nullopt};

    auto b_begin = html.find(markers.bulletin_begin);
    if (!markers.bulletin_begin.empty() && b_begin != std::string_view::npos) {
        b_begin += markers.bulletin_begin.size();
        auto b_end = html.find(markers.bulletin_end, b_begin);
        if (b_end != std::string_view::npos) {
            auto text = html_to_text(html.substr(b_begin, b_end - b_begin));
            if (!text.empty())
                doc.reference_bulletin = std::move(text);
        }
    }
    return doc;
}

std::string render_page(const ForecastDataset& dataset, const std::optional<std::string>& bulletin,
                        const PageMarkers& markers) {
    ordered_json hourly;
    std::array<std::vector<ordered_json>, 7> series;
    for (const auto& slot : dataset.slots()) {
        for (std::size_t h = 0; h < kHoursPerSlot; ++h) {
            series[0].push_back(number(slot.temperature_c()));
            series[1].push_back(number(slot.felt_temperature_c()));
            series[2].push_back(number(slot.wind_speed_kmh()));
            series[3].push_back(number(slot.wind_direction_deg()));
            series[4].push_back(number(h == 0 ? slot.precipitation_mm() : 0.0));
            series[5].push_back(slot.precipitation_probability_pct());
            series[6].push_back(slot.cloud_cover_pct());
        }
    }
    static constexpr const char* kKeys[] = {"temperature",   "felt_temperature", "wind_speed",  "wind_direction",
                                            "precipitation", "precipitation_probability", "cloud_cover"};
    for (std::size_t i = 0; i < series.size(); ++i)
        hourly[kKeys[i]] = series[i];

    ordered_json payload;
    payload["location"] = dataset.location_name();
    payload["latitude"] = number(dataset.coordinate().latitude_deg());
    payload["longitude"] = number(dataset.coordinate().longitude_deg());
    payload["date"] = format_date(dataset.date());
    payload["hourly"] = std::move(hourly);

    auto payload_text = payload.dump();
    if (markers.data_entity_encoded) {
        payload_text = escape_html(payload_text);
    } else {
        // Keep "</script>" inside strings from closing the element.
        for (auto pos = payload_text.find("</"); pos != std::string::npos; pos = payload_text.find("</", pos + 3))
            payload_text.replace(pos, 2, "<\\/");
    }

    auto title = escape_html(dataset.location_name());
    std::ostringstream page;
    page << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" << title
         << " weather</title>\n</head>\n<body>\n<h1>" << title << "</h1>\n"
         << markers.data_begin << payload_text << markers.data_end << "\n";
    if (bulletin)
        page << markers.bulletin_begin << escape_html(*bulletin) << markers.bulletin_end << "\n";
    page << "</body>\n</html>\n";
    return page.str();
}

ProviderDocument fetch_forecast(const GeoCoordinate& c, const HttpClient& client, const ProviderOptions& options) {
    auto url = build_url(c, options.base_url);
    HttpResponse response;
    for (int attempt = 0;; ++attempt) {
        try {
            response = client.get(url);
            break;
        } catch (const TransportError& e) {
            if (attempt >= 1)
                throw ProviderError::transport(e.failure(), e.what());
        }
    }
    if (response.status != 200)
        throw ProviderError::status(response.status);
    return parse_page(response.body, options.markers);
}

std::string serialize_dataset(const ForecastDataset& dataset) {
    ordered_json doc;
    doc["location"] = dataset.location_name();
    doc["latitude"] = number(dataset.coordinate().latitude_deg());
    doc["longitude"] = number(dataset.coordinate().longitude_deg());
    doc["date"] = format_date(dataset.date());
    auto slots = ordered_json::array();
    for (const auto& slot : dataset.slots()) {
        ordered_json s;
        s["time"] = slot_time(slot.slot_index());
        s["temperature"] = number(slot.temperature_c());
        s["felt_temperature"] = number(slot.felt_temperature_c());
        s["wind_speed"] = number(slot.wind_speed_kmh());
        s["wind_direction"] = number(slot.wind_direction_deg());
        s["precipitation"] = number(slot.precipitation_mm());
        s["precipitation_probability"] = slot.precipitation_probability_pct();
        s["cloud_cover"] = slot.cloud_cover_pct();
        slots.push_back(std::move(s));
    }
    doc["slots"] = std::move(slots);
    return doc.dump(2);
}

ForecastDataset deserialize_dataset(std::string_view document) {
    auto doc = json::parse(document, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        bad_payload("forecast document is not a JSON object");
    auto location = get_string(doc, "location");
    auto lat = get_number(doc, "latitude");
    auto lon = get_number(doc, "longitude");
    auto date = make_date(get_string(doc, "date"));
    auto slots_it = doc.find("slots");
    if (slots_it == doc.end() || !slots_it->is_array())
        bad_payload("missing 'slots' array");
    if (slots_it->size() != kSlotsPerDay)
        bad_payload("expected 8 slots, got " + std::to_string(slots_it->size()));

    std::vector<WeatherSlot> slots;
    for (const auto& s : *slots_it) {
        if (!s.is_object())
            bad_payload("slot is not an object");
        auto time = get_string(s, "time");
        int hour = -1;
        if (time.size() == 5 && time.substr(2) == ":00") {
            auto [ptr, ec] = std::from_chars(time.data(), time.data() + 2, hour);
            if (ec != std::errc{} || ptr != time.data() + 2)
                hour = -1;
        }
        if (hour < 0 || hour % static_cast<int>(kHoursPerSlot) != 0)
            bad_payload("slot time must be HH:00 on a 3-hour boundary");
        SlotValues v;
        v.slot_index = hour / static_cast<int>(kHoursPerSlot);
        v.temperature_c = get_number(s, "temperature");
        v.felt_temperature_c = get_number(s, "felt_temperature");
        v.wind_speed_kmh = get_number(s, "wind_speed");
        v.wind_direction_deg = get_number(s, "wind_direction");
        v.precipitation_mm = get_number(s, "precipitation");
        v.precipitation_probability_pct =
            as_percent(get_number(s, "precipitation_probability"), "precipitation_probability");
        v.cloud_cover_pct = as_percent(get_number(s, "cloud_cover"), "cloud_cover");
        slots.push_back(make_slot(v));
    }
    return make_dataset(std::move(location), make_coordinate(lat, lon), date, std::move(slots));
}

FixtureHttpClient::FixtureHttpClient(const std::filesystem::path& pages_dir, const PageMarkers& markers) {
    std::error_code ec;
    std::filesystem::directory_iterator it(pages_dir, ec);
    if (ec)
        throw IoError("cannot read fixture directory " + pages_dir.string());
    for (const auto& entry : it) {
        if (!entry.is_regular_file() || entry.path().extension() != ".html")
            continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::string page((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        try {
            auto doc = parse_page(page, markers);
            pages_.emplace(format_coordinate(doc.dataset.coordinate()), std::move(page));
        } catch (const ParseError&) {
            continue;
        }
    }
}

HttpResponse FixtureHttpClient::get(const std::string& url) const {
    auto it = pages_.find(last_path_segment(url));
    if (it == pages_.end())
        return HttpResponse{404, "not found"};
    return HttpResponse{200, it->second};
}

HttpResponse FixtureHttpClient::post_json(const std::string&, const std::string&) const {
    return HttpResponse{405, "method not allowed"};
}

} // namespace msgw
