#include "msgw/domain.hpp"

#include "msgw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace msgw {

GeoCoordinate::GeoCoordinate(double latitude_deg, double longitude_deg)
    : latitude_(latitude_deg), longitude_(longitude_deg) {
    if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0))
        throw ValueError("latitude out of range [-90, 90]");
    if (!(longitude_deg >= -180.0 && longitude_deg <= 180.0))
        throw ValueError("longitude out of range [-180, 180]");
}

WeatherSlot::WeatherSlot(const SlotValues& values) : v_(values) {
    if (v_.slot_index < 0 || v_.slot_index >= static_cast<int>(kSlotsPerDay))
        throw ValueError("slot_index out of range 0..7");
    if (!std::isfinite(v_.temperature_c) || !std::isfinite(v_.felt_temperature_c))
        throw ValueError("temperature is not finite");
    if (!(v_.wind_speed_kmh >= 0.0) || !std::isfinite(v_.wind_speed_kmh))
        throw ValueError("wind speed must be >= 0");
    if (!(v_.wind_direction_deg >= 0.0 && v_.wind_direction_deg < 360.0))
        throw ValueError("wind direction out of range [0, 360)");
    if (!(v_.precipitation_mm >= 0.0) || !std::isfinite(v_.precipitation_mm))
        throw ValueError("precipitation must be >= 0");
    if (v_.precipitation_probability_pct < 0 || v_.precipitation_probability_pct > 100)
        throw ValueError("precipitation probability out of range 0..100");
    if (v_.cloud_cover_pct < 0 || v_.cloud_cover_pct > 100)
        throw ValueError("cloud cover out of range 0..100");
    if (v_.precipitation_mm > 0.0 && v_.precipitation_probability_pct == 0)
        throw ValueError("precipitation reported with zero probability");
}

ForecastDataset::ForecastDataset(std::string location_name, GeoCoordinate coordinate,
                                 std::chrono::year_month_day date, std::vector<WeatherSlot> slots)
    : location_name_(std::move(location_name)), coordinate_(coordinate), date_(date), slots_(std::move(slots)) {
    if (!date_.ok())
        throw ValueError("invalid calendar date");
    if (slots_.size() != kSlotsPerDay)
        throw ValueError("a forecast day needs exactly 8 slots, got " + std::to_string(slots_.size()));
    std::sort(slots_.begin(), slots_.end(),
              [](const WeatherSlot& a, const WeatherSlot& b) { return a.slot_index() < b.slot_index(); });
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].slot_index() != static_cast<int>(i))
            throw ValueError("slot indices must be exactly 0..7");
    }
}

TimeWindow TimeWindow::next_days(int days) {
    if (days < 1 || days > 14)
        throw ValueError("day count must be in 1..14");
    return TimeWindow(Kind::NextDays, days);
}

Bulletin::Bulletin(std::string text, std::string backend_id, std::string location_name,
                   std::chrono::system_clock::time_point generated_at)
    : text_(std::move(text)), backend_id_(std::move(backend_id)), location_name_(std::move(location_name)),
      generated_at_(generated_at) {
    if (text_.empty())
        throw ValueError("bulletin text is empty");
}

double f_score(double precision, double recall) {
    if (!(precision >= 0.0 && precision <= 1.0) || !(recall >= 0.0 && recall <= 1.0))
        throw ValueError("precision and recall must lie in [0, 1]");
    if (precision + recall == 0.0)
        return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

std::string_view compass_point(double degrees) {
    static constexpr std::array<std::string_view, 16> kNames = {
        "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE", "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW"};
    double wrapped = std::fmod(degrees, 360.0);
    if (wrapped < 0.0)
        wrapped += 360.0;
    auto sector = static_cast<int>(std::floor((wrapped + 11.25) / 22.5)) % 16;
    return kNames[static_cast<std::size_t>(sector)];
}

std::string format_date(std::chrono::year_month_day date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::chrono::year_month_day parse_date(std::string_view text) {
    auto digits = [&](std::size_t pos, std::size_t len) {
        int value = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9')
                throw ValueError("malformed date, expected YYYY-MM-DD");
            value = value * 10 + (text[i] - '0');
        }
        return value;
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw ValueError("malformed date, expected YYYY-MM-DD");
    std::chrono::year_month_day ymd{std::chrono::year{digits(0, 4)},
                                    std::chrono::month{static_cast<unsigned>(digits(5, 2))},
                                    std::chrono::day{static_cast<unsigned>(digits(8, 2))}};
    if (!ymd.ok())
        throw ValueError("invalid calendar date");
    return ymd;
}

} // namespace msgw
