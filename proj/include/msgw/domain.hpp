#ifndef MSGW_DOMAIN_HPP
#define MSGW_DOMAIN_HPP

#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace msgw {

// Canonical units throughout: degrees C, km/h, mm, percent, compass degrees.

class GeoCoordinate {
public:
    // Throws ValueError outside [-90, 90] x [-180, 180] or on NaN.
    GeoCoordinate(double latitude_deg, double longitude_deg);

    double latitude_deg() const noexcept { return latitude_; }
    double longitude_deg() const noexcept { return longitude_; }

    bool operator==(const GeoCoordinate&) const = default;

private:
    double latitude_;
    double longitude_;
};

struct SlotValues {
    int slot_index = 0;
    double temperature_c = 0.0;
    double felt_temperature_c = 0.0;
    double wind_speed_kmh = 0.0;
    double wind_direction_deg = 0.0;
    double precipitation_mm = 0.0;
    int precipitation_probability_pct = 0;
    int cloud_cover_pct = 0;

    bool operator==(const SlotValues&) const = default;
};

/// One 3-hour slot; slot k covers hours [3k, 3k+3).
class WeatherSlot {
public:
    // Throws ValueError when any field is out of range, or when precipitation
    // is reported with zero probability.
    explicit WeatherSlot(const SlotValues& values);

    const SlotValues& values() const noexcept { return v_; }
    int slot_index() const noexcept { return v_.slot_index; }
    double temperature_c() const noexcept { return v_.temperature_c; }
    double felt_temperature_c() const noexcept { return v_.felt_temperature_c; }
    double wind_speed_kmh() const noexcept { return v_.wind_speed_kmh; }
    double wind_direction_deg() const noexcept { return v_.wind_direction_deg; }
    double precipitation_mm() const noexcept { return v_.precipitation_mm; }
    int precipitation_probability_pct() const noexcept { return v_.precipitation_probability_pct; }
    int cloud_cover_pct() const noexcept { return v_.cloud_cover_pct; }

    bool operator==(const WeatherSlot&) const = default;

private:
    SlotValues v_;
};

inline constexpr std::size_t kSlotsPerDay = 8;

/// One day of eight 3-hour slots for a geolocated place.
class ForecastDataset {
public:
    // Slots may arrive in any order; they are stored by slot_index. Throws
    // ValueError unless the indices are exactly {0..7}.
    ForecastDataset(std::string location_name, GeoCoordinate coordinate, std::chrono::year_month_day date,
                    std::vector<WeatherSlot> slots);

    const std::string& location_name() const noexcept { return location_name_; }
    const GeoCoordinate& coordinate() const noexcept { return coordinate_; }
    std::chrono::year_month_day date() const noexcept { return date_; }
    const std::vector<WeatherSlot>& slots() const noexcept { return slots_; }

    bool operator==(const ForecastDataset&) const = default;

private:
    std::string location_name_;
    GeoCoordinate coordinate_;
    std::chrono::year_month_day date_;
    std::vector<WeatherSlot> slots_;
};

class TimeWindow {
public:
    enum class Kind { Today, NextDays };

    static TimeWindow today() noexcept { return TimeWindow(Kind::Today, 0); }
    // Throws ValueError unless 1 <= days <= 14.
    static TimeWindow next_days(int days);

    Kind kind() const noexcept { return kind_; }
    int days() const noexcept { return days_; }

    bool operator==(const TimeWindow&) const = default;

private:
    TimeWindow(Kind kind, int days) noexcept : kind_(kind), days_(days) {}

    Kind kind_;
    int days_;
};

enum class QueryClass { WeatherQuery, GeneralQuery };

struct Place {
    std::string name;
    GeoCoordinate coordinate;

    bool operator==(const Place&) const = default;
};

struct QueryAnalysis {
    std::string original_text;
    QueryClass query_class = QueryClass::GeneralQuery;
    std::optional<Place> location;
    TimeWindow window = TimeWindow::today();
    bool window_clamped = false;
};

class Bulletin {
public:
    // Throws ValueError on empty text.
    Bulletin(std::string text, std::string backend_id, std::string location_name,
             std::chrono::system_clock::time_point generated_at = std::chrono::system_clock::now());

    const std::string& text() const noexcept { return text_; }
    const std::string& backend_id() const noexcept { return backend_id_; }
    const std::string& location_name() const noexcept { return location_name_; }
    std::chrono::system_clock::time_point generated_at() const noexcept { return generated_at_; }

private:
    std::string text_;
    std::string backend_id_;
    std::string location_name_;
    std::chrono::system_clock::time_point generated_at_;
};

// Harmonic mean of precision and recall; 0 when both are 0.
// Throws ValueError for inputs outside [0, 1].
double f_score(double precision, double recall);

struct ScoreTriple {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static ScoreTriple from(double precision, double recall) {
        return ScoreTriple{precision, recall, f_score(precision, recall)};
    }
};

using MetricScore = std::variant<ScoreTriple, double>;

struct EvalRecord {
    std::string input_document;
    std::string reference_text;
    std::string candidate_text;
    std::map<std::string, MetricScore> scores;
};

// 16-point compass name for a direction in degrees; sector k covers
// [22.5k - 11.25, 22.5k + 11.25) with wraparound.
std::string_view compass_point(double degrees);

// "YYYY-MM-DD"
std::string format_date(std::chrono::year_month_day date);
// Throws ValueError on anything but a valid YYYY-MM-DD date.
std::chrono::year_month_day parse_date(std::string_view text);

} // namespace msgw

#endif
