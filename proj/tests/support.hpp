// Shared helpers for the unit tests and the acceptance binary: fixture paths,
// random datasets, stub HTTP peers and the brute-force ROUGE oracles.

#ifndef MSGW_TESTS_SUPPORT_HPP
#define MSGW_TESTS_SUPPORT_HPP

#include "msgw/domain.hpp"
#include "msgw/http_client.hpp"
#include "msgw/server.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <initializer_list>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

inline std::filesystem::path fixtures_dir() { return MSGW_TEST_FIXTURES_DIR; }
inline std::filesystem::path data_dir() { return MSGW_TEST_DATA_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline double round_to(double v, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

inline msgw::ForecastDataset random_dataset(std::mt19937_64& rng) {
    static const std::vector<std::string> names = {"Paris", "São Paulo", "Zürich", "Iași", "A </script> & <b>town</b>",
                                                   "Quote \"Town\"", "Nairobi", "Ōsaka"};
    std::uniform_real_distribution<double> temp(-40.0, 45.0), wind(0.0, 120.0),
        precip(0.0, 30.0), lat(-90.0, 90.0), lon(-180.0, 180.0);
    std::uniform_int_distribution<int> pct(0, 100), coin(0, 3), dir(0, 359);
    std::vector<msgw::WeatherSlot> slots;
    for (int i = 0; i < 8; ++i) {
        msgw::SlotValues v;
        v.slot_index = i;
        v.temperature_c = round_to(temp(rng), 1);
        v.felt_temperature_c = round_to(v.temperature_c - 5.0 + temp(rng) / 10.0, 1);
        v.wind_speed_kmh = round_to(wind(rng), 1);
        v.wind_direction_deg = dir(rng);
        v.precipitation_probability_pct = pct(rng);
        v.cloud_cover_pct = pct(rng);
        v.precipitation_mm =
            (v.precipitation_probability_pct > 0 && coin(rng) != 0) ? round_to(precip(rng), 2) : 0.0;
        slots.emplace_back(v);
    }
    std::shuffle(slots.begin(), slots.end(), rng);
    std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
    std::uniform_int_distribution<int> day(1, 28), month(1, 12);
    auto date = std::chrono::year_month_day{std::chrono::year{2024}, std::chrono::month{static_cast<unsigned>(month(rng))},
                                            std::chrono::day{static_cast<unsigned>(day(rng))}};
    return msgw::ForecastDataset(names[pick(rng)], msgw::GeoCoordinate(round_to(lat(rng), 3), round_to(lon(rng), 3)),
                                 date, std::move(slots));
}

inline std::vector<std::string> random_tokens(std::mt19937_64& rng, int min_len, int max_len, int alphabet) {
    std::uniform_int_distribution<int> len(min_len, max_len), sym(0, alphabet - 1);
    std::vector<std::string> out(static_cast<std::size_t>(len(rng)));
    for (auto& t : out)
        t = "w" + std::to_string(sym(rng));
    return out;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty())
            out += ' ';
        out += t;
    }
    return out;
}

// What the bundled provider pages were written from. Rows are slot 0..7:
// temperature, felt, wind speed, wind direction, precipitation mm,
// probability %, cloud %.
struct AuthoredPage {
    std::string location;
    double latitude, longitude;
    std::string date;
    std::string bulletin;
    std::vector<msgw::SlotValues> slots;
};

inline std::vector<msgw::SlotValues> rows(std::initializer_list<std::array<double, 7>> table) {
    std::vector<msgw::SlotValues> out;
    int index = 0;
    for (const auto& r : table) {
        msgw::SlotValues v;
        v.slot_index = index++;
        v.temperature_c = r[0];
        v.felt_temperature_c = r[1];
        v.wind_speed_kmh = r[2];
        v.wind_direction_deg = r[3];
        v.precipitation_mm = r[4];
        v.precipitation_probability_pct = static_cast<int>(r[5]);
        v.cloud_cover_pct = static_cast<int>(r[6]);
        out.push_back(v);
    }
    return out;
}

inline const std::map<std::string, AuthoredPage>& authored_fixtures() {
    static const std::map<std::string, AuthoredPage> pages = {
        {"paris",
         {"Paris", 48.857, 2.352, "2024-03-14",
          "A cold but clear day in Paris, with temperatures rising from -1°C overnight to 7°C in the afternoon. "
          "Light westerly winds up to 14 km/h and no rain expected.",
          rows({{-1, -4, 8, 250, 0, 0, 10},
                {-1, -4.5, 9, 250, 0, 0, 10},
                {1, -2, 10, 260, 0, 5, 20},
                {4, 2, 12, 265, 0, 10, 30},
                {7, 5.5, 14, 270, 0, 10, 30},
                {6, 4, 13, 275, 0, 5, 20},
                {3, 0.5, 11, 280, 0, 0, 20},
                {1, -2, 9, 285, 0, 0, 20}})}},
        {"berlin",
         {"Berlin", 52.52, 13.405, "2024-03-14",
          "Rain is expected in Berlin throughout the day, heaviest around midday with up to 3 mm in three hours. "
          "Temperatures between 2°C and 9°C, with south-westerly winds reaching 25 km/h.",
          rows({{3, 0, 15, 200, 0, 20, 60},
                {2, -1, 16, 205, 0.5, 45, 70},
                {3, 0, 18, 210, 1.25, 70, 85},
                {5, 2, 22, 220, 2.5, 85, 90},
                {8, 5, 25, 225, 3, 90, 95},
                {9, 6, 24, 230, 1.5, 75, 90},
                {7, 4, 20, 225, 0.25, 40, 80},
                {5, 2, 17, 220, 0, 25, 75}})}},
        {"oslo",
         {"Oslo", 59.914, 10.752, "2024-03-14",
          "Snow showers are possible in Oslo today, mainly around midday. A freezing day with temperatures between "
          "-7°C and -1°C and light northerly winds up to 11 km/h.",
          rows({{-6, -11, 5, 0, 0, 10, 50},
                {-7, -12, 6, 10, 0, 15, 60},
                {-6, -11, 7, 20, 0.25, 35, 70},
                {-3, -7, 9, 350, 0.5, 50, 80},
                {-1, -4, 11, 355, 0.75, 55, 85},
                {-2, -5, 10, 5, 0.25, 40, 75},
                {-4, -8, 8, 15, 0, 20, 60},
                {-5, -10, 6, 30, 0, 10, 50}})}},
    };
    return pages;
}

// Oracles. Written against the textbook definitions, sharing no code with
// the library.

struct OracleScore {
    double p, r, f;
};

inline double oracle_f(double p, double r) { return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

inline std::vector<std::vector<std::string>> all_ngrams(const std::vector<std::string>& t, int n) {
    std::vector<std::vector<std::string>> grams;
    for (int i = 0; i + n <= static_cast<int>(t.size()); ++i)
        grams.emplace_back(t.begin() + i, t.begin() + i + n);
    return grams;
}

// Multiset intersection of sorted n-gram lists.
inline OracleScore oracle_rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref, int n) {
    auto c = all_ngrams(cand, n);
    auto r = all_ngrams(ref, n);
    auto cs = c, rs = r;
    std::sort(cs.begin(), cs.end());
    std::sort(rs.begin(), rs.end());
    std::vector<std::vector<std::string>> common;
    std::set_intersection(cs.begin(), cs.end(), rs.begin(), rs.end(), std::back_inserter(common));
    double overlap = static_cast<double>(common.size());
    double p = c.empty() ? 0.0 : overlap / static_cast<double>(c.size());
    double rec = r.empty() ? 0.0 : overlap / static_cast<double>(r.size());
    return {p, rec, oracle_f(p, rec)};
}

// Memoised recursive LCS.
inline int oracle_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::pair<std::size_t, std::size_t>, int> memo;
    std::function<int(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> int {
        if (i == a.size() || j == b.size())
            return 0;
        auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        int best = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
        memo[key] = best;
        return best;
    };
    return go(0, 0);
}

inline OracleScore oracle_rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
    double l = oracle_lcs(cand, ref);
    double p = cand.empty() ? 0.0 : l / static_cast<double>(cand.size());
    double r = ref.empty() ? 0.0 : l / static_cast<double>(ref.size());
    return {p, r, oracle_f(p, r)};
}

// In-process HttpClient answering from a function.
class FakeHttpClient : public msgw::HttpClient {
public:
    using Handler = std::function<msgw::HttpResponse(const std::string& method, const std::string& url,
                                                     const std::string& body)>;
    explicit FakeHttpClient(Handler h) : handler_(std::move(h)) {}

    msgw::HttpResponse get(const std::string& url) const override {
        ++calls;
        return handler_("GET", url, "");
    }
    msgw::HttpResponse post_json(const std::string& url, const std::string& body) const override {
        ++calls;
        return handler_("POST", url, body);
    }

    mutable std::atomic<int> calls{0};

private:
    Handler handler_;
};

// Real HTTP server on an ephemeral port answering POST {path} with a
// {"message"} reply produced by reply_for(request message, call index).
class StubMessageServer {
public:
    StubMessageServer(std::string path, std::function<std::string(const std::string&, int)> reply_for)
        : path_(path), server_([this, path, reply_for](httplib::Server& s) {
              s.Post(path, [this, reply_for](const httplib::Request& req, httplib::Response& res) {
                  int index = counter_++;
                  std::string message;
                  try {
                      message = nlohmann::json::parse(req.body).at("message").get<std::string>();
                  } catch (...) {
                      res.status = 500;
                      return;
                  }
                  res.set_content(nlohmann::json{{"message", reply_for(message, index)}}.dump(), "application/json");
              });
          }) {
        server_.start();
    }

    std::string url() const { return server_.url(path_); }
    std::string url(const std::string& path) const { return server_.url(path); }
    int calls() const { return counter_.load(); }

private:
    std::string path_;
    std::atomic<int> counter_{0};
    msgw::BackgroundServer server_;
};

} // namespace testsupport

#endif
