#include "msgw/corpus_tools.hpp"

#include "msgw/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace msgw {

CorpusBuildResult build_corpus(const std::filesystem::path& pages_dir, const std::filesystem::path& out_path,
                               const PageMarkers& markers) {
    std::error_code ec;
    std::filesystem::directory_iterator it(pages_dir, ec);
    if (ec)
        throw IoError("cannot read pages directory " + pages_dir.string());
    std::vector<std::filesystem::path> pages;
    for (const auto& entry : it) {
        if (entry.is_regular_file() && entry.path().extension() == ".html")
            pages.push_back(entry.path());
    }
    std::sort(pages.begin(), pages.end());

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write corpus file " + out_path.string());

    CorpusBuildResult result;
    for (const auto& path : pages) {
        std::ifstream in(path, std::ios::binary);
        std::string html((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        try {
            auto doc = parse_page(html, markers);
            if (!doc.reference_bulletin) {
                ++result.skipped_no_bulletin;
                continue;
            }
            nlohmann::ordered_json line;
            line["input"] = nlohmann::ordered_json::parse(serialize_dataset(doc.dataset));
            line["reference"] = *doc.reference_bulletin;
            out << line.dump() << '\n';
            ++result.emitted;
        } catch (const ParseError&) {
            ++result.skipped_unparseable;
        }
    }
    if (!out)
        throw IoError("error while writing corpus file " + out_path.string());
    return result;
}

std::vector<GeoCoordinate> sample_coordinates(int n, std::uint64_t seed) {
    if (n < 1)
        throw ValueError("sample size must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lat_dist(-60.0, 70.0);
    std::uniform_real_distribution<double> lon_dist(-180.0, 180.0);
    auto round3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
    std::vector<GeoCoordinate> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double lat = std::clamp(round3(lat_dist(rng)), -60.0, 70.0);
        double lon = round3(lon_dist(rng));
        if (lon >= 180.0)
            lon = -180.0;
        out.emplace_back(lat, lon);
    }
    return out;
}

} // namespace msgw
