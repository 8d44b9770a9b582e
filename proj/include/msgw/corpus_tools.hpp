#ifndef MSGW_CORPUS_TOOLS_HPP
#define MSGW_CORPUS_TOOLS_HPP

#include "msgw/domain.hpp"
#include "msgw/provider.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace msgw {

struct CorpusBuildResult {
    std::size_t emitted = 0;
    std::size_t skipped_no_bulletin = 0;
    std::size_t skipped_unparseable = 0;
};

// One {"input": <canonical document>, "reference": <bulletin>} line per
// stored *.html page that has a bulletin, in sorted file-name order.
// Throws IoError when the directory or the output cannot be opened.
CorpusBuildResult build_corpus(const std::filesystem::path& pages_dir, const std::filesystem::path& out_path,
                               const PageMarkers& markers = {});

// Deterministic for a given seed. Latitude uniform in [-60, 70], longitude
// uniform in [-180, 180), both rounded to 3 decimals. Throws ValueError for
// n < 1.
std::vector<GeoCoordinate> sample_coordinates(int n, std::uint64_t seed);

} // namespace msgw

#endif
