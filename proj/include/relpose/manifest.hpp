#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relpose/geom.hpp"

namespace relpose {

// One dataset entry: an image pair with its ground-truth relative pose and
// the per-record generator seed it was produced from.
struct PairRecord {
    std::string img1;
    std::string img2;
    RelativePose ground_truth;
    std::uint64_t seed = 0;
};

struct PairManifest {
    std::vector<PairRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

// JSON Lines, one record per line:
//   {"img1":..., "img2":..., "qw":..., "qx":..., "qy":..., "qz":...,
//    "tx":..., "ty":..., "tz":..., "seed":...}
// Image paths are stored as written (normally relative to the manifest).
void save_manifest(const PairManifest& manifest, const std::string& path);

// Ground-truth quaternions and translations are renormalized on ingestion.
// When resolve_paths is true (default), relative image paths are resolved
// against the manifest's parent directory.
PairManifest load_manifest(const std::string& path, bool resolve_paths = true);

}  // namespace relpose
