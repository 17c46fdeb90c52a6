#include "relpose/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace relpose {

void save_manifest(const PairManifest& manifest, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("synthdata: cannot open '" + path + "' for writing");
    for (const PairRecord& r : manifest.records) {
        nlohmann::ordered_json j;
        j["img1"] = r.img1;
        j["img2"] = r.img2;
        j["qw"] = r.ground_truth.dq.w;
        j["qx"] = r.ground_truth.dq.x;
        j["qy"] = r.ground_truth.dq.y;
        j["qz"] = r.ground_truth.dq.z;
        j["tx"] = r.ground_truth.dt.x();
        j["ty"] = r.ground_truth.dt.y();
        j["tz"] = r.ground_truth.dt.z();
        j["seed"] = r.seed;
        os << j.dump() << "\n";
    }
    if (!os) throw IoFailure("synthdata: write to '" + path + "' failed");
}

PairManifest load_manifest(const std::string& path, bool resolve_paths) {
    std::ifstream is(path);
    if (!is) throw IoFailure("synthdata: cannot open manifest '" + path + "'");
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    PairManifest manifest;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoFailure("synthdata: bad manifest line " + std::to_string(line_no) + " in '" +
                            path + "': " + e.what());
        }
        PairRecord r;
        try {
            r.img1 = j.at("img1").get<std::string>();
            r.img2 = j.at("img2").get<std::string>();
            const Quaternion q{j.at("qw").get<double>(), j.at("qx").get<double>(),
                               j.at("qy").get<double>(), j.at("qz").get<double>()};
            const Vec3 t(j.at("tx").get<double>(), j.at("ty").get<double>(),
                         j.at("tz").get<double>());
            if (t.norm() <= 1e-12)
                throw NearZeroTranslation("synthdata: zero ground-truth translation");
            r.ground_truth = RelativePose{quat_normalize(q), t.normalized()};
            r.seed = j.at("seed").get<std::uint64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw IoFailure("synthdata: manifest line " + std::to_string(line_no) +
                            " missing field: " + e.what());
        }
        if (resolve_paths) {
            if (std::filesystem::path(r.img1).is_relative()) r.img1 = (base / r.img1).string();
            if (std::filesystem::path(r.img2).is_relative()) r.img2 = (base / r.img2).string();
        }
        manifest.records.push_back(std::move(r));
    }
    return manifest;
}

}  // namespace relpose
