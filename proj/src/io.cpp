#include "relpose/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace relpose {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 16; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double parsed = 0.0;
        std::sscanf(buf, "%lf", &parsed);
        if (parsed == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<PoseLine> read_pose_lines(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoFailure("io: cannot open pose file '" + path + "'");
    std::vector<PoseLine> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        PoseLine p;
        if (!(ls >> p.id)) continue;  // blank or comment-only line
        if (!(ls >> p.q.w >> p.q.x >> p.q.y >> p.q.z >> p.t.x() >> p.t.y() >> p.t.z()))
            throw IoFailure("io: malformed pose line " + std::to_string(line_no) + " in '" +
                            path + "'");
        out.push_back(p);
    }
    return out;
}

void write_pose_lines(const std::vector<PoseLine>& lines, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("io: cannot open '" + path + "' for writing");
    for (const PoseLine& p : lines)
        os << p.id << " " << fmt_double(p.q.w) << " " << fmt_double(p.q.x) << " "
           << fmt_double(p.q.y) << " " << fmt_double(p.q.z) << " " << fmt_double(p.t.x())
           << " " << fmt_double(p.t.y()) << " " << fmt_double(p.t.z()) << "\n";
    if (!os) throw IoFailure("io: write to '" + path + "' failed");
}

AbsolutePose to_absolute_pose(const PoseLine& line) {
    return AbsolutePose{quat_to_rotation(line.q), line.t};
}

std::vector<SceneCamera> read_scene_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoFailure("io: cannot open scene '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("io: bad scene JSON in '" + path + "': " + e.what());
    }

    std::vector<SceneCamera> cameras;
    try {
        for (const auto& jc : j.at("cameras")) {
            SceneCamera cam;
            cam.id = jc.at("id").get<std::int64_t>();
            const auto& ji = jc.at("intrinsics");
            cam.intrinsics.fx = ji.at("fx").get<double>();
            cam.intrinsics.fy = ji.at("fy").get<double>();
            cam.intrinsics.cx = ji.at("cx").get<double>();
            cam.intrinsics.cy = ji.at("cy").get<double>();
            cam.intrinsics.width = ji.at("width").get<int>();
            cam.intrinsics.height = ji.at("height").get<int>();
            const auto& jp = jc.at("pose");
            const auto q = jp.at("q").get<std::vector<double>>();
            const auto t = jp.at("t").get<std::vector<double>>();
            if (q.size() != 4 || t.size() != 3)
                throw IoFailure("io: pose q/t arrays must have 4 and 3 entries");
            cam.pose.rotation = quat_to_rotation(Quaternion{q[0], q[1], q[2], q[3]});
            cam.pose.translation = Vec3(t[0], t[1], t[2]);
            cameras.push_back(std::move(cam));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("io: scene '" + path + "' missing field: " + e.what());
    }
    return cameras;
}

void write_scene_json(const std::vector<SceneCamera>& cameras, const std::string& path) {
    nlohmann::ordered_json j;
    j["cameras"] = nlohmann::ordered_json::array();
    for (const SceneCamera& cam : cameras) {
        const Quaternion q = rotation_to_quat(cam.pose.rotation);
        nlohmann::ordered_json jc;
        jc["id"] = cam.id;
        jc["intrinsics"] = {{"fx", cam.intrinsics.fx}, {"fy", cam.intrinsics.fy},
                            {"cx", cam.intrinsics.cx}, {"cy", cam.intrinsics.cy},
                            {"width", cam.intrinsics.width}, {"height", cam.intrinsics.height}};
        jc["pose"] = {{"q", {q.w, q.x, q.y, q.z}},
                      {"t", {cam.pose.translation.x(), cam.pose.translation.y(),
                             cam.pose.translation.z()}}};
        j["cameras"].push_back(std::move(jc));
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("io: cannot open '" + path + "' for writing");
    os << j.dump(2) << "\n";
    if (!os) throw IoFailure("io: write to '" + path + "' failed");
}

void write_pairs_csv(const std::vector<std::pair<int, int>>& pairs, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("io: cannot open '" + path + "' for writing");
    os << "i,j\n";
    for (const auto& [i, j] : pairs) os << i << "," << j << "\n";
    if (!os) throw IoFailure("io: write to '" + path + "' failed");
}

std::vector<CorrespondenceSet::Match> read_match_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoFailure("io: cannot open match file '" + path + "'");
    std::vector<CorrespondenceSet::Match> matches;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("u1", 0) == 0) continue;  // header
        }
        CorrespondenceSet::Match m;
        char comma;
        std::istringstream ls(line);
        if (!(ls >> m.u1 >> comma >> m.v1 >> comma >> m.u2 >> comma >> m.v2))
            throw IoFailure("io: malformed match line " + std::to_string(line_no) + " in '" +
                            path + "'");
        matches.push_back(m);
    }
    return matches;
}

void write_match_csv(const std::vector<CorrespondenceSet::Match>& matches,
                     const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("io: cannot open '" + path + "' for writing");
    os << "u1,v1,u2,v2\n";
    for (const auto& m : matches)
        os << fmt_double(m.u1) << "," << fmt_double(m.v1) << "," << fmt_double(m.u2) << ","
           << fmt_double(m.v2) << "\n";
    if (!os) throw IoFailure("io: write to '" + path + "' failed");
}

}  // namespace relpose
