#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relpose/camera.hpp"
#include "relpose/epipolar.hpp"
#include "relpose/geom.hpp"

namespace relpose {

// Pose text format: one entry per line, `id qw qx qy qz tx ty tz`,
// whitespace separated, '#' starts a comment.
struct PoseLine {
    std::int64_t id = 0;
    Quaternion q;
    Vec3 t = Vec3::Zero();
};

std::vector<PoseLine> read_pose_lines(const std::string& path);
void write_pose_lines(const std::vector<PoseLine>& lines, const std::string& path);

AbsolutePose to_absolute_pose(const PoseLine& line);

// Scene JSON: {"cameras": [{id, intrinsics{fx,fy,cx,cy,width,height},
//                           pose{q:[w,x,y,z], t:[x,y,z]}}]}
std::vector<SceneCamera> read_scene_json(const std::string& path);
void write_scene_json(const std::vector<SceneCamera>& cameras, const std::string& path);

// CSV `i,j` with header.
void write_pairs_csv(const std::vector<std::pair<int, int>>& pairs, const std::string& path);

// CSV `u1,v1,u2,v2` with header.
std::vector<CorrespondenceSet::Match> read_match_csv(const std::string& path);
void write_match_csv(const std::vector<CorrespondenceSet::Match>& matches,
                     const std::string& path);

}  // namespace relpose
