#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relpose/errors.hpp"

namespace relpose {

// 8-bit RGB raster, row-major, interleaved channels.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t& at(int x, int y, int c) {
        return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
};

// Binary PPM (P6), 8-bit, '#' comments allowed in the header.
Image read_ppm(const std::string& path);
void write_ppm(const Image& img, const std::string& path);

Image resize_bilinear(const Image& img, int new_width, int new_height);

struct CropPolicy {
    int smaller_dim_target = 323;  // aspect-preserving resize target; 0 skips resize
    int crop = 227;
    enum class Mode { Center, Random } mode = Mode::Center;
    std::uint64_t seed = 0;  // used for Random
};

// Aspect-preserving bilinear resize (smaller dimension to the target), then a
// center or seeded-random crop. Throws ImageTooSmall when the resized image
// cannot host the crop.
Image resize_and_crop(const Image& img, const CropPolicy& policy);

}  // namespace relpose
