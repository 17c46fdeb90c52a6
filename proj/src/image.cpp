#include "relpose/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "relpose/prng.hpp"

namespace relpose {

namespace {

// Skips whitespace and '#' comments, then reads one positive integer.
int read_header_int(std::istream& is, const std::string& path) {
    int c = is.peek();
    while (is && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            std::string line;
            std::getline(is, line);
        } else {
            is.get();
        }
        c = is.peek();
    }
    int value = -1;
    is >> value;
    if (!is || value < 0) throw IoFailure("synthdata: malformed PPM header in '" + path + "'");
    return value;
}

}  // namespace

Image read_ppm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoFailure("synthdata: cannot open '" + path + "'");
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || m1 != '6') throw IoFailure("synthdata: '" + path + "' is not a P6 PPM");

    const int w = read_header_int(is, path);
    const int h = read_header_int(is, path);
    const int maxval = read_header_int(is, path);
    if (maxval != 255) throw IoFailure("synthdata: only 8-bit PPM supported ('" + path + "')");
    is.get();  // single whitespace byte before the raster

    Image img(w, h);
    is.read(reinterpret_cast<char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
    if (!is) throw IoFailure("synthdata: truncated PPM raster in '" + path + "'");
    return img;
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("synthdata: cannot open '" + path + "' for writing");
    os << "P6\n" << img.width << " " << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()),
             static_cast<std::streamsize>(img.rgb.size()));
    if (!os) throw IoFailure("synthdata: write to '" + path + "' failed");
}

Image resize_bilinear(const Image& img, int new_width, int new_height) {
    Image out(new_width, new_height);
    const double sx = static_cast<double>(img.width) / new_width;
    const double sy = static_cast<double>(img.height) / new_height;
    for (int y = 0; y < new_height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < new_width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = (1.0 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
                const double bot = (1.0 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
                out.at(x, y, c) =
                    static_cast<std::uint8_t>(std::lround((1.0 - wy) * top + wy * bot));
            }
        }
    }
    return out;
}

Image resize_and_crop(const Image& img, const CropPolicy& policy) {
    Image resized = img;
    if (policy.smaller_dim_target > 0) {
        const int smaller = std::min(img.width, img.height);
        if (smaller != policy.smaller_dim_target) {
            const double scale = static_cast<double>(policy.smaller_dim_target) / smaller;
            const int nw = (img.width <= img.height)
                               ? policy.smaller_dim_target
                               : static_cast<int>(std::lround(img.width * scale));
            const int nh = (img.height <= img.width)
                               ? policy.smaller_dim_target
                               : static_cast<int>(std::lround(img.height * scale));
            resized = resize_bilinear(img, nw, nh);
        }
    }

    const int crop = policy.crop;
    if (resized.width < crop || resized.height < crop)
        throw ImageTooSmall("synthdata: image " + std::to_string(resized.width) + "x" +
                            std::to_string(resized.height) + " cannot host a " +
                            std::to_string(crop) + " crop");
    if (resized.width == crop && resized.height == crop) return resized;

    int x0 = (resized.width - crop) / 2;
    int y0 = (resized.height - crop) / 2;
    if (policy.mode == CropPolicy::Mode::Random) {
        SplitRng rng = SplitRng(policy.seed).split(0x63726f70);  // "crop" stream
        x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(resized.width - crop) + 1));
        y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(resized.height - crop) + 1));
    }

    Image out(crop, crop);
    for (int y = 0; y < crop; ++y)
        for (int x = 0; x < crop; ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = resized.at(x0 + x, y0 + y, c);
    return out;
}

}  // namespace relpose
