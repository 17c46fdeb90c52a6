#include "relpose/nn/weights_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

namespace relpose::nn {

namespace {

constexpr char kMagic[4] = {'R', 'P', 'W', '1'};

// Serialization is defined little-endian; this code assumes a little-endian
// host, which covers every platform the project targets.
template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ContainerCorrupt("regressor: weight container truncated");
    return v;
}

}  // namespace

void save_weights(const std::string& path, std::span<const NodePtr> params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("regressor: cannot open '" + path + "' for writing");

    os.write(kMagic, 4);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
    for (const NodePtr& p : params) {
        if (p->name.size() > std::numeric_limits<std::uint16_t>::max())
            throw IoFailure("regressor: tensor name too long");
        write_pod<std::uint16_t>(os, static_cast<std::uint16_t>(p->name.size()));
        os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(p->value.rank()));
        for (int i = 0; i < p->value.rank(); ++i)
            write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(p->value.dim(i)));
        os.write(reinterpret_cast<const char*>(p->value.data()),
                 static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    }
    if (!os) throw IoFailure("regressor: write to '" + path + "' failed");
}

std::vector<std::pair<std::string, Tensor>> load_weights_raw(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoFailure("regressor: cannot open '" + path + "'");

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw ContainerCorrupt("regressor: '" + path + "' is not an RPW1 container");

    const auto count = read_pod<std::uint32_t>(is);
    std::vector<std::pair<std::string, Tensor>> entries;
    entries.reserve(count);
    for (std::uint32_t t = 0; t < count; ++t) {
        const auto name_len = read_pod<std::uint16_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        if (!is) throw ContainerCorrupt("regressor: weight container truncated");

        const auto rank = read_pod<std::uint8_t>(is);
        Shape shape(rank);
        for (int i = 0; i < rank; ++i) {
            const auto extent = read_pod<std::uint32_t>(is);
            if (extent == 0 || extent > (1u << 30))
                throw ContainerCorrupt("regressor: implausible extent in weight container");
            shape[static_cast<std::size_t>(i)] = static_cast<int>(extent);
        }
        Tensor data(shape);
        is.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(data.size() * sizeof(double)));
        if (!is) throw ContainerCorrupt("regressor: weight container truncated");
        entries.emplace_back(std::move(name), std::move(data));
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw ContainerCorrupt("regressor: trailing bytes in weight container");
    return entries;
}

void load_weights_into(const std::string& path, std::span<const NodePtr> params) {
    auto entries = load_weights_raw(path);
    std::map<std::string, Tensor*> by_name;
    for (auto& [name, tensor] : entries) by_name[name] = &tensor;

    for (const NodePtr& p : params) {
        auto it = by_name.find(p->name);
        if (it == by_name.end())
            throw ShapeMismatchOnLoad("regressor: container lacks tensor '" + p->name + "'");
        if (it->second->shape() != p->value.shape())
            throw ShapeMismatchOnLoad("regressor: tensor '" + p->name + "' has shape " +
                                      shape_str(it->second->shape()) + ", model expects " +
                                      shape_str(p->value.shape()));
        p->value = std::move(*it->second);
    }
}

}  // namespace relpose::nn
