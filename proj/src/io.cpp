#include "sobosvd/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "json.hpp"
#include "sobosvd/error.hpp"

namespace sobosvd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return r;
    }
    return v;
}

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path.string());
    return os.str();
}

struct Meta {
    Shape shape;
    std::vector<double> lower, upper;
};

Meta read_meta(const fs::path& path) {
    Meta m;
    try {
        const json j = json::parse(read_all(path));
        m.shape = j.at("shape").get<Shape>();
        m.lower = j.contains("lower") ? j["lower"].get<std::vector<double>>() : std::vector<double>(m.shape.size(), 0.0);
        m.upper = j.contains("upper") ? j["upper"].get<std::vector<double>>() : std::vector<double>(m.shape.size(), 1.0);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, "bad metadata in " + path.string() + ": " + e.what());
    }
    if (m.shape.empty() || m.lower.size() != m.shape.size() || m.upper.size() != m.shape.size()) {
        throw Error(ErrorCode::Io, "metadata in " + path.string() + " needs matching shape, lower and upper");
    }
    return m;
}

GridFunction load_with(const fs::path& path, const Meta& meta) {
    const std::string bytes = read_all(path);
    const std::size_t expected = shape_size(meta.shape) * sizeof(double);
    if (bytes.size() != expected) {
        throw Error(ErrorCode::Io, path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                                       std::to_string(bytes.size()));
    }
    DenseTensor t(meta.shape);
    for (std::size_t i = 0; i < t.data().size(); ++i) {
        std::uint64_t raw = 0;
        std::memcpy(&raw, bytes.data() + i * sizeof(double), sizeof(raw));
        t.data()[i] = std::bit_cast<double>(to_little(raw));
    }
    std::vector<AxisPtr> axes;
    for (std::size_t j = 0; j < meta.shape.size(); ++j) axes.push_back(make_axis(meta.shape[j], meta.lower[j], meta.upper[j]));
    return GridFunction(std::move(axes), std::move(t));
}

}  // namespace

fs::path meta_path(const fs::path& path) { return fs::path(path.string() + ".meta.json"); }

GridFunction load_samples(const fs::path& path) {
    const fs::path mp = meta_path(path);
    if (!fs::exists(mp)) throw Error(ErrorCode::Io, "missing metadata file " + mp.string());
    return load_with(path, read_meta(mp));
}

GridFunction load_samples(const fs::path& path, const Shape& shape) {
    const fs::path mp = meta_path(path);
    Meta meta;
    if (fs::exists(mp)) {
        meta = read_meta(mp);
        if (meta.shape != shape) throw Error(ErrorCode::Io, "shape disagrees with " + mp.string());
    } else {
        meta.shape = shape;
        meta.lower.assign(shape.size(), 0.0);
        meta.upper.assign(shape.size(), 1.0);
    }
    return load_with(path, meta);
}

void save_samples(const fs::path& path, const GridFunction& f) {
    const auto& data = f.values().data();
    std::string bytes(data.size() * sizeof(double), '\0');
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::uint64_t raw = to_little(std::bit_cast<std::uint64_t>(data[i]));
        std::memcpy(bytes.data() + i * sizeof(double), &raw, sizeof(raw));
    }
    json meta;
    meta["shape"] = f.values().shape();
    meta["lower"] = json::array();
    meta["upper"] = json::array();
    for (std::size_t j = 0; j < f.dims(); ++j) {
        meta["lower"].push_back(f.axis(j).lower());
        meta["upper"].push_back(f.axis(j).upper());
    }
    write_file_atomic(path, bytes);
    write_file_atomic(meta_path(path), meta.dump(2) + "\n");
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    const fs::path tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot rename onto " + path.string());
    }
}

}  // namespace sobosvd
