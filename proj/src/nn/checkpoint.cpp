#include "ac/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ac::nn {
namespace {

using nlohmann::json;

void write_u64_le(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params) {
    json header;
    header["format"] = "ac-checkpoint-v1";
    json arrays = json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, var] : params.items()) {
        json a;
        a["name"] = name;
        a["shape"] = var->value.shape();
        a["offset"] = offset;
        arrays.push_back(a);
        offset += var->value.numel() * sizeof(double);
    }
    header["arrays"] = arrays;
    const std::string hs = header.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
    write_u64_le(os, hs.size());
    os.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& [name, var] : params.items()) {
        os.write(reinterpret_cast<const char*>(var->value.data()),
                 static_cast<std::streamsize>(var->value.numel() * sizeof(double)));
    }
    if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

void load_checkpoint(const std::string& path, ParamSet& params) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
    const std::uint64_t hlen = read_u64_le(is);
    std::string hs(hlen, '\0');
    is.read(hs.data(), static_cast<std::streamsize>(hlen));
    if (!is) throw std::runtime_error("load_checkpoint: truncated header in " + path);
    json header = json::parse(hs);
    const auto& arrays = header.at("arrays");
    const auto& items = params.items();
    if (arrays.size() != items.size())
        throw std::runtime_error("load_checkpoint: array count mismatch in " + path);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& a = arrays[i];
        const auto& [name, var] = items[i];
        if (a.at("name").get<std::string>() != name)
            throw std::runtime_error("load_checkpoint: name mismatch at index " +
                                     std::to_string(i) + " (" + name + ")");
        std::vector<std::size_t> shape = a.at("shape").get<std::vector<std::size_t>>();
        if (shape != var->value.shape())
            throw std::runtime_error("load_checkpoint: shape mismatch for " + name);
        is.read(reinterpret_cast<char*>(var->value.data()),
                static_cast<std::streamsize>(var->value.numel() * sizeof(double)));
        if (!is) throw std::runtime_error("load_checkpoint: truncated payload in " + path);
    }
}

}  // namespace ac::nn
