#include "tga/checkpoint.hpp"

#include "tga/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace tga {

Checkpoint Checkpoint::from_params(const ParamSet& params, std::uint64_t seed,
                                   nlohmann::ordered_json config_echo) {
    Checkpoint c;
    c.seed = seed;
    c.config_echo = std::move(config_echo);
    for (const auto& [name, p] : params) c.tensors.emplace_back(name, p.value);
    return c;
}

const Tensor* Checkpoint::find(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return &t;
    return nullptr;
}

bool operator==(const Checkpoint& a, const Checkpoint& b) {
    return a.version == b.version && a.seed == b.seed && a.config_echo == b.config_echo &&
           a.tensors == b.tensors;
}

namespace {

void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64_le(std::string& out, double d) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    nlohmann::ordered_json header;
    header["version"] = ckpt.version;
    header["seed"] = ckpt.seed;
    header["config"] = ckpt.config_echo;
    nlohmann::ordered_json descs = nlohmann::ordered_json::array();
    for (const auto& [name, t] : ckpt.tensors)
        descs.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
    header["tensors"] = std::move(descs);
    const std::string header_str = header.dump();

    std::string out;
    out.append(kCheckpointMagic, 4);
    put_u32_le(out, static_cast<std::uint32_t>(header_str.size()));
    out.append(header_str);
    for (const auto& [name, t] : ckpt.tensors)
        for (std::size_t i = 0; i < t.size(); ++i) put_f64_le(out, t[i]);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write checkpoint file " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("short write to checkpoint file " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open checkpoint file " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

    if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0)
        throw BadMagicError("checkpoint " + path.string() +
                            " does not start with magic TGA1");

    const std::uint32_t header_len = get_u32_le(p + 4);
    if (bytes.size() < 8 + static_cast<std::size_t>(header_len))
        throw TruncatedPayloadError("checkpoint " + path.string() +
                                    " is shorter than its declared header");

    nlohmann::ordered_json header;
    try {
        header = nlohmann::ordered_json::parse(bytes.substr(8, header_len));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint " + path.string() + " has an unparseable header: " +
                        e.what());
    }

    Checkpoint ckpt;
    ckpt.version = header.at("version").get<std::uint32_t>();
    if (ckpt.version != kCheckpointVersion)
        throw VersionMismatchError("checkpoint " + path.string() + " has format version " +
                                   std::to_string(ckpt.version) + ", expected " +
                                   std::to_string(kCheckpointVersion));
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.config_echo = header.value("config", nlohmann::ordered_json::object());

    std::size_t payload_doubles = 0;
    for (const auto& d : header.at("tensors"))
        payload_doubles += d.at("rows").get<std::size_t>() * d.at("cols").get<std::size_t>();
    const std::size_t expected = 8 + header_len + 8 * payload_doubles;
    if (bytes.size() != expected)
        throw TruncatedPayloadError(
            "checkpoint " + path.string() + " payload is " +
            std::to_string(bytes.size() - 8 - header_len) + " bytes, header declares " +
            std::to_string(8 * payload_doubles));

    std::size_t off = 8 + header_len;
    for (const auto& d : header.at("tensors")) {
        Tensor t(d.at("rows").get<std::size_t>(), d.at("cols").get<std::size_t>());
        for (std::size_t i = 0; i < t.size(); ++i, off += 8) t[i] = get_f64_le(p + off);
        ckpt.tensors.emplace_back(d.at("name").get<std::string>(), std::move(t));
    }
    return ckpt;
}

} // namespace tga
