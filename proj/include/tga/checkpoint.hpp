#pragma once

#include "tga/params.hpp"
#include "tga/tensor.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace tga {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[4] = {'T', 'G', 'A', '1'};

// On-disk layout: magic "TGA1", little-endian u32 header length, UTF-8 JSON
// header (version, seed, config echo, ordered tensor descriptors), then the
// tensor payloads as contiguous little-endian f64 in header order.
struct Checkpoint {
    std::uint32_t version = kCheckpointVersion;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config_echo = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, Tensor>> tensors;

    static Checkpoint from_params(const ParamSet& params, std::uint64_t seed,
                                  nlohmann::ordered_json config_echo);

    const Tensor* find(const std::string& name) const;
    bool has(const std::string& name) const { return find(name) != nullptr; }
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// Throws BadMagicError / VersionMismatchError / TruncatedPayloadError.
Checkpoint load_checkpoint(const std::filesystem::path& path);

bool operator==(const Checkpoint& a, const Checkpoint& b);

} // namespace tga
