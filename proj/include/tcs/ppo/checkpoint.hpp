#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcs/ppo/net.hpp"

namespace tcs::ppo {

inline constexpr char kCheckpointMagic[8] = {'T', 'C', 'S', 'C', 'K', 'P', 'T', '\n'};

// Policy checkpoint: a JSON header naming each tensor's shape and offset,
// followed by the flat little-endian float64 payload.
inline void save_checkpoint(Mlp net, const std::string& path,
                            const std::string& config_hash) {
    nlohmann::json header;
    header["format"] = "tcs-ckpt-v1";
    header["config_hash"] = config_hash;
    header["input_dim"] = net.input_dim;
    header["hidden_dim"] = net.hidden_dim;
    header["action_dim"] = net.action_dim;

    std::vector<double> payload;
    nlohmann::json tensors = nlohmann::json::array();
    net.for_each_tensor([&](const char* name, const std::vector<int>& shape,
                            std::vector<double>& data) {
        tensors.push_back({{"name", name},
                           {"shape", shape},
                           {"offset", payload.size()},
                           {"size", data.size()}});
        payload.insert(payload.end(), data.begin(), data.end());
    });
    tensors.push_back(
        {{"name", "bv"}, {"shape", std::vector<int>{1}}, {"offset", payload.size()}, {"size", 1}});
    payload.push_back(net.bv);
    header["tensors"] = tensors;

    const std::string header_str = header.dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    const std::uint32_t len = static_cast<std::uint32_t>(header_str.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(double)));
}

struct Checkpoint {
    Mlp net;
    std::string config_hash;
};

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("not a policy checkpoint: " + path);
    }
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string header_str(len, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(len));
    const nlohmann::json header = nlohmann::json::parse(header_str);

    Checkpoint ck;
    ck.config_hash = header.value("config_hash", "");
    ck.net = Mlp(header.at("input_dim").get<int>(), header.at("action_dim").get<int>(),
                 header.at("hidden_dim").get<int>());

    std::vector<double> payload;
    {
        std::vector<char> rest((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        payload.resize(rest.size() / sizeof(double));
        std::memcpy(payload.data(), rest.data(), payload.size() * sizeof(double));
    }

    auto read_tensor = [&header, &payload](const std::string& name, std::vector<double>& dst) {
        for (const auto& t : header.at("tensors")) {
            if (t.at("name").get<std::string>() == name) {
                const std::size_t offset = t.at("offset").get<std::size_t>();
                const std::size_t size = t.at("size").get<std::size_t>();
                if (size != dst.size() || offset + size > payload.size()) {
                    throw std::runtime_error("checkpoint tensor " + name +
                                             " has unexpected size");
                }
                std::copy(payload.begin() + static_cast<std::ptrdiff_t>(offset),
                          payload.begin() + static_cast<std::ptrdiff_t>(offset + size),
                          dst.begin());
                return;
            }
        }
        throw std::runtime_error("checkpoint tensor missing: " + name);
    };
    ck.net.for_each_tensor([&](const char* name, const std::vector<int>&,
                               std::vector<double>& data) { read_tensor(name, data); });
    std::vector<double> bv(1);
    read_tensor("bv", bv);
    ck.net.bv = bv[0];
    return ck;
}

}  // namespace tcs::ppo
