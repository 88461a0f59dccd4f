#ifndef EOSQ_IO_MANIFEST_HPP
#define EOSQ_IO_MANIFEST_HPP

#include <openssl/evp.h>

#include <Eigen/Core>
#include <cstdio>
#include <json.hpp>
#include <string>

#include "files.hpp"

#ifndef EOSQ_VERSION
#define EOSQ_VERSION "0.1.0"
#endif

namespace eosq::io {

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) throw IoError("sha256 failed");
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

inline nlohmann::json versions() {
  return {{"eosq", EOSQ_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

inline std::string manifest(const std::string& command, const nlohmann::json& resolved_config, std::uint64_t seed,
                            const FileSet& files) {
  nlohmann::json m;
  m["command"] = command;
  m["config_hash"] = sha256_hex(resolved_config.dump());
  m["config"] = resolved_config;
  m["seed"] = seed;
  m["versions"] = versions();
  nlohmann::json f = nlohmann::json::object();
  for (const auto& [name, body] : files) f[name] = sha256_hex(body);
  m["outputs"] = f;
  return m.dump(2) + "\n";
}

}  // namespace eosq::io

#endif
