#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sfcqa/error.hpp"
#include "sfcqa/netmodel.hpp"

namespace sfcqa {

/// Fetches a mandatory member; missing keys or wrong types raise `kind`.
template <class T>
T json_get(const nlohmann::json& j, const char* key, ErrorKind kind) {
  if (!j.is_object() || !j.contains(key)) throw Error(kind, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(kind, std::string("field '") + key + "': " + e.what());
  }
}

/// Canonical text form: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path, ErrorKind parse_kind);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sfcqa

namespace sfcqa::netmodel {

nlohmann::json to_json(const NetworkState& state);
/// Throws Error(MalformedInput) on schema violations or a failing audit.
NetworkState state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TopologyConfig& config);
/// All fields are mandatory; throws Error(InvalidConfig).
TopologyConfig topology_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProfileTable& profiles);
ProfileTable profiles_from_json(const nlohmann::json& j, ErrorKind kind);

nlohmann::json to_json(const SfcCatalogEntry& entry);

}  // namespace sfcqa::netmodel
