#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "lathop/hopping_model.hpp"

namespace lathop {

inline constexpr int kModelFormatVersion = 1;

/// {version, dim, extents, spacing, kernel: [{offset, re, im}],
///  zfield: [{site, offset, re, im}], onsite: [{site, im}], provenance?}
/// Sites and offsets are coordinate arrays of length dim. Doubles are written
/// in shortest round-trip form, so reading back is bit-exact.
nlohmann::json model_to_json(const HoppingModel& mdl,
                             const nlohmann::json& provenance = nullptr);

/// Strict: unknown keys, missing fields, or malformed entries throw InputError.
HoppingModel model_from_json(const nlohmann::json& j);

HoppingModel read_model_file(const std::string& path);
void write_model_file(const std::string& path, const HoppingModel& mdl,
                      const nlohmann::json& provenance = nullptr);

nlohmann::json parse_json_text(const std::string& text);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Throws InputError naming the first key of `j` not in `allowed`.
void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& where);

}  // namespace lathop
