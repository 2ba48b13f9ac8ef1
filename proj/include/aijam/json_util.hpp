#pragma once

#include "aijam/types.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace aijam {

using Json = nlohmann::json;

// Throws ConfigError naming the first key not in `allowed`.
void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where);

Json matrix_to_json(const MatX& m);
MatX matrix_from_json(const Json& j, int rows, int cols, const std::string& what);
Json vec4_to_json(const Vec4& v);
Vec4 vec4_from_json(const Json& j, const std::string& what);
Mat4 mat4_from_json(const Json& j, const std::string& what);

}  // namespace aijam
