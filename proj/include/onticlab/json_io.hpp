#pragma once

#include <string>

#include <json.hpp>

#include "onticlab/numerics.hpp"

namespace onticlab {

// Wire encoding shared by every file format in the toolkit:
// complex as [re, im], vector as [[re,im], ...], matrix as an array of
// row arrays of [re, im].
nlohmann::json to_json(const Complex& z);
nlohmann::json to_json(const CVector& v);
nlohmann::json to_json(const CMatrix& m);

// `path` prefixes error messages so a validation failure points into the
// offending document location.
Complex complex_from_json(const nlohmann::json& j, const std::string& path);
CVector cvector_from_json(const nlohmann::json& j, const std::string& path);
CMatrix cmatrix_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json load_json_file(const std::string& filename);
void save_json_file(const std::string& filename, const nlohmann::json& j);

} // namespace onticlab
