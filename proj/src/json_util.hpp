#pragma once

#include "plabs/linalg.hpp"

#include <json.hpp>

namespace plabs::detail {

using Json = nlohmann::ordered_json;

inline Json to_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Json to_json(const Matrix& M) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(to_json(Vector(M.row(i).transpose())));
    return a;
}

} // namespace plabs::detail
