#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace dpshdg {

using Index = std::int32_t;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Point = Vec2;

using ScalarFn = std::function<double(const Point&)>;
using VectorFn = std::function<Vec2(const Point&)>;

}  // namespace dpshdg
