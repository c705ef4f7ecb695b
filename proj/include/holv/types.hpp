#pragma once

#include <Eigen/Dense>

#include <vector>

namespace holv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Vector ones(int n) { return Vector::Ones(n); }

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector from_std(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace holv
