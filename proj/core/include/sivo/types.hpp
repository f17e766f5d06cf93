#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace sivo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Formats a vector as "(a, b, c)" with round-trip precision.
std::string format_vector(const Vector& v);

}  // namespace sivo
