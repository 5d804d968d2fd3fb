#pragma once

#include <Eigen/Dense>

#include "cem/operator_algebra.hpp"

namespace cem {

// Computational basis convention: site m contributes bit (m-1) of the basis
// index, ground = 0, excited = 1 (site 1 is the least significant bit).

Eigen::Matrix2cd site_matrix(OpKind k);

// Dense 2^N x 2^N representation. Handle-tagged terms are scaled by
// handle_values[handle]; pass nullptr when the sum is handle-free.
Eigen::MatrixXcd to_matrix(const OperatorSum& s,
                           const std::vector<double>* handle_values = nullptr);

// Full state vector of a tensor product of single-site states.
Eigen::VectorXcd product_state_vector(const std::vector<Eigen::Vector2cd>& sites);

}  // namespace cem
