#pragma once

// Data-parallel inner loops. Every kernel has a serial reference with the
// same signature; the OpenMP variant must produce identical output.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace assist {

struct IntentModel;

namespace kernels {

/// out(i, j) = dot(a.col(i), b.col(j)) for column-stacked unit vectors.
Eigen::MatrixXd cosine_matrix_serial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::MatrixXd cosine_matrix_omp(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Transactions and candidates are sorted item-id lists. Returns, per
/// candidate, how many transactions contain all of its items.
std::vector<std::int64_t> itemset_support_serial(
    std::span<const std::vector<std::int32_t>> transactions,
    std::span<const std::vector<std::int32_t>> candidates);
std::vector<std::int64_t> itemset_support_omp(
    std::span<const std::vector<std::int32_t>> transactions,
    std::span<const std::vector<std::int32_t>> candidates);

/// Class probabilities for a batch of encoded inputs.
std::vector<Eigen::VectorXd> intent_forward_serial(const IntentModel& model,
                                                   std::span<const std::vector<std::int32_t>> inputs);
std::vector<Eigen::VectorXd> intent_forward_omp(const IntentModel& model,
                                                std::span<const std::vector<std::int32_t>> inputs);

int max_threads();

}  // namespace kernels
}  // namespace assist
