#include "assist/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "assist/intent_cnn.hpp"

namespace assist::kernels {

namespace {

bool contains_all(const std::vector<std::int32_t>& transaction,
                  const std::vector<std::int32_t>& items) {
  return std::includes(transaction.begin(), transaction.end(), items.begin(), items.end());
}

double dot(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) s += a(k, i) * b(k, j);
  return s;
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

Eigen::MatrixXd cosine_matrix_serial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) out(i, j) = dot(a, i, b, j);
  return out;
}

Eigen::MatrixXd cosine_matrix_omp(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.cols(), b.cols());
  const auto rows = static_cast<long>(a.cols());
  const auto cols = static_cast<long>(b.cols());
#pragma omp parallel for collapse(2) schedule(static)
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) out(i, j) = dot(a, i, b, j);
  return out;
}

std::vector<std::int64_t> itemset_support_serial(
    std::span<const std::vector<std::int32_t>> transactions,
    std::span<const std::vector<std::int32_t>> candidates) {
  std::vector<std::int64_t> counts(candidates.size(), 0);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (const auto& t : transactions) counts[c] += contains_all(t, candidates[c]);
  return counts;
}

std::vector<std::int64_t> itemset_support_omp(
    std::span<const std::vector<std::int32_t>> transactions,
    std::span<const std::vector<std::int32_t>> candidates) {
  std::vector<std::int64_t> counts(candidates.size(), 0);
  const auto n = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long c = 0; c < n; ++c) {
    std::int64_t k = 0;
    for (const auto& t : transactions) k += contains_all(t, candidates[c]);
    counts[c] = k;
  }
  return counts;
}

std::vector<Eigen::VectorXd> intent_forward_serial(const IntentModel& model,
                                                   std::span<const std::vector<std::int32_t>> inputs) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(forward(model, in));
  return out;
}

std::vector<Eigen::VectorXd> intent_forward_omp(const IntentModel& model,
                                                std::span<const std::vector<std::int32_t>> inputs) {
  std::vector<Eigen::VectorXd> out(inputs.size());
  const auto n = static_cast<long>(inputs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) out[i] = forward(model, inputs[i]);
  return out;
}

}  // namespace assist::kernels
