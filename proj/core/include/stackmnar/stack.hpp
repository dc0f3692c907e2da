// Stacked completed datasets: M rows per subject, each carrying a weight.
// Rows are subject-major, so subject i owns the contiguous block
// [i*M, (i+1)*M).
#ifndef STACKMNAR_STACK_HPP
#define STACKMNAR_STACK_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stackmnar/data.hpp"
#include "stackmnar/mice.hpp"

namespace stackmnar {

struct ImputedStack {
  Eigen::MatrixXd values;   // (n*M) x p
  Eigen::VectorXd weight;   // n*M, sums to 1 within each subject
  Mask observed;            // n x p source mask
  std::vector<ColumnMeta> col_meta;
  int n = 0;                // subjects
  int m = 0;                // imputations

  int rows() const { return n * m; }
  int row_index(int subject, int imputation) const { return subject * m + imputation; }
  int subject_of_row(int row) const { return row / m; }
  int imputation_of_row(int row) const { return row % m; }
};

// Stacks M completed datasets and initializes every weight to 1/M.
// Throws on M < 2, dimension mismatch, or imputations disagreeing on any
// observed cell.
ImputedStack stack(const std::vector<CompletedDataset>& imputations,
                   const std::vector<ColumnMeta>& col_meta);

// Convenience: takes column metadata from the source data.
ImputedStack stack(const std::vector<CompletedDataset>& imputations,
                   const DataMatrix& source);

// Columns: subject, imputation (both 1-based), weight, then the variables.
void save_stack_csv(const ImputedStack& stack, const std::string& path);

// Largest |sum of subject weights - 1| over subjects; used by invariant checks.
double max_weight_normalization_error(const ImputedStack& stack);

}  // namespace stackmnar

#endif
