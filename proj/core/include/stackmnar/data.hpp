// Rectangular dataset with a per-cell observed mask and per-column type
// metadata. The matrix is immutable after construction: every code path
// consults the mask, never the value stored in a missing cell.
#ifndef STACKMNAR_DATA_HPP
#define STACKMNAR_DATA_HPP

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace stackmnar {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class ColumnKind { continuous, binary };

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
};

class DataMatrix {
 public:
  // Validates shapes and that binary columns contain only {0,1} among
  // observed cells. Values stored in missing cells are kept verbatim as
  // sentinels and are never read by any estimator.
  DataMatrix(Eigen::MatrixXd values, Mask observed, std::vector<ColumnMeta> col_meta);

  int n() const { return static_cast<int>(values_.rows()); }
  int p() const { return static_cast<int>(values_.cols()); }

  const Eigen::MatrixXd& values() const { return values_; }
  const Mask& observed() const { return observed_; }
  const std::vector<ColumnMeta>& col_meta() const { return col_meta_; }

  double value(int i, int j) const { return values_(i, j); }
  bool is_observed(int i, int j) const { return observed_(i, j); }

  const std::string& column_name(int j) const { return col_meta_[static_cast<std::size_t>(j)].name; }
  ColumnKind column_kind(int j) const { return col_meta_[static_cast<std::size_t>(j)].kind; }

  // Index of a named column; throws if absent.
  int column_index(const std::string& name) const;

  int n_missing_in_column(int j) const;
  bool column_fully_observed(int j) const { return n_missing_in_column(j) == 0; }

 private:
  Eigen::MatrixXd values_;
  Mask observed_;
  std::vector<ColumnMeta> col_meta_;
};

// Column roles for MNAR-aware analysis: the possibly-MNAR target, the
// remaining incomplete columns (assumed MAR), and the fully observed block.
struct VariableRole {
  int target_mnar = 0;
  std::vector<int> mar_missing;
  std::vector<int> fully_observed;
};

// Reads a comma-delimited file with a header row. Cells equal to na_token
// become missing (mask false, value stored as NaN sentinel). Column kind is
// inferred as binary iff observed values are a subset of {0,1}; when
// binary_columns is supplied the inference is replaced outright: exactly the
// listed columns are binary, all others continuous.
DataMatrix load_csv(const std::string& path, const std::string& na_token = "NA",
                    const std::optional<std::set<std::string>>& binary_columns = std::nullopt);

// Inverse of load_csv; missing cells are written as na_token. Observed
// values round-trip exactly.
void save_csv(const DataMatrix& data, const std::string& path,
              const std::string& na_token = "NA");

// Checks that the three role sets partition the columns, that fully observed
// columns have complete data, and that the target column has at least one
// missing and one observed cell. Returns roles unchanged.
VariableRole validate_roles(const DataMatrix& data, const VariableRole& roles);

}  // namespace stackmnar

#endif
