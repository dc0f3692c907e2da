#include "stackmnar/data.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "stackmnar/csv.hpp"

namespace stackmnar {

DataMatrix::DataMatrix(Eigen::MatrixXd values, Mask observed,
                       std::vector<ColumnMeta> col_meta)
    : values_(std::move(values)),
      observed_(std::move(observed)),
      col_meta_(std::move(col_meta)) {
  if (observed_.rows() != values_.rows() || observed_.cols() != values_.cols()) {
    throw std::invalid_argument("observed mask shape does not match values");
  }
  if (static_cast<Eigen::Index>(col_meta_.size()) != values_.cols()) {
    throw std::invalid_argument("column metadata count does not match values");
  }
  for (int j = 0; j < p(); ++j) {
    if (col_meta_[static_cast<std::size_t>(j)].kind != ColumnKind::binary) continue;
    for (int i = 0; i < n(); ++i) {
      if (!observed_(i, j)) continue;
      const double v = values_(i, j);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("binary column '" + column_name(j) +
                                    "' has observed value " + csv::format_double(v) +
                                    " at row " + std::to_string(i + 1));
      }
    }
  }
}

int DataMatrix::column_index(const std::string& name) const {
  for (int j = 0; j < p(); ++j) {
    if (col_meta_[static_cast<std::size_t>(j)].name == name) return j;
  }
  throw std::invalid_argument("no column named '" + name + "'");
}

int DataMatrix::n_missing_in_column(int j) const {
  int count = 0;
  for (int i = 0; i < n(); ++i) {
    if (!observed_(i, j)) ++count;
  }
  return count;
}

DataMatrix load_csv(const std::string& path, const std::string& na_token,
                    const std::optional<std::set<std::string>>& binary_columns) {
  const csv::Table t = csv::read_file(path);
  const int p = static_cast<int>(t.columns.size());
  const int n = static_cast<int>(t.rows.size());

  Eigen::MatrixXd values(n, p);
  Mask observed(n, p);
  for (int i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < p; ++j) {
      const std::string& cell = row[static_cast<std::size_t>(j)];
      if (cell == na_token) {
        observed(i, j) = false;
        values(i, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        observed(i, j) = true;
        values(i, j) = csv::parse_double(cell, i + 1, t.columns[static_cast<std::size_t>(j)]);
      }
    }
  }

  std::vector<ColumnMeta> meta(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    meta[static_cast<std::size_t>(j)].name = t.columns[static_cast<std::size_t>(j)];
    if (binary_columns.has_value()) {
      meta[static_cast<std::size_t>(j)].kind =
          binary_columns->count(t.columns[static_cast<std::size_t>(j)]) > 0
              ? ColumnKind::binary
              : ColumnKind::continuous;
    } else {
      bool all_01 = true;
      bool any_observed = false;
      for (int i = 0; i < n; ++i) {
        if (!observed(i, j)) continue;
        any_observed = true;
        if (values(i, j) != 0.0 && values(i, j) != 1.0) {
          all_01 = false;
          break;
        }
      }
      meta[static_cast<std::size_t>(j)].kind =
          (any_observed && all_01) ? ColumnKind::binary : ColumnKind::continuous;
    }
  }
  return DataMatrix(std::move(values), std::move(observed), std::move(meta));
}

void save_csv(const DataMatrix& data, const std::string& path,
              const std::string& na_token) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  for (int j = 0; j < data.p(); ++j) {
    if (j) out << ',';
    out << data.column_name(j);
  }
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) {
      if (j) out << ',';
      if (data.is_observed(i, j)) {
        out << csv::format_double(data.value(i, j));
      } else {
        out << na_token;
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

VariableRole validate_roles(const DataMatrix& data, const VariableRole& roles) {
  const int p = data.p();
  std::vector<int> role_count(static_cast<std::size_t>(p), 0);
  auto mark = [&](int j, const char* role) {
    if (j < 0 || j >= p) {
      throw std::invalid_argument(std::string(role) + " column index " +
                                  std::to_string(j) + " out of range");
    }
    ++role_count[static_cast<std::size_t>(j)];
  };
  mark(roles.target_mnar, "target");
  for (int j : roles.mar_missing) mark(j, "mar");
  for (int j : roles.fully_observed) mark(j, "observed");
  for (int j = 0; j < p; ++j) {
    if (role_count[static_cast<std::size_t>(j)] != 1) {
      throw std::invalid_argument("column '" + data.column_name(j) +
                                  "' must appear in exactly one role (found " +
                                  std::to_string(role_count[static_cast<std::size_t>(j)]) + ")");
    }
  }
  for (int j : roles.fully_observed) {
    const int miss = data.n_missing_in_column(j);
    if (miss > 0) {
      throw std::invalid_argument("column '" + data.column_name(j) +
                                  "' is declared fully observed but has " +
                                  std::to_string(miss) + " missing cells");
    }
  }
  const int target_missing = data.n_missing_in_column(roles.target_mnar);
  if (target_missing == 0) {
    throw std::invalid_argument("target column '" + data.column_name(roles.target_mnar) +
                                "' has no missing cells; MNAR correction is degenerate");
  }
  if (target_missing == data.n()) {
    throw std::invalid_argument("target column '" + data.column_name(roles.target_mnar) +
                                "' has no observed cells; model is inestimable");
  }
  return roles;
}

}  // namespace stackmnar
