#include "stackmnar/stack.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "stackmnar/csv.hpp"

namespace stackmnar {

ImputedStack stack(const std::vector<CompletedDataset>& imputations,
                   const std::vector<ColumnMeta>& col_meta) {
  const int m = static_cast<int>(imputations.size());
  if (m < 2) throw std::invalid_argument("stacking needs at least 2 imputations");

  const auto& first = imputations.front();
  const int n = static_cast<int>(first.values.rows());
  const int p = static_cast<int>(first.values.cols());
  if (!first.source_mask) throw std::invalid_argument("completed dataset lacks a source mask");

  for (const auto& imp : imputations) {
    if (imp.values.rows() != n || imp.values.cols() != p) {
      throw std::invalid_argument("completed datasets have mismatched dimensions");
    }
    if (imp.source_mask.get() != first.source_mask.get() &&
        (!imp.source_mask || *imp.source_mask != *first.source_mask)) {
      throw std::invalid_argument("completed datasets have mismatched source masks");
    }
  }
  const Mask& mask = *first.source_mask;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      if (!mask(i, j)) continue;
      const double v = first.values(i, j);
      for (const auto& imp : imputations) {
        if (imp.values(i, j) != v) {
          throw std::invalid_argument("imputations disagree on an observed cell (row " +
                                      std::to_string(i + 1) + ", column " +
                                      std::to_string(j + 1) + ")");
        }
      }
    }
  }

  ImputedStack s;
  s.n = n;
  s.m = m;
  s.col_meta = col_meta;
  s.observed = mask;
  s.values.resize(static_cast<Eigen::Index>(n) * m, p);
  s.weight = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n) * m, 1.0 / m);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) {
      s.values.row(s.row_index(i, k)) = imputations[static_cast<std::size_t>(k)].values.row(i);
    }
  }
  return s;
}

ImputedStack stack(const std::vector<CompletedDataset>& imputations,
                   const DataMatrix& source) {
  return stack(imputations, source.col_meta());
}

void save_stack_csv(const ImputedStack& stack, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << "subject,imputation,weight";
  for (const auto& meta : stack.col_meta) out << ',' << meta.name;
  out << '\n';
  for (int i = 0; i < stack.n; ++i) {
    for (int k = 0; k < stack.m; ++k) {
      const int r = stack.row_index(i, k);
      out << (i + 1) << ',' << (k + 1) << ',' << csv::format_double(stack.weight[r]);
      for (int j = 0; j < static_cast<int>(stack.col_meta.size()); ++j) {
        out << ',' << csv::format_double(stack.values(r, j));
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

double max_weight_normalization_error(const ImputedStack& stack) {
  double worst = 0.0;
  for (int i = 0; i < stack.n; ++i) {
    double total = 0.0;
    for (int k = 0; k < stack.m; ++k) total += stack.weight[stack.row_index(i, k)];
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return worst;
}

}  // namespace stackmnar
