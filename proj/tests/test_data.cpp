#include <doctest.h>

#include "test_util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "stackmnar/data.hpp"

using namespace stackmnar;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  out.close();
  return path.string();
}

}  // namespace

TEST_CASE("load_csv builds the mask from the NA token") {
  const auto path = write_temp("dm_basic.csv", "a,b\n1,2\n3,NA\n5,6\n");
  DataMatrix d = load_csv(path);
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  int missing = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) missing += d.is_observed(i, j) ? 0 : 1;
  CHECK(missing == 1);
  CHECK_FALSE(d.is_observed(1, 1));
  CHECK(d.value(2, 1) == 6.0);
}

TEST_CASE("column of 0/1 values is inferred binary") {
  const auto path = write_temp("dm_binary.csv", "x,y\n0,1.5\n1,2.5\n1,0.5\n0,3.5\n");
  DataMatrix d = load_csv(path);
  CHECK(d.column_kind(0) == ColumnKind::binary);
  CHECK(d.column_kind(1) == ColumnKind::continuous);
}

TEST_CASE("binary inference is overridable per column") {
  const auto path = write_temp("dm_override.csv", "x,y\n0,1\n1,0\n1,1\n");
  DataMatrix d = load_csv(path, "NA", std::set<std::string>{"y"});
  CHECK(d.column_kind(0) == ColumnKind::continuous);  // 0/1 but not listed
  CHECK(d.column_kind(1) == ColumnKind::binary);
}

TEST_CASE("text in a data cell raises a parse error naming the cell") {
  const auto path = write_temp("dm_text.csv", "a,b\n1,2\nabc,4\n");
  CHECK(testutil::contains(testutil::error_message([&] { load_csv(path); }), "row 2"));
  try {
    load_csv(path);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    CHECK(std::string(e.what()).find("abc") != std::string::npos);
  }
}

TEST_CASE("ragged rows and duplicate column names are rejected") {
  const auto ragged = write_temp("dm_ragged.csv", "a,b\n1,2\n3\n");
  CHECK(testutil::contains(testutil::error_message([&] { load_csv(ragged); }), "ragged"));
  const auto dup = write_temp("dm_dup.csv", "a,a\n1,2\n");
  CHECK(testutil::contains(testutil::error_message([&] { load_csv(dup); }), "duplicate"));
}

TEST_CASE("binary column with an out-of-range observed value is rejected") {
  Eigen::MatrixXd v(2, 1);
  v << 0.0, 2.0;
  Mask m = Mask::Constant(2, 1, true);
  CHECK_THROWS_AS(DataMatrix(v, m, {{"x", ColumnKind::binary}}), std::invalid_argument);
  // The same value hidden behind the mask is fine: sentinels are never read.
  m(1, 0) = false;
  CHECK_NOTHROW(DataMatrix(v, m, {{"x", ColumnKind::binary}}));
}

TEST_CASE("csv round trip reproduces values, mask, and metadata exactly") {
  Eigen::MatrixXd v(3, 2);
  v << 0.1, 1.0, -3.7182818284590452, 0.0, 1e-17, 12345678.901234567;
  Mask m = Mask::Constant(3, 2, true);
  m(2, 0) = false;
  std::vector<ColumnMeta> meta{{"u", ColumnKind::continuous}, {"v", ColumnKind::binary}};
  // v column only carries 0/1 among observed cells.
  v(0, 1) = 1.0;
  v(1, 1) = 0.0;
  v(2, 1) = 1.0;
  DataMatrix d(v, m, meta);

  const auto path = (std::filesystem::temp_directory_path() / "dm_roundtrip.csv").string();
  save_csv(d, path);
  DataMatrix back = load_csv(path, "NA", std::set<std::string>{"v"});

  CHECK(back.n() == d.n());
  CHECK(back.p() == d.p());
  for (int i = 0; i < d.n(); ++i) {
    for (int j = 0; j < d.p(); ++j) {
      CHECK(back.is_observed(i, j) == d.is_observed(i, j));
      if (d.is_observed(i, j)) CHECK(back.value(i, j) == d.value(i, j));
    }
  }
  for (int j = 0; j < d.p(); ++j) {
    CHECK(back.column_name(j) == d.column_name(j));
    CHECK(back.column_kind(j) == d.column_kind(j));
  }
}

TEST_CASE("validate_roles accepts a clean partition") {
  Eigen::MatrixXd v(4, 3);
  v.setZero();
  Mask m = Mask::Constant(4, 3, true);
  m(0, 0) = false;  // target has one missing cell
  DataMatrix d(v, m,
               {{"t", ColumnKind::continuous},
                {"z", ColumnKind::continuous},
                {"w", ColumnKind::continuous}});
  VariableRole roles;
  roles.target_mnar = 0;
  roles.mar_missing = {1};
  roles.fully_observed = {2};
  CHECK_NOTHROW(validate_roles(d, roles));
}

TEST_CASE("fully observed role with a missing cell is rejected by name") {
  Eigen::MatrixXd v(3, 2);
  v.setZero();
  Mask m = Mask::Constant(3, 2, true);
  m(0, 0) = false;
  m(1, 1) = false;  // the "fully observed" column has a hole
  DataMatrix d(v, m, {{"t", ColumnKind::continuous}, {"w", ColumnKind::continuous}});
  VariableRole roles;
  roles.target_mnar = 0;
  roles.fully_observed = {1};
  CHECK(testutil::contains(testutil::error_message([&] { validate_roles(d, roles); }), "'w'"));
}

TEST_CASE("degenerate target columns are rejected") {
  Eigen::MatrixXd v(3, 2);
  v.setZero();
  VariableRole roles;
  roles.target_mnar = 0;
  roles.fully_observed = {1};

  Mask all_observed = Mask::Constant(3, 2, true);
  DataMatrix complete(v, all_observed,
                      {{"t", ColumnKind::continuous}, {"w", ColumnKind::continuous}});
  CHECK(testutil::contains(testutil::error_message([&] { validate_roles(complete, roles); }), "degenerate"));

  Mask none = all_observed;
  none.col(0).setConstant(false);
  DataMatrix empty_target(v, none,
                          {{"t", ColumnKind::continuous}, {"w", ColumnKind::continuous}});
  CHECK(testutil::contains(testutil::error_message([&] { validate_roles(empty_target, roles); }), "inestimable"));
}

TEST_CASE("roles must partition the columns") {
  Eigen::MatrixXd v(3, 2);
  v.setZero();
  Mask m = Mask::Constant(3, 2, true);
  m(0, 0) = false;
  DataMatrix d(v, m, {{"t", ColumnKind::continuous}, {"w", ColumnKind::continuous}});
  VariableRole roles;
  roles.target_mnar = 0;
  roles.mar_missing = {0};  // target listed twice
  roles.fully_observed = {1};
  CHECK_THROWS_AS(validate_roles(d, roles), std::invalid_argument);
}
