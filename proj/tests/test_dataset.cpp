#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "modecause/dataset.hpp"
#include "modecause/rng.hpp"

using namespace modecause;

namespace {

Variable var(const std::string& name, VarKind kind, std::vector<Level> levels) {
  Variable v;
  v.name = name;
  v.kind = kind;
  v.levels = std::move(levels);
  return v;
}

std::shared_ptr<Codebook> two_binary_codebook() {
  std::vector<Variable> vars;
  vars.push_back(var("hhveh_x", VarKind::kBinary, {{0, "No vehicle"}, {1, "Have a vehicle"}}));
  vars.push_back(var("work_purp", VarKind::kBinary, {{0, "Non work related"}, {1, "Work related"}}));
  return std::make_shared<Codebook>(vars);
}

CodedDataset make_data(std::shared_ptr<Codebook> cb, std::vector<std::string> columns,
                       std::vector<int> cells) {
  return CodedDataset(std::move(cb), std::move(columns), std::move(cells));
}

}  // namespace

TEST_CASE("codebook rejects malformed variables") {
  CHECK_THROWS(Codebook({var("b", VarKind::kBinary, {{0, "a"}, {1, "b"}, {2, "c"}})}));
  CHECK_THROWS(Codebook({var("o", VarKind::kOrdinal, {{1, "a"}, {3, "b"}})}));  // gap
  CHECK_THROWS(Codebook({var("o", VarKind::kOrdinal, {{1, "a"}})}));            // one level
  CHECK_NOTHROW(Codebook({var("o", VarKind::kOrdinal, {{1, "a"}, {2, "b"}, {3, "c"}})}));
}

TEST_CASE("table1 codebook matches the survey dictionary") {
  const Codebook cb = table1_codebook();
  CHECK(cb.variables().size() == 11);
  CHECK(cb.variable("hhinc").levels.size() == 10);
  CHECK(cb.variable("hhinc").min_code() == 1);
  CHECK(cb.variable("race_x").levels[0].label == "White");
  CHECK(cb.variable("distance_x").levels.size() == 8);
  CHECK(cb.variable("sex").kind == VarKind::kBinary);
  CHECK(cb.variable("hhsize_x").levels[2].label == "2+ persons");
  CHECK(cb.variable("work_purp").invalid_labels.count("I don't know") == 1);
}

TEST_CASE("codebook json round trip") {
  const Codebook cb = table1_codebook();
  const Codebook back = Codebook::from_json(cb.to_json());
  CHECK(back.to_json() == cb.to_json());
}

TEST_CASE("load_csv decodes integer codes") {
  const auto data = parse_dataset_csv("hhveh_x,work_purp\n1,0\n", *two_binary_codebook());
  REQUIRE(data.n_rows() == 1);
  CHECK(data.cell(0, 0) == 1);
  CHECK(data.cell(0, 1) == 0);
}

TEST_CASE("load_csv decodes labels to codes") {
  std::vector<Variable> vars{var("race_x", VarKind::kBinary, {{0, "White"}, {1, "Non-white"}})};
  const auto data = parse_dataset_csv("race_x\nWhite\nNon-white\n", Codebook(vars));
  REQUIRE(data.n_rows() == 2);
  CHECK(data.cell(0, 0) == 0);
  CHECK(data.cell(1, 0) == 1);
}

TEST_CASE("load_csv errors name row, column and value") {
  try {
    parse_dataset_csv("hhveh_x,work_purp\n1,Maybe\n", *two_binary_codebook());
    FAIL("expected an error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("work_purp") != std::string::npos);
    CHECK(msg.find("Maybe") != std::string::npos);
    CHECK(msg.find("row 1") != std::string::npos);
  }
  CHECK_THROWS(parse_dataset_csv("hhveh_x\n1\n", *two_binary_codebook()));  // missing column
}

TEST_CASE("load_csv ignores extra columns and reorders to the codebook") {
  const auto data =
      parse_dataset_csv("extra,work_purp,hhveh_x\n9,1,0\n", *two_binary_codebook());
  CHECK(data.columns() == std::vector<std::string>{"hhveh_x", "work_purp"});
  CHECK(data.cell(0, 0) == 0);
  CHECK(data.cell(0, 1) == 1);
}

TEST_CASE("invalid survey responses map to the drop marker") {
  auto cb = two_binary_codebook();
  std::vector<Variable> vars = cb->variables();
  vars[1].invalid_labels.insert("I don't know");
  const auto data = parse_dataset_csv("hhveh_x,work_purp\n1,0\n0,I don't know\n1,1\n",
                                      Codebook(vars));
  REQUIRE(data.n_rows() == 3);
  CHECK(data.cell(1, 1) == kInvalidCode);

  const auto cleaned = clean(data);
  CHECK(cleaned.n_rows() == 2);
  CHECK(cleaned.cell(0, 0) == 1);
  CHECK(cleaned.cell(1, 1) == 1);
}

TEST_CASE("clean drops out-of-range codes and is idempotent") {
  auto cb = two_binary_codebook();
  const auto data = make_data(cb, {"hhveh_x", "work_purp"}, {1, 0, 7, 1, 0, 1});
  const auto once = clean(data);
  CHECK(once.n_rows() == 2);
  const auto twice = clean(once);
  CHECK(twice.n_rows() == once.n_rows());
  for (std::size_t r = 0; r < once.n_rows(); ++r)
    for (std::size_t c = 0; c < once.n_cols(); ++c) CHECK(once.cell(r, c) == twice.cell(r, c));
}

TEST_CASE("clean keeps valid data untouched and tolerates emptying") {
  auto cb = two_binary_codebook();
  const auto good = make_data(cb, {"hhveh_x", "work_purp"}, {1, 0, 0, 1});
  CHECK(clean(good).n_rows() == 2);
  const auto bad = make_data(cb, {"hhveh_x", "work_purp"}, {5, 0, 0, 9});
  CHECK(clean(bad).n_rows() == 0);
}

namespace {

CodedDataset class_data(std::size_t n0, std::size_t n1) {
  std::vector<Variable> vars;
  vars.push_back(var("f", VarKind::kOrdinal, {{0, "0"}, {1, "1"}, {2, "2"}, {3, "3"}, {4, "4"}}));
  vars.push_back(var("cls", VarKind::kBinary, {{0, "a"}, {1, "b"}}));
  auto cb = std::make_shared<Codebook>(vars);
  std::vector<int> cells;
  Rng rng(99);
  for (std::size_t i = 0; i < n0; ++i) {
    cells.push_back(static_cast<int>(rng.below(5)));
    cells.push_back(0);
  }
  for (std::size_t i = 0; i < n1; ++i) {
    cells.push_back(static_cast<int>(rng.below(5)));
    cells.push_back(1);
  }
  return CodedDataset(cb, {"f", "cls"}, cells);
}

}  // namespace

TEST_CASE("stratified split matches exact stratum arithmetic") {
  const auto data = class_data(60, 40);
  SplitSpec spec;
  spec.fractions = {{"train", 0.8}, {"test", 0.2}};
  spec.stratify_on = "cls";
  spec.seed = 5;
  const auto parts = stratified_split(data, spec);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].n_rows() == 80);
  CHECK(parts[1].n_rows() == 20);
  std::map<int, int> c0, c1;
  for (std::size_t r = 0; r < parts[0].n_rows(); ++r) c0[parts[0].cell(r, 1)]++;
  for (std::size_t r = 0; r < parts[1].n_rows(); ++r) c1[parts[1].cell(r, 1)]++;
  CHECK(c0[0] == 48);
  CHECK(c0[1] == 32);
  CHECK(c1[0] == 12);
  CHECK(c1[1] == 8);
}

TEST_CASE("single-fraction split is the identity") {
  const auto data = class_data(7, 3);
  SplitSpec spec;
  spec.fractions = {{"all", 1.0}};
  spec.stratify_on = "cls";
  spec.seed = 1;
  const auto parts = stratified_split(data, spec);
  REQUIRE(parts.size() == 1);
  REQUIRE(parts[0].n_rows() == data.n_rows());
  for (std::size_t r = 0; r < data.n_rows(); ++r)
    CHECK(parts[0].cell(r, 0) == data.cell(r, 0));
}

TEST_CASE("split is deterministic for a fixed seed") {
  const auto data = class_data(33, 21);
  SplitSpec spec;
  spec.fractions = {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}};
  spec.stratify_on = "cls";
  spec.seed = 1234;
  const auto p1 = stratified_split(data, spec);
  const auto p2 = stratified_split(data, spec);
  for (std::size_t k = 0; k < p1.size(); ++k) {
    REQUIRE(p1[k].n_rows() == p2[k].n_rows());
    for (std::size_t r = 0; r < p1[k].n_rows(); ++r)
      CHECK(p1[k].cell(r, 0) == p2[k].cell(r, 0));
  }
}

TEST_CASE("split parts partition the rows and honor the one-row tolerance") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = class_data(41 + seed, 28);
    SplitSpec spec;
    spec.fractions = {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}};
    spec.stratify_on = "cls";
    spec.seed = seed;
    const auto parts = stratified_split(data, spec);

    std::size_t total = 0;
    for (const auto& p : parts) total += p.n_rows();
    CHECK(total == data.n_rows());

    // Multiset of rows must be preserved: count (f, cls) pairs.
    std::map<std::pair<int, int>, int> want, got;
    for (std::size_t r = 0; r < data.n_rows(); ++r)
      want[{data.cell(r, 0), data.cell(r, 1)}]++;
    for (const auto& p : parts)
      for (std::size_t r = 0; r < p.n_rows(); ++r) got[{p.cell(r, 0), p.cell(r, 1)}]++;
    CHECK(want == got);

    // Per stratum, per part: within one row of the exact quota.
    for (int cls = 0; cls <= 1; ++cls) {
      std::size_t stratum = 0;
      for (std::size_t r = 0; r < data.n_rows(); ++r)
        if (data.cell(r, 1) == cls) ++stratum;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        std::size_t in_part = 0;
        for (std::size_t r = 0; r < parts[k].n_rows(); ++r)
          if (parts[k].cell(r, 1) == cls) ++in_part;
        const double quota = spec.fractions[k].second * static_cast<double>(stratum);
        CHECK(std::fabs(static_cast<double>(in_part) - quota) <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("split rejects strata smaller than the part count") {
  const auto data = class_data(10, 2);
  SplitSpec spec;
  spec.fractions = {{"a", 0.4}, {"b", 0.3}, {"c", 0.3}};
  spec.stratify_on = "cls";
  spec.seed = 0;
  CHECK_THROWS(stratified_split(data, spec));
}

TEST_CASE("split validates fractions") {
  const auto data = class_data(5, 5);
  SplitSpec spec;
  spec.stratify_on = "cls";
  spec.fractions = {{"a", 0.5}, {"b", 0.4}};
  CHECK_THROWS(stratified_split(data, spec));  // sums to 0.9
  spec.fractions = {{"a", 1.2}, {"b", -0.2}};
  CHECK_THROWS(stratified_split(data, spec));
}

TEST_CASE("smote leaves balanced data unchanged") {
  const auto data = class_data(12, 12);
  const auto out = smote(data, "cls", 3, 7);
  CHECK(out.n_rows() == data.n_rows());
}

TEST_CASE("smote balances 10/5 to 10/10 with minority labels") {
  const auto data = class_data(10, 5);
  const auto out = smote(data, "cls", 1, 42);
  CHECK(out.n_rows() == 20);
  std::map<int, int> counts;
  for (std::size_t r = 0; r < out.n_rows(); ++r) counts[out.cell(r, 1)]++;
  CHECK(counts[0] == 10);
  CHECK(counts[1] == 10);
  // input rows come first, untouched
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    CHECK(out.cell(r, 0) == data.cell(r, 0));
    CHECK(out.cell(r, 1) == data.cell(r, 1));
  }
}

TEST_CASE("smote interpolation stays on the donor-neighbor segment") {
  const auto data = class_data(40, 11);
  const auto result = smote_detailed(data, "cls", 3, 9);
  CHECK(result.synthetic.size() == 29);
  for (const auto& rec : result.synthetic) {
    REQUIRE(rec.interpolated.size() == 1);  // one feature column
    const double x = data.cell(rec.donor_row, 0);
    const double z = data.cell(rec.neighbor_row, 0);
    const double raw = rec.interpolated[0];
    CHECK(raw >= std::min(x, z) - 1e-12);
    CHECK(raw <= std::max(x, z) + 1e-12);
    CHECK(rec.u >= 0.0);
    CHECK(rec.u <= 1.0);
    CHECK(raw == doctest::Approx(x + rec.u * (z - x)));
    // rounded cell is a valid code
    CHECK(rec.rounded[0] >= 0);
    CHECK(rec.rounded[0] <= 4);
    CHECK(rec.rounded[1] == 1);  // minority label
  }
}

TEST_CASE("smote interpolation formula on a known pair") {
  // donor (2,4), neighbor (4,4), u = 0.5 -> midpoint (3,4) is a valid pair
  const double u = 0.5;
  const double f0 = 2.0 + u * (4.0 - 2.0);
  const double f1 = 4.0 + u * (4.0 - 4.0);
  CHECK(f0 == doctest::Approx(3.0));
  CHECK(f1 == doctest::Approx(4.0));
}

TEST_CASE("smote is deterministic per seed") {
  const auto data = class_data(25, 9);
  const auto a = smote(data, "cls", 2, 123);
  const auto b = smote(data, "cls", 2, 123);
  REQUIRE(a.n_rows() == b.n_rows());
  for (std::size_t r = 0; r < a.n_rows(); ++r)
    for (std::size_t c = 0; c < a.n_cols(); ++c) CHECK(a.cell(r, c) == b.cell(r, c));
}

TEST_CASE("smote rejects classes smaller than k+1") {
  const auto data = class_data(10, 3);
  CHECK_THROWS(smote(data, "cls", 3, 0));
  CHECK_NOTHROW(smote(data, "cls", 2, 0));
}

TEST_CASE("collapse folds one-hot mode columns into a single target") {
  std::vector<Variable> vars;
  vars.push_back(var("f", VarKind::kBinary, {{0, "n"}, {1, "y"}}));
  vars.push_back(var("Car", VarKind::kBinary, {{0, "No"}, {1, "Yes"}}));
  vars.push_back(var("Public", VarKind::kBinary, {{0, "No"}, {1, "Yes"}}));
  vars.push_back(var("Walk", VarKind::kBinary, {{0, "No"}, {1, "Yes"}}));
  auto cb = std::make_shared<Codebook>(vars);
  const CodedDataset data(cb, {"f", "Car", "Public", "Walk"},
                          {1, 1, 0, 0,    // Car
                           0, 0, 1, 0,    // Public
                           1, 0, 0, 1,    // Walk
                           0, 0, 0, 0,    // no mode -> dropped
                           1, 1, 1, 0});  // two modes -> first wins
  const auto out = collapse_binary_classes(data, {"Car", "Public", "Walk"}, "mode");
  REQUIRE(out.n_rows() == 4);
  CHECK(out.columns() == std::vector<std::string>{"f", "mode"});
  CHECK(out.cell(0, 1) == 0);
  CHECK(out.cell(1, 1) == 1);
  CHECK(out.cell(2, 1) == 2);
  CHECK(out.cell(3, 1) == 0);
  const Variable& target = out.column_variable(1);
  CHECK(target.levels[0].label == "Car");
  CHECK(target.levels[2].label == "Walk");
}
