#include <doctest.h>

#include <cmath>

#include "modecause/effects.hpp"
#include "modecause/rng.hpp"
#include "modecause/scm.hpp"

using namespace modecause;

TEST_CASE("dml config validation") {
  DmlConfig c;
  c.n_folds = 1;
  CHECK_THROWS(c.validate());
  c = DmlConfig{};
  c.gb_stages = 0;
  CHECK_THROWS(c.validate());
  c = DmlConfig{};
  c.gb_rate = 1.5;
  CHECK_THROWS(c.validate());
  CHECK_NOTHROW(DmlConfig{}.validate());
}

TEST_CASE("adjustment set is the treatment's parents") {
  MixedGraph g({"Z", "T", "O"});
  g.add_directed_edge("Z", "T");
  g.add_directed_edge("Z", "O");
  g.add_directed_edge("T", "O");
  CHECK(adjustment_set(g, "T", "O") == std::set<std::string>{"Z"});
  CHECK(adjustment_set(g, "Z", "O").empty());  // exogenous treatment

  MixedGraph h({"T", "O", "U"});
  h.add_directed_edge("T", "O");
  h.add_undirected_edge("T", "U");
  CHECK_THROWS(adjustment_set(h, "T", "O"));  // ambiguous parent set
  CHECK_THROWS(adjustment_set(h, "T", "T"));
}

TEST_CASE("northlike preset adjustment for vehicle ownership") {
  const auto scm = make_survey_scm("northlike");
  CHECK(adjustment_set(scm.dag().graph(), "hhveh_x", "Car") ==
        std::set<std::string>{"hhsize_x"});
}

TEST_CASE("gradient boosting reproduces a constant") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  Rng rng(4);
  for (int i = 0; i < 60; ++i) {
    x.push_back({static_cast<double>(rng.below(10))});
    y.push_back(3.25);
  }
  const auto model = gradient_boost_fit(x, y, DmlConfig{});
  for (const auto& row : x) CHECK(model.predict(row) == doctest::Approx(3.25));
  CHECK(model.predict({42.0}) == doctest::Approx(3.25));
}

TEST_CASE("gradient boosting drives training error down on a noiseless ramp") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 100; ++i) {
    x.push_back({static_cast<double>(i)});
    y.push_back(static_cast<double>(i));
  }
  const auto model = gradient_boost_fit(x, y, DmlConfig{});  // 100 stages, depth 3
  double sse = 0.0, sy = 0.0, my = 49.5;
  for (int i = 0; i < 100; ++i) {
    const double e = model.predict(x[static_cast<std::size_t>(i)]) - y[static_cast<std::size_t>(i)];
    sse += e * e;
    sy += (y[static_cast<std::size_t>(i)] - my) * (y[static_cast<std::size_t>(i)] - my);
  }
  CHECK(std::sqrt(sse / 100.0) < 0.1 * std::sqrt(sy / 100.0));
}

TEST_CASE("gradient boosting rejects empty input and bad config") {
  CHECK_THROWS(gradient_boost_fit({}, {}, DmlConfig{}));
  DmlConfig zero;
  zero.gb_stages = 0;
  CHECK_THROWS(gradient_boost_fit({{1.0}}, {1.0}, zero));
}

TEST_CASE("lasso with zero penalty is ordinary least squares") {
  Rng rng(9);
  std::vector<double> x, y;
  for (int i = 0; i < 500; ++i) {
    const double v = rng.gaussian();
    x.push_back(v);
    y.push_back(2.0 * v);
  }
  CHECK(lasso_fit(x, y, 0.0) == doctest::Approx(2.0).epsilon(1e-12));

  double xx = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] += 0.3 * rng.gaussian();
    xx += x[i] * x[i];
    xy += x[i] * y[i];
  }
  CHECK(lasso_fit(x, y, 0.0) == doctest::Approx(xy / xx).epsilon(1e-12));
}

TEST_CASE("huge penalty shrinks the slope to zero") {
  const std::vector<double> x{-1.0, 0.5, 1.0, 2.0};
  const std::vector<double> y{-2.0, 1.0, 2.0, 4.0};
  CHECK(lasso_fit(x, y, 1e6) == 0.0);
}

TEST_CASE("lasso slope stays near truth under noise") {
  Rng rng(123);
  std::vector<double> x, y;
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.gaussian();
    x.push_back(v);
    y.push_back(2.0 * v + rng.gaussian());
  }
  const double slope = lasso_fit(x, y, 1e-3);
  CHECK(slope > 1.9);
  CHECK(slope < 2.1);
}

TEST_CASE("lasso rejects constant x") {
  CHECK_THROWS(lasso_fit({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}, 0.0));
  CHECK_THROWS(lasso_fit({1.0}, {1.0}, 0.0));
}

TEST_CASE("dml with empty adjustment recovers a direct effect") {
  // O = 0.7 T + noise via a two-node SCM with P(O=1|T) = 0.15 + 0.7 T
  ScmNode t;
  t.name = "T";
  t.levels = {0, 1};
  t.cpt = {{0.5, 0.5}};
  ScmNode o;
  o.name = "O";
  o.levels = {0, 1};
  o.parents = {"T"};
  o.cpt = {{0.85, 0.15}, {0.15, 0.85}};
  const DiscreteSCM scm({t, o});

  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = sample(scm, 10000, seed);
    DmlConfig cfg;
    cfg.seed = seed;
    const double est = dml_ate(data, "T", "O", {}, cfg);
    if (std::fabs(est - 0.7) <= 0.05) ++hits;
  }
  CHECK(hits >= 9);
}

TEST_CASE("dml on independent treatment and outcome is near zero") {
  const auto scm = make_canonical_scm("indep");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = sample(scm, 10000, seed);
    DmlConfig cfg;
    cfg.seed = seed;
    CHECK(std::fabs(dml_ate(data, "A", "B", {}, cfg)) <= 0.05);
  }
}

TEST_CASE("dml removes confounding that the naive contrast keeps") {
  const auto scm = make_canonical_scm("confounded");
  const double truth = true_ate(scm, "T", "O", 1, 0);  // 0.5 by enumeration
  int hits = 0;
  double naive_bias = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = sample(scm, 10000, seed);
    DmlConfig cfg;
    cfg.seed = seed;
    const double est = dml_ate(data, "T", "O", {"Z"}, cfg);
    if (std::fabs(est - truth) <= 0.05) ++hits;
    naive_bias += dml_ate(data, "T", "O", {}, cfg) - truth;  // unadjusted
  }
  CHECK(hits >= 9);
  CHECK(naive_bias / 10.0 > 0.05);  // unadjusted contrast overshoots (0.58 vs 0.50)
}

TEST_CASE("dml is deterministic per seed and rejects degenerate input") {
  const auto data = sample(make_canonical_scm("confounded"), 2000, 7);
  DmlConfig cfg;
  cfg.seed = 11;
  CHECK(dml_ate(data, "T", "O", {"Z"}, cfg) == dml_ate(data, "T", "O", {"Z"}, cfg));
  CHECK_THROWS(dml_ate(data, "T", "O", {"T"}, cfg));  // treatment inside z

  const auto tiny = sample(make_canonical_scm("confounded"), 15, 1);
  CHECK_THROWS(dml_ate(tiny, "T", "O", {}, cfg));  // below 10 rows per fold

  // constant treatment
  ScmNode c;
  c.name = "T";
  c.levels = {0, 1};
  c.cpt = {{0.0, 1.0}};
  ScmNode o;
  o.name = "O";
  o.levels = {0, 1};
  o.cpt = {{0.5, 0.5}};
  const auto const_data = sample(DiscreteSCM({c, o}), 200, 3);
  CHECK_THROWS(dml_ate(const_data, "T", "O", {}, cfg));
}

TEST_CASE("dml error shrinks as the sample grows") {
  const auto scm = make_canonical_scm("confounded");
  const double truth = true_ate(scm, "T", "O", 1, 0);
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DmlConfig cfg;
    cfg.seed = seed;
    const double err_small =
        std::fabs(dml_ate(sample(scm, 2500, 7000 + seed), "T", "O", {"Z"}, cfg) - truth);
    const double err_large =
        std::fabs(dml_ate(sample(scm, 40000, 8000 + seed), "T", "O", {"Z"}, cfg) - truth);
    if (err_large <= err_small) ++improved;
  }
  CHECK(improved >= 8);
}

TEST_CASE("effects table keeps structural zeros exact") {
  const auto scm = make_survey_scm("northlike");
  const auto data = sample(scm, 2000, 21);
  DmlConfig cfg;
  cfg.seed = 5;
  const auto table = total_effects_table(scm.dag().graph(), data, cfg);

  // sex has no outgoing edges anywhere: a row of hard zeros
  for (const auto& effect : table.variables) {
    if (effect == "sex") continue;
    CHECK(table.at("sex", effect) == 0.0);
  }
  // modes are sinks: their rows are all zero too
  for (const auto& effect : table.variables) {
    if (effect == "Car") continue;
    CHECK(table.at("Car", effect) == 0.0);
  }
  // a pair with a path got an estimate
  CHECK(table.at("hhveh_x", "Car") != 0.0);
}

TEST_CASE("two-node effect matches the interventional oracle") {
  ScmNode t;
  t.name = "T";
  t.levels = {0, 1};
  t.cpt = {{0.5, 0.5}};
  ScmNode o;
  o.name = "O";
  o.levels = {0, 1};
  o.parents = {"T"};
  o.cpt = {{0.8, 0.2}, {0.35, 0.65}};
  const DiscreteSCM scm({t, o});
  const double truth = true_ate(scm, "T", "O", 1, 0);  // 0.45
  const auto data = sample(scm, 10000, 13);
  DmlConfig cfg;
  cfg.seed = 13;
  const auto table = total_effects_table(scm.dag().graph(), data, cfg);
  CHECK(std::fabs(table.at("T", "O") - truth) <= 0.05);
  CHECK(table.at("O", "T") == 0.0);
}

TEST_CASE("effects table export formats") {
  EffectsTable t;
  t.variables = {"a", "b"};
  t.values = {{0.0, 0.41237}, {0.0, 0.0}};
  t.has_path = {{false, true}, {false, false}};
  const std::string two = t.to_csv(2);
  CHECK(two.find("cause,a,b\n") == 0);
  CHECK(two.find("a,-,0.41\n") != std::string::npos);
  CHECK(two.find("b,0.00,-\n") != std::string::npos);
  const std::string full = t.to_csv(-1);
  CHECK(full.find("0.41237") != std::string::npos);
}

TEST_CASE("effects table propagates the undirected-edge error") {
  MixedGraph g({"T", "O", "U"});
  g.add_directed_edge("T", "O");
  g.add_undirected_edge("T", "U");
  const auto data = sample(make_canonical_scm("chain"), 1000, 1)
                        .select_columns({"A", "B", "C"});
  // rename columns to match the graph via a fresh dataset
  std::vector<Variable> vars;
  for (const auto& n : {"T", "O", "U"}) {
    Variable v;
    v.name = n;
    v.kind = VarKind::kBinary;
    v.levels = {{0, "0"}, {1, "1"}};
    vars.push_back(v);
  }
  std::vector<int> cells;
  for (std::size_t r = 0; r < data.n_rows(); ++r)
    for (std::size_t c = 0; c < 3; ++c) cells.push_back(data.cell(r, c));
  const CodedDataset renamed(std::make_shared<Codebook>(vars), {"T", "O", "U"}, cells);
  DmlConfig cfg;
  CHECK_THROWS(total_effects_table(g, renamed, cfg));
}
