#include <doctest.h>

#include <cmath>
#include <map>

#include "modecause/scm.hpp"
#include "modecause/util.hpp"

using namespace modecause;

namespace {

DiscreteSCM single_node(double p1) {
  ScmNode n;
  n.name = "X";
  n.levels = {0, 1};
  n.cpt = {{1.0 - p1, p1}};
  return DiscreteSCM({n});
}

}  // namespace

TEST_CASE("scm validation") {
  ScmNode n;
  n.name = "X";
  n.levels = {0, 1};
  n.cpt = {{0.6, 0.6}};
  CHECK_THROWS(DiscreteSCM({n}));  // row sum != 1
  n.cpt = {{0.5, 0.5}, {0.5, 0.5}};
  CHECK_THROWS(DiscreteSCM({n}));  // too many rows for a root
  n.cpt = {{0.5, 0.5}};
  n.parents = {"Y"};
  CHECK_THROWS(DiscreteSCM({n}));  // unknown parent

  ScmNode a;
  a.name = "A";
  a.levels = {0, 1};
  a.parents = {"B"};
  a.cpt = {{0.5, 0.5}, {0.5, 0.5}};
  ScmNode b = a;
  b.name = "B";
  b.parents = {"A"};
  CHECK_THROWS(DiscreteSCM({a, b}));  // cycle
}

TEST_CASE("sampling basics") {
  const auto scm = single_node(0.3);
  CHECK(sample(scm, 0, 1).n_rows() == 0);

  const auto sure = single_node(1.0);
  const auto rows = sample(sure, 50, 9);
  for (std::size_t r = 0; r < rows.n_rows(); ++r) CHECK(rows.cell(r, 0) == 1);
}

TEST_CASE("sample mean lands inside the binomial four-sigma band") {
  const auto scm = single_node(0.3);
  const auto data = sample(scm, 100000, 20240601);
  double mean = 0.0;
  for (std::size_t r = 0; r < data.n_rows(); ++r) mean += data.cell(r, 0);
  mean /= static_cast<double>(data.n_rows());
  CHECK(mean > 0.294);  // 0.3 +- 4 * sqrt(0.3*0.7/1e5) ~ 0.0058
  CHECK(mean < 0.306);
}

TEST_CASE("sampling is deterministic and prefix-stable per seed") {
  const auto scm = make_canonical_scm("chain");
  const auto a = sample(scm, 100, 77);
  const auto b = sample(scm, 100, 77);
  const auto prefix = sample(scm, 40, 77);
  for (std::size_t r = 0; r < 100; ++r)
    for (std::size_t c = 0; c < a.n_cols(); ++c) CHECK(a.cell(r, c) == b.cell(r, c));
  // per-row substreams: the shorter run reproduces the first rows
  for (std::size_t r = 0; r < 40; ++r)
    for (std::size_t c = 0; c < a.n_cols(); ++c) CHECK(a.cell(r, c) == prefix.cell(r, c));
}

TEST_CASE("exact joint of a single coin") {
  const auto joint = exact_joint(single_node(0.5));
  REQUIRE(joint.probs.size() == 2);
  CHECK(joint.probs[0] == doctest::Approx(0.5));
  CHECK(joint.probs[1] == doctest::Approx(0.5));
}

TEST_CASE("exact joint respects a deterministic edge") {
  ScmNode a;
  a.name = "A";
  a.levels = {0, 1};
  a.cpt = {{0.5, 0.5}};
  ScmNode b;
  b.name = "B";
  b.levels = {0, 1};
  b.parents = {"A"};
  b.cpt = {{1.0, 0.0}, {0.0, 1.0}};  // B = A
  const DiscreteSCM scm({a, b});
  const auto joint = exact_joint(scm);
  // order: A slowest, B fastest
  CHECK(joint.probs[0] == doctest::Approx(0.5));  // A=0,B=0
  CHECK(joint.probs[1] == doctest::Approx(0.0));  // A=0,B=1
  CHECK(joint.probs[2] == doctest::Approx(0.0));  // A=1,B=0
  CHECK(joint.probs[3] == doctest::Approx(0.5));  // A=1,B=1
}

TEST_CASE("exact joint sums to one and matches monte carlo on the chain") {
  const auto scm = make_canonical_scm("chain");
  const auto joint = exact_joint(scm);
  double total = 0.0;
  for (double p : joint.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  const std::size_t n = 1000000;
  const auto data = sample(scm, n, 4242);
  std::map<std::vector<int>, std::size_t> counts;
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = data.row(r);
    counts[std::vector<int>(row.begin(), row.end())]++;
  }
  std::vector<int> state;
  for (std::size_t s = 0; s < joint.n_states(); ++s) {
    joint.state_at(s, &state);
    const double expected = joint.probs[s];
    const double observed =
        static_cast<double>(counts[state]) / static_cast<double>(n);
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
    CHECK(std::fabs(observed - expected) <= 3.0 * sigma + 1e-12);
  }
}

TEST_CASE("true ate on a direct cause is the plain difference") {
  ScmNode t;
  t.name = "T";
  t.levels = {0, 1};
  t.cpt = {{0.5, 0.5}};
  ScmNode o;
  o.name = "O";
  o.levels = {0, 1};
  o.parents = {"T"};
  o.cpt = {{0.7, 0.3}, {0.2, 0.8}};  // P(O=1|T=0)=0.3, P(O=1|T=1)=0.8
  const DiscreteSCM scm({t, o});
  CHECK(true_ate(scm, "T", "O", 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(true_ate(scm, "T", "O", 1, 1) == 0.0);
  CHECK_THROWS(true_ate(scm, "T", "T", 1, 0));
  CHECK_THROWS(true_ate(scm, "T", "O", 5, 0));
}

TEST_CASE("no directed path means an ate of exactly zero") {
  const auto scm = make_canonical_scm("null");  // Z -> T, Z -> O
  CHECK(true_ate(scm, "T", "O", 1, 0) == 0.0);
  CHECK(true_ate(scm, "O", "T", 1, 0) == 0.0);
}

TEST_CASE("confounded triple ate matches the hand enumeration") {
  // Oracle, written out against the construction's CPTs:
  //   E[O | do(T=t)] = sum_z P(z) * P(O=1 | z, t)
  // with P(z)=0.5 and P(O=1|z,t) = 0.2 + 0.5 t + 0.2 z:
  //   do(T=1): 0.5*0.7 + 0.5*0.9 = 0.8
  //   do(T=0): 0.5*0.2 + 0.5*0.4 = 0.3
  const auto scm = make_canonical_scm("confounded");
  CHECK(true_ate(scm, "T", "O", 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  // The confounder keeps the observational contrast away from the ATE, so
  // correlation-style estimates must not match 0.5 (0.58 by enumeration).
  const auto joint = exact_joint(scm);
  const std::size_t ti = joint.index_of_var("T");
  const std::size_t oi = joint.index_of_var("O");
  double e1 = 0, p1 = 0, e0 = 0, p0 = 0;
  std::vector<int> state;
  for (std::size_t s = 0; s < joint.n_states(); ++s) {
    joint.state_at(s, &state);
    if (state[ti] == 1) {
      e1 += joint.probs[s] * state[oi];
      p1 += joint.probs[s];
    } else {
      e0 += joint.probs[s] * state[oi];
      p0 += joint.probs[s];
    }
  }
  CHECK(e1 / p1 - e0 / p0 == doctest::Approx(0.58).epsilon(1e-12));
}

TEST_CASE("survey presets have the documented structure") {
  for (const auto* name : {"northlike", "westlike", "southlike"}) {
    const auto scm = make_survey_scm(name);
    CHECK(scm.dag().graph().is_acyclic());
    CHECK(scm.dag().nodes().size() == 11);
  }
  const auto north = make_survey_scm("northlike");
  CHECK(north.dag().parents("Car") == std::set<std::string>{"hhveh_x", "distance_x"});
  CHECK(north.dag().parents("hhinc") == std::set<std::string>{"race_x", "hhsize_x", "age_x"});
  CHECK(north.dag().parents("hhveh_x") == std::set<std::string>{"hhsize_x"});
  const auto south = make_survey_scm("southlike");
  CHECK(south.dag().parents("Walk").count("race_x") == 1);
  const auto west = make_survey_scm("westlike");
  CHECK(west.dag().parents("distance_x").empty());
  CHECK_THROWS(make_survey_scm("eastlike"));
}

TEST_CASE("survey presets inject the documented effect directions") {
  const auto north = make_survey_scm("northlike");
  CHECK(true_ate(north, "hhveh_x", "Car", 1, 0) > 0.3);
  CHECK(true_ate(north, "hhveh_x", "Public", 1, 0) < -0.2);
  CHECK(true_ate(north, "distance_x", "Walk", 8, 1) < -0.3);
  CHECK(true_ate(north, "hhsize_x", "hhveh_x", 3, 1) > 0.0);
  CHECK(true_ate(north, "sex", "Car", 2, 1) == 0.0);
}

TEST_CASE("scm json round trip") {
  const auto scm = make_canonical_scm("confounded");
  const auto back = DiscreteSCM::from_json(scm.to_json());
  CHECK(back.to_json() == scm.to_json());
  CHECK(true_ate(back, "T", "O", 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact joint single-variable marginals match sampling at 4 sigma") {
  const auto scm = make_canonical_scm("diamond");
  const auto joint = exact_joint(scm);
  const std::size_t n = 100000;
  const auto data = sample(scm, n, 88);

  for (const auto& var : joint.vars) {
    const std::size_t vi = joint.index_of_var(var);
    std::map<int, double> marginal;
    std::vector<int> state;
    for (std::size_t s = 0; s < joint.n_states(); ++s) {
      joint.state_at(s, &state);
      marginal[state[vi]] += joint.probs[s];
    }
    const std::size_t col = data.column_index(var);
    for (const auto& [code, p] : marginal) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < n; ++r)
        if (data.cell(r, col) == code) ++hits;
      const double observed = static_cast<double>(hits) / static_cast<double>(n);
      const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
      CHECK(std::fabs(observed - p) <= 4.0 * sigma);
    }
  }
}

TEST_CASE("random scms keep cpt entries inside the clamp") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto scm = random_scm(4, 0.5, rng);
    for (const auto& node : scm.scm_nodes())
      for (const auto& row : node.cpt)
        for (double p : row) {
          CHECK(p >= 0.1 - 1e-12);
          CHECK(p <= 0.9 + 1e-12);
        }
  }
}

TEST_CASE("d-separation implies near-zero conditional mutual information") {
  Rng rng(3);
  const auto scm = faithful_random_scm(4, 0.5, 1e-4, rng);
  const auto joint = exact_joint(scm);
  const auto& names = scm.dag().nodes();
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      std::vector<std::string> rest;
      for (std::size_t k = 0; k < names.size(); ++k)
        if (k != a && k != b) rest.push_back(names[k]);
      for (std::size_t mask = 0; mask < (1u << rest.size()); ++mask) {
        std::set<std::string> z;
        for (std::size_t k = 0; k < rest.size(); ++k)
          if (mask & (1u << k)) z.insert(rest[k]);
        const double cmi = conditional_mutual_information(joint, names[a], names[b], z);
        if (d_separated(scm.dag(), {names[a]}, {names[b]}, z)) {
          CHECK(cmi < 1e-9);
        } else {
          CHECK(cmi > 1e-4);  // faithfulness screening guarantees separation
        }
      }
    }
  }
}
