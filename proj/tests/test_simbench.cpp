#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ddt/errors.hpp"
#include "ddt/simbench.hpp"

using namespace ddt;
using namespace ddt::sim;

TEST_CASE("confusion counts and scores") {
  ConfusionCounts c;
  c.tp = 2;
  c.fp = 1;
  c.fn = 1;
  c.tn = 31;
  CHECK(mcc(c) == doctest::Approx(61.0 / 96.0).epsilon(1e-14));

  std::vector<std::uint8_t> truth(35, 0);
  truth[0] = truth[1] = truth[2] = 1;
  const Scores perfect = score(truth, truth);
  CHECK(perfect.mcc == 1.0);
  CHECK(perfect.tpr == 1.0);
  CHECK(perfect.tpr_paper_convention == doctest::Approx(3.0 / 35.0));
  CHECK(perfect.fpr == 0.0);

  const std::vector<std::uint8_t> none(35, 0);
  CHECK(score(none, truth).mcc == 0.0);
  CHECK_THROWS_AS(confusion(std::vector<std::uint8_t>(3), truth), Error);

  std::vector<std::uint8_t> pred(truth);
  pred[10] = 1;
  const ConfusionCounts k = confusion(pred, truth);
  CHECK(k.fp == 1);
  CHECK(score(k).fpr == doctest::Approx(1.0 / 35.0));
  CHECK(score(k).fpr_standard == doctest::Approx(1.0 / 32.0));
}

TEST_CASE("base networks") {
  for (Structure s : {Structure::Random, Structure::SmallWorld, Structure::Hybrid}) {
    const SymmetricMatrix b = base_network(s, 35, std::sqrt(0.04), 7);
    for (double v : b.diagonal()) CHECK(v == 1.0);
    for (double v : b.upper()) CHECK((v >= -0.9 && v <= 0.9));
    CHECK(b == base_network(s, 35, std::sqrt(0.04), 7));
    CHECK_FALSE(b == base_network(s, 35, std::sqrt(0.04), 8));
    if (s == Structure::Random) {
      for (double v : b.upper()) CHECK(v != 0.0);
    }
  }
  CHECK_THROWS_AS(base_network(Structure::Random, 3, 0.2, 1), Error);
}

TEST_CASE("small-world graph") {
  const AdjacencyMatrix ring = small_world_graph(20, 4, 0.0, 1);
  CHECK(ring.edge_total() == 40);
  CHECK(ring(0, 1));
  CHECK(ring(0, 2));
  CHECK(ring(0, 19));
  CHECK_FALSE(ring(0, 3));
  const AdjacencyMatrix sw = small_world_graph(20, 4, 0.3, 1);
  CHECK(sw.edge_total() == 40);
  CHECK_FALSE(sw == ring);
}

TEST_CASE("simulated cohorts") {
  SimDesign d;
  d.q = 4;
  const SymmetricMatrix b = base_network(d.structure, d.n_nodes, d.base_edge_sd, 2);
  const SimulatedCohort c = simulate_cohort(d, b, 10);
  CHECK(c.cohort.group1.size() == 20);
  CHECK(c.cohort.group2.size() == 20);
  CHECK(std::accumulate(c.truth_edges.begin(), c.truth_edges.end(), 0) == 4);
  CHECK(c.truth_nodes[0] == 1);
  CHECK(std::accumulate(c.truth_nodes.begin(), c.truth_nodes.end(), 0) == 1);
  const auto edges = edge_list(35);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (c.truth_edges[e]) CHECK(edges[e].i == 0);

  d.targets = {0, 1, 2};
  d.q = 7;
  const SimulatedCohort m = simulate_cohort(d, b, 11);
  CHECK(std::accumulate(m.truth_edges.begin(), m.truth_edges.end(), 0) == 21);

  d.targets = {};
  const SimulatedCohort null = simulate_cohort(d, b, 12);
  CHECK(std::accumulate(null.truth_edges.begin(), null.truth_edges.end(), 0) == 0);

  d.targets = {0};
  d.q = 35;
  CHECK_THROWS_AS(d.validate(), Error);
}

TEST_CASE("injected edges shift group 2 by dwe_mean") {
  SimDesign d;
  d.q = 11;
  const SymmetricMatrix b = base_network(d.structure, d.n_nodes, d.base_edge_sd, 2);
  double diff = 0.0, null_diff = 0.0;
  std::size_t count = 0, null_count = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const SimulatedCohort c = simulate_cohort(d, b, 1000 + r);
    for (std::size_t e = 0; e < c.truth_edges.size(); ++e) {
      double m1 = 0, m2 = 0;
      for (const auto& s : c.cohort.group1) m1 += s.upper()[e] / 20.0;
      for (const auto& s : c.cohort.group2) m2 += s.upper()[e] / 20.0;
      if (c.truth_edges[e]) {
        diff += m2 - m1;
        ++count;
      } else {
        null_diff += m2 - m1;
        ++null_count;
      }
    }
  }
  CHECK(std::abs(diff / static_cast<double>(count) - 0.1) < 0.01);
  CHECK(std::abs(null_diff / static_cast<double>(null_count)) < 0.005);
}

TEST_CASE("experiment runs are execution-independent") {
  SimDesign d;
  d.replicates = 6;
  d.null_networks = 100;
  d.addt_resolution = 50'000;
  d.edge_methods = kAllEdgeMethods;
  const ExperimentResult a = run_experiment(d, Exec::Serial);
  const ExperimentResult b = run_experiment(d, Exec::Parallel);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].method == b.records[i].method);
    CHECK(a.records[i].mcc == b.records[i].mcc);
    CHECK(a.records[i].counts.tp == b.records[i].counts.tp);
    CHECK(a.records[i].counts.fp == b.records[i].counts.fp);
  }
  CHECK(a.node_metrics.size() == 5);
  CHECK(a.edge_metrics.size() == 6);
  const auto& m = a.node(Method::Eddt);
  CHECK(m.counts.total() == 35u * 6u);
  CHECK(a.edge(EdgeMethod::Fdr).counts.total() == edge_count(35) * 6u);
}

TEST_CASE("enum parsing") {
  CHECK(parse_structure("smallworld") == Structure::SmallWorld);
  try {
    parse_structure("lattice");
    FAIL("accepted an unknown structure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("random, smallworld, hybrid") != std::string::npos);
  }
  for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  for (EdgeMethod m : kAllEdgeMethods) CHECK(parse_edge_method(to_string(m)) == m);
}
