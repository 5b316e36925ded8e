#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "ddt/ddtest.hpp"
#include "ddt/errors.hpp"
#include "ddt/simbench.hpp"

using namespace ddt;

namespace {

AdjacencyMatrix complete(std::size_t n) { return AdjacencyMatrix(n, std::vector<std::uint8_t>(edge_count(n), 1)); }

}  // namespace

TEST_CASE("differential degree") {
  CHECK(differential_degree(AdjacencyMatrix(4)) == std::vector<long>{0, 0, 0, 0});
  CHECK(differential_degree(complete(5)) == std::vector<long>(5, 4));
  AdjacencyMatrix a(4);
  a.set(0, 1, true);
  CHECK(differential_degree(a) == std::vector<long>{1, 1, 0, 0});
}

TEST_CASE("null probability") {
  AdjacencyMatrix a(5), b(5);
  a.set(0, 1, true);
  a.set(0, 2, true);
  a.set(0, 3, true);
  b.set(0, 4, true);
  const std::vector<AdjacencyMatrix> two{a, b};
  CHECK(null_probability(two)[0] == 0.5);
  const std::vector<AdjacencyMatrix> none{AdjacencyMatrix(5), AdjacencyMatrix(5)};
  for (double p : null_probability(none)) CHECK(p == 0.0);
  const std::vector<AdjacencyMatrix> full{complete(5)};
  for (double p : null_probability(full)) CHECK(p == 1.0);
  CHECK_THROWS_AS(null_probability(std::vector<AdjacencyMatrix>{}), Error);
}

TEST_CASE("binomial node tests") {
  const std::vector<long> deg{0, 3, 2, 0, 0};
  const std::vector<double> pn{0.5, 0.5, 0.0, 0.1, 0.1};
  const auto r = binomial_node_tests(deg, pn, 0.05);
  CHECK(r[0].pvalue == 1.0);
  CHECK(r[1].pvalue == doctest::Approx(5.0 / 16.0));
  CHECK(r[2].pvalue == stats::kMinPValue);
  CHECK(r[2].degenerate);
  CHECK(r[2].significant);
  CHECK_FALSE(r[1].significant);

  const std::vector<long> d4{4, 4, 4, 4, 0};
  const std::vector<double> p4(5, 0.3);
  const auto bh = binomial_node_tests(d4, p4, 0.05, NodeCorrection::Fdr);
  CHECK(bh[0].pvalue == doctest::Approx(std::pow(0.3, 4)));
  CHECK(bh[0].significant);
  CHECK_FALSE(bh[4].significant);
}

TEST_CASE("config validation") {
  DdtConfig c;
  CHECK_NOTHROW(c.validate());
  c.threshold.kind = ThresholdKind::Fdr;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.alpha = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
}

namespace {

ConnectivityCohort sample_cohort(std::size_t q, std::uint64_t seed) {
  sim::SimDesign d;
  d.q = q;
  const SymmetricMatrix b = sim::base_network(d.structure, d.n_nodes, d.base_edge_sd, seed);
  return sim::simulate_cohort(d, b, seed + 1).cohort;
}

}  // namespace

TEST_CASE("pipeline end to end") {
  const ConnectivityCohort c = sample_cohort(11, 4);
  DdtConfig cfg;
  cfg.seed = 9;
  cfg.null_networks = 200;
  cfg.threshold.resolution = 200'000;
  cfg.mean_policy = MeanPolicy::ClampZero;
  cfg.test.transform = EdgeTransform::None;

  const DdtResult r = ddt_run(c, cfg);
  CHECK(r.nodes.size() == 35);
  CHECK(r.null_networks == 200);
  CHECK(r.adjacency.size() == 35);
  for (const char* stage : {"edge_tests", "difference_network", "moments", "null_ensemble", "threshold", "node_tests"}) {
    CHECK(r.timings_ms.count(stage) == 1);
  }
  long total = 0;
  for (const auto& n : r.nodes) total += n.degree;
  CHECK(total == 2 * static_cast<long>(r.adjacency.edge_total()));

  cfg.exec = Exec::Serial;
  const DdtResult s = ddt_run(c, cfg);
  CHECK(s.gamma == r.gamma);
  CHECK(s.adjacency == r.adjacency);
  for (std::size_t i = 0; i < 35; ++i) CHECK(s.nodes[i].pvalue == r.nodes[i].pvalue);

  cfg.threshold.kind = ThresholdKind::Addt;
  const DdtResult a = ddt_run(c, cfg);
  CHECK(std::abs(a.gamma - r.gamma) < 0.3);
}

TEST_CASE("pipeline surfaces degenerate input with the stage") {
  ConnectivityCohort c = sample_cohort(4, 5);
  c.group2 = c.group1;
  DdtConfig cfg;
  cfg.seed = 1;
  cfg.test.transform = EdgeTransform::None;
  try {
    ddt_run(c, cfg);
    FAIL("accepted identical groups");
  } catch (const Error& e) {
    CHECK(e.stage() == "moments");
    CHECK((e.kind() == ErrorKind::ZeroVariance || e.kind() == ErrorKind::NonpositiveMean));
  }
  c.group1.pop_back();
  c.group1.pop_back();
  c.group1.resize(1);
  try {
    ddt_run(c, cfg);
    FAIL("accepted a one-subject group");
  } catch (const Error& e) {
    CHECK(e.stage() == "validate_cohort");
  }
}
