// Acceptance suite: one pass/fail line per criterion. Runs everything by
// default; `--criterion N` runs a single one. Exit code 0 only if every
// executed criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "copref/community.hpp"
#include "copref/errors.hpp"
#include "copref/graph.hpp"
#include "copref/ingest.hpp"
#include "copref/linalg.hpp"
#include "copref/pipeline.hpp"
#include "copref/projection.hpp"
#include "copref/rng.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace copref;
using namespace copref::testing;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = COPREF_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void require(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Modularity oracle over every partition of every small fixture graph.
// ---------------------------------------------------------------------------
Outcome criterion1() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<WeightedGraph> fixture_set;
  fixture_set.push_back(path_graph(4));
  fixture_set.push_back(path_graph(7));
  fixture_set.push_back(cycle_graph(5));
  fixture_set.push_back(cycle_graph(6));
  fixture_set.push_back(complete_graph(5));
  fixture_set.push_back(complete_graph(7));
  fixture_set.push_back(star_graph(6));
  fixture_set.push_back(two_cliques_bridge(3));
  {
    // Weighted wheel: a 6-cycle plus spokes with dyadic weights.
    WeightedGraph wheel = cycle_graph(6);
    wheel.add_node("hub");
    for (std::uint32_t i = 0; i < 6; ++i)
      wheel.add_edge("hub", node_name(i), i % 2 ? 0.5 : 2.0);
    fixture_set.push_back(wheel);
  }
  {
    Rng rng(1001);  // random connected 7-node graph
    WeightedGraph g;
    bool connected = false;
    while (!connected) {
      g = random_dyadic_graph(7, 0.4, rng);
      if (g.edge_count() < 6) continue;
      const auto comps = detail::connected_components(g);
      connected = *std::max_element(comps.begin(), comps.end()) == 0;
    }
    fixture_set.push_back(g);
  }

  std::size_t checked = 0;
  for (const auto& g : fixture_set) {
    bool all_match = true;
    for_each_partition(g.node_count(), [&](const std::vector<std::uint32_t>& labels) {
      const Partition p(labels);
      const double impl = modularity(g, p);
      const double oracle = modularity_bruteforce(g, p);
      if (std::abs(impl - oracle) > 1e-9) all_match = false;
      ++checked;
    });
    out.require(all_match, "mismatch on a " + std::to_string(g.node_count()) + "-node graph");
  }
  const double secs = elapsed_since(t0);
  out.require(secs < 10.0, "took " + std::to_string(secs) + "s");
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu partitions over %zu graphs in %.2fs", checked,
                fixture_set.size(), secs);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 2. Two-triangle benchmark for every algorithm.
// ---------------------------------------------------------------------------
Outcome criterion2() {
  Outcome out;
  const WeightedGraph g = two_triangles();
  const Partition expected({0, 0, 0, 1, 1, 1});

  for (Algorithm a : {Algorithm::louvain, Algorithm::fast_greedy, Algorithm::walktrap,
                      Algorithm::spinglass}) {
    AlgorithmParams p;
    p.algorithm = a;
    p.seed = 42;
    const CommunityReport r = detect(g, p);
    out.require(std::abs(r.modularity_q - 0.5) <= 1e-9,
                std::string(algorithm_name(a)) + " Q=" + std::to_string(r.modularity_q));
    out.require(normalized_mutual_information(r.partition, expected) == 1.0,
                std::string(algorithm_name(a)) + " wrong partition");
  }

  AlgorithmParams p;
  p.algorithm = Algorithm::spectral;
  p.k_clusters = 2;
  p.seed = 42;
  const CommunityReport r = detect(g, p);
  out.require(normalized_mutual_information(r.partition, expected) == 1.0,
              "spectral k=2 did not return the components");
  out.detail = "louvain, fastgreedy, walktrap, spinglass at Q=0.5; spectral splits components";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Projection oracle on 200 random binary matrices.
// ---------------------------------------------------------------------------
Outcome criterion3() {
  Outcome out;
  Rng rng(33550336);
  std::size_t pairs_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t users = 1 + rng.uniform_index(12);
    const std::size_t items = 1 + rng.uniform_index(12);
    std::vector<std::vector<int>> a(users, std::vector<int>(items, 0));
    BipartiteGraph bip;
    for (std::size_t u = 0; u < users; ++u)
      for (std::size_t i = 0; i < items; ++i)
        if (rng.uniform_real() < 0.35) {
          a[u][i] = 1;
          bip.add_incidence("u" + std::to_string(u), "p" + std::to_string(i));
        }
    const CoPreferenceGraph g = project_bipartite(bip);

    for (const auto& e : g.graph().edges())
      if (e.a == e.b) out.fail("self-loop survived");

    for (std::size_t j = 0; j < items; ++j)
      for (std::size_t k = j + 1; k < items; ++k) {
        int expected = 0;
        for (std::size_t u = 0; u < users; ++u) expected += a[u][j] && a[u][k];
        const auto nj = g.graph().find_node("p" + std::to_string(j));
        const auto nk = g.graph().find_node("p" + std::to_string(k));
        const int got = (nj && nk) ? g.raw_count(*nj, *nk) : 0;
        if (got != expected) {
          out.fail("C mismatch at trial " + std::to_string(trial));
          return out;
        }
        ++pairs_checked;
      }
  }
  out.detail = "200 matrices, " + std::to_string(pairs_checked) + " pair counts, exact";
  return out;
}

// ---------------------------------------------------------------------------
// 4. Blend / normalize arithmetic and the edge-filter boundary.
// ---------------------------------------------------------------------------
Outcome criterion4() {
  Outcome out;

  {
    CoPreferenceGraph g;
    g.add_item("p0");
    g.add_item("p1");
    g.add_edge(0, 1, 5.0, 5);
    ItemRatings ratings;
    ratings.set("p0", Category::scent, 8.2, 285);
    ratings.set("p1", Category::scent, 8.2, 285);
    const double w = blend_weights(g, ratings, Category::scent).graph().edges()[0].weight;
    out.require(std::abs(w - 11.84) <= 1e-12, "blend gave " + std::to_string(w));
  }
  {
    // Edge of weight 12 between endpoints of degree 3 and 4.
    CoPreferenceGraph g;
    for (int i = 0; i < 7; ++i) g.add_item("p" + std::to_string(i));
    g.add_edge(0, 1, 12.0, 1);
    g.add_edge(0, 2, 5.0, 1);
    g.add_edge(0, 3, 5.0, 1);
    g.add_edge(1, 4, 5.0, 1);
    g.add_edge(1, 5, 5.0, 1);
    g.add_edge(1, 6, 5.0, 1);
    const CoPreferenceGraph n = normalize_weights(g);
    out.require(n.graph().edge_weight(0, 1) == 1.0, "normalize(12, 3, 4) != 1.0 exactly");
  }
  {
    CoPreferenceGraph g;
    for (int i = 0; i < 4; ++i) g.add_item("p" + std::to_string(i));
    g.add_edge(0, 1, 3.0, 1);
    g.add_edge(2, 3, 3.0 + 1e-6, 1);
    const CoPreferenceGraph f = filter_edges(g, 3.0);
    out.require(f.edge_count() == 1, "boundary filter kept the wrong edges");
    out.require(f.graph().degree(f.graph().index_of("p2")) == 1, "W = 3+1e-6 was dropped");
    out.require(f.graph().degree(f.graph().index_of("p0")) == 0, "W = 3.0 survived");
  }
  out.detail = "W(8.2,8.2,5)=11.84, 12/(3*4)=1.0, filter boundary at 3.0";
  return out;
}

// ---------------------------------------------------------------------------
// 5. Vote-override table, exhaustive.
// ---------------------------------------------------------------------------
Outcome criterion5() {
  Outcome out;
  out.require(apply_vote_override(Sentiment::positive, 1) == Sentiment::negative, "(Pos,1)");
  out.require(apply_vote_override(Sentiment::negative, 9) == Sentiment::positive, "(Neg,9)");
  out.require(apply_vote_override(Sentiment::positive, 5) == Sentiment::positive, "(Pos,5)");
  out.require(apply_vote_override(Sentiment::negative, std::nullopt) == Sentiment::negative,
              "(Neg,absent)");
  for (int r = 1; r <= 10; ++r)
    for (Sentiment base : {Sentiment::positive, Sentiment::negative}) {
      const Sentiment expected =
          r >= 7 ? Sentiment::positive : (r <= 3 ? Sentiment::negative : base);
      if (apply_vote_override(base, r) != expected)
        out.fail("rule mismatch at R=" + std::to_string(r));
    }
  out.detail = "4 examples plus exhaustive R in 1..10 x {Pos, Neg}";
  return out;
}

// ---------------------------------------------------------------------------
// 6. Planted-partition recovery, 10 seeds per algorithm.
// ---------------------------------------------------------------------------
Outcome criterion6() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::string details;
  for (Algorithm a : {Algorithm::louvain, Algorithm::fast_greedy, Algorithm::walktrap,
                      Algorithm::spinglass, Algorithm::spectral}) {
    double nmi_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const PlantedGraph planted = planted_partition(4, 30, 0.30, 0.02, seed);
      AlgorithmParams p;
      p.algorithm = a;
      p.seed = seed;
      if (a == Algorithm::spectral) p.k_clusters = 4;
      const CommunityReport r = detect(planted.graph, p);
      nmi_sum += normalized_mutual_information(r.partition, planted.truth);
    }
    const double mean = nmi_sum / 10.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s=%.3f ", algorithm_name(a), mean);
    details += buf;
    out.require(mean >= 0.90,
                std::string(algorithm_name(a)) + " mean NMI " + std::to_string(mean));
  }
  const double secs = elapsed_since(t0);
  out.require(secs < 120.0, "took " + std::to_string(secs) + "s");
  char buf[200];
  std::snprintf(buf, sizeof(buf), "mean NMI: %sin %.1fs", details.c_str(), secs);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 7. Eigensolver checks.
// ---------------------------------------------------------------------------
Outcome criterion7() {
  Outcome out;
  {
    SymmetricMatrix m(2);
    m.set(0, 0, 2.0);
    m.set(1, 1, 2.0);
    m.set(0, 1, 1.0);
    const EigenResult r = eigensolve_symmetric(m, 2);
    out.require(std::abs(r.eigenvalues[0] - 1.0) <= 1e-8, "lambda_1 != 1");
    out.require(std::abs(r.eigenvalues[1] - 3.0) <= 1e-8, "lambda_2 != 3");
  }
  {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
      SymmetricMatrix m(20);
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j <= i; ++j) m.set(i, j, rng.uniform_real() * 6.0 - 3.0);
      const EigenResult r = eigensolve_symmetric(m, 20);
      double sum = 0.0;
      for (double ev : r.eigenvalues) sum += ev;
      if (std::abs(sum - m.trace()) > 1e-8 * std::max(1.0, m.norm()))
        out.fail("trace identity violated at trial " + std::to_string(trial));
    }
  }
  {
    Rng rng(78);
    for (int trial = 0; trial < 20; ++trial) {
      // Random union of 1..4 connected blocks plus isolates.
      WeightedGraph g;
      const std::size_t blocks = 1 + rng.uniform_index(4);
      for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t sz = 2 + rng.uniform_index(5);
        std::string prev;
        for (std::size_t i = 0; i < sz; ++i) {
          const std::string id = "b" + std::to_string(b) + "_" + std::to_string(i);
          g.add_node(id);
          if (!prev.empty()) g.add_edge(prev, id, 0.5 + rng.uniform_real());
          prev = id;
        }
      }
      const std::size_t isolates = rng.uniform_index(3);
      for (std::size_t i = 0; i < isolates; ++i) g.add_node("iso" + std::to_string(i));

      SymmetricMatrix lap(g.node_count());
      for (std::uint32_t i = 0; i < g.node_count(); ++i) lap.set(i, i, g.weighted_degree(i));
      for (const auto& e : g.edges()) lap.set(e.a, e.b, -e.weight);
      const EigenResult r = eigensolve_symmetric(lap, g.node_count());
      std::size_t zeros = 0;
      for (double ev : r.eigenvalues)
        if (std::abs(ev) < 1e-9) ++zeros;
      if (zeros != blocks + isolates)
        out.fail("zero count " + std::to_string(zeros) + " != components " +
                 std::to_string(blocks + isolates));
    }
  }
  out.detail = "{1,3} eigenvalues, 10 trace identities, 20 component counts";
  return out;
}

// ---------------------------------------------------------------------------
// 8. Byte-identical full-grid determinism on the bundled fixture.
// ---------------------------------------------------------------------------
Outcome criterion8() {
  Outcome out;
  PipelineConfig config;
  config.input_path = kFixtures + "/reviews_small.csv";
  config.emoji_dict_path = kFixtures + "/emoji_dict.tsv";
  config.ratings_path = kFixtures + "/ratings_small.csv";
  config.seed = 42;
  config.workers = 2;

  const fs::path base = fs::temp_directory_path() / "copref_acceptance8";
  fs::remove_all(base);
  const fs::path dir1 = base / "run1", dir2 = base / "run2";

  config.out_dir = dir1.string();
  run_pipeline(config);
  config.out_dir = dir2.string();
  run_pipeline(config);

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir1)) {
    ++files;
    std::ifstream a(entry.path(), std::ios::binary);
    std::ifstream b(dir2 / entry.path().filename(), std::ios::binary);
    if (!b) {
      out.fail("missing " + entry.path().filename().string() + " in second run");
      continue;
    }
    std::ostringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    if (sa.str() != sb.str()) out.fail(entry.path().filename().string() + " differs");
  }
  out.require(files == 7 * 5 * 4 + 1, "unexpected file count " + std::to_string(files));
  fs::remove_all(base);
  out.detail = std::to_string(files) + " output files byte-identical across two runs";
  return out;
}

// ---------------------------------------------------------------------------
// 9. Scale smoke test at the published dataset's size.
// ---------------------------------------------------------------------------
void write_scale_inputs(const fs::path& reviews, const fs::path& ratings) {
  const std::size_t n_users = 7000, n_items = 1100;
  Rng rng(20240915);

  // Zipf-like item popularity so frequently reviewed items co-occur.
  std::vector<double> cdf(n_items);
  double acc = 0.0;
  for (std::size_t i = 0; i < n_items; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), 0.85);
    cdf[i] = acc;
  }
  auto sample_item = [&]() {
    const double u = rng.uniform_real() * cdf.back();
    return static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  };

  std::ofstream out(reviews, std::ios::binary);
  out << "user_id,perfume_id,comment,vote_scent,vote_longevity,vote_sillage,vote_bottle,"
         "sentiment,is_reply\n";
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t positives = 0;
  // Draw until ~36k positive incidences; ~12% negative rows come along.
  while (positives < 36000) {
    const std::size_t u = rng.uniform_index(n_users);
    const std::size_t i = sample_item();
    if (!seen.insert({u, i}).second) continue;
    const bool positive = rng.uniform_real() < 0.88;
    if (positive) ++positives;
    const int vote = positive ? 7 + static_cast<int>(rng.uniform_index(4))
                              : 1 + static_cast<int>(rng.uniform_index(3));
    out << u << ',' << i << ",r," << vote << ',' << vote << ',' << vote << ",,"
        << (positive ? "positive" : "negative") << ",0\n";
  }

  std::ofstream r(ratings, std::ios::binary);
  r << "perfume_id,category,avg_rating,vote_count\n";
  for (std::size_t i = 0; i < n_items; ++i)
    for (const char* cat : {"scent", "longevity", "sillage"}) {
      const double avg = 5.0 + rng.uniform_real() * 4.5;
      r << i << ',' << cat << ',' << static_cast<int>(avg * 10) / 10.0 << ','
        << (10 + rng.uniform_index(400)) << "\n";
    }
}

Outcome criterion9() {
  Outcome out;
  const fs::path base = fs::temp_directory_path() / "copref_acceptance9";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path reviews = base / "reviews.csv";
  const fs::path ratings = base / "ratings.csv";
  write_scale_inputs(reviews, ratings);

  const auto t0 = std::chrono::steady_clock::now();
  PipelineConfig config;
  config.input_path = reviews.string();
  config.ratings_path = ratings.string();
  config.seed = 42;
  config.workers = 0;  // all cores
  const auto reports = run_pipeline(config);
  const double secs = elapsed_since(t0);

  out.require(reports.size() == 35, "report count " + std::to_string(reports.size()));
  for (const auto& r : reports)
    out.require(r.community_count >= 1 && r.partition.size() >= 1,
                r.algorithm + "/" + r.variant + "/" + r.category + " empty result");
  out.require(secs < 600.0, "grid took " + std::to_string(secs) + "s");

  std::size_t min_nodes = SIZE_MAX, max_nodes = 0;
  for (const auto& r : reports) {
    min_nodes = std::min(min_nodes, r.partition.size());
    max_nodes = std::max(max_nodes, r.partition.size());
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "35 reports over networks of %zu..%zu items in %.1fs",
                min_nodes, max_nodes, secs);
  out.detail = buf;
  fs::remove_all(base);
  return out;
}

struct Criterion {
  int number;
  const char* title;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "modularity matches the brute-force oracle on all small partitions", criterion1},
    {2, "two-triangle benchmark: every algorithm finds the triangles", criterion2},
    {3, "projection equals direct co-incidence counting, no self-loops", criterion3},
    {4, "blend, normalization and filter-boundary arithmetic", criterion4},
    {5, "vote-override table, exhaustive", criterion5},
    {6, "planted-partition recovery, mean NMI >= 0.90 over 10 seeds", criterion6},
    {7, "eigensolver: closed forms, trace identity, component counts", criterion7},
    {8, "full-grid byte-identical determinism on the bundled fixture", criterion8},
    {9, "scale smoke test: 7000x1100 grid under 10 minutes", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  int failures = 0;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.number != only) continue;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s\n", outcome.pass ? "PASS" : "FAIL", c.number, c.title,
                outcome.detail.empty() ? "" : " -- ", outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
