#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "copref/errors.hpp"
#include "copref/pipeline.hpp"
#include "copref/rng.hpp"
#include "copref/serialize.hpp"
#include "doctest.h"

using namespace copref;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = COPREF_FIXTURE_DIR;

PipelineConfig fixture_config() {
  PipelineConfig config;
  config.input_path = kFixtures + "/reviews_small.csv";
  config.emoji_dict_path = kFixtures + "/emoji_dict.tsv";
  config.ratings_path = kFixtures + "/ratings_small.csv";
  config.seed = 42;
  config.workers = 2;
  return config;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("copref_pipe_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CoPreferenceGraph tiny_graph() {
  CoPreferenceGraph g;
  g.add_item("perfume_1", "First, \"quoted\" name");
  g.add_item("perfume_2");
  g.add_item("perfume_3");
  g.add_edge(0, 1, 4.25, 3);
  g.add_edge(1, 2, 7.0, 2);
  return g;
}

}  // namespace

TEST_CASE("single-cell run satisfies the report contract") {
  PipelineConfig config = fixture_config();
  config.variants = {NetworkVariant::blend};
  config.categories = {Category::scent};
  config.algorithms = {Algorithm::louvain};
  const auto reports = run_pipeline(config);
  REQUIRE(reports.size() == 1);
  const auto& r = reports[0];
  CHECK(r.algorithm == "louvain");
  CHECK(r.variant == "blend");
  CHECK(r.category == "scent");
  CHECK(r.modularity_q >= -0.5);
  CHECK(r.modularity_q <= 1.0);
  CHECK(r.community_count >= 1);
}

TEST_CASE("grid completeness") {
  PipelineConfig config = fixture_config();
  SUBCASE("full grid: 7 networks x 5 algorithms = 35 reports") {
    const auto reports = run_pipeline(config);
    CHECK(reports.size() == 35);
    // Sorted by (algorithm, variant, category).
    std::set<std::tuple<std::string, std::string, std::string>> cells;
    for (const auto& r : reports) cells.insert({r.algorithm, r.variant, r.category});
    CHECK(cells.size() == 35);
  }
  SUBCASE("primary only contributes one network per algorithm") {
    config.variants = {NetworkVariant::primary};
    config.algorithms = {Algorithm::louvain, Algorithm::fast_greedy};
    CHECK(run_pipeline(config).size() == 2);
  }
  SUBCASE("sentiment with two categories") {
    config.variants = {NetworkVariant::sentiment};
    config.categories = {Category::scent, Category::sillage};
    config.algorithms = {Algorithm::fast_greedy};
    const auto reports = run_pipeline(config);
    CHECK(reports.size() == 2);
    for (const auto& r : reports) CHECK(r.variant == "sentiment");
  }
}

TEST_CASE("pipeline input errors") {
  PipelineConfig config = fixture_config();
  SUBCASE("empty record file") {
    TempDir dir;
    const auto empty = dir.path / "empty.csv";
    std::ofstream(empty) << "user_id,perfume_id,comment,vote_scent,vote_longevity,vote_sillage,"
                            "vote_bottle,sentiment,is_reply\n";
    config.input_path = empty.string();
    CHECK_THROWS_WITH_AS(run_pipeline(config), doctest::Contains("no records"), input_error);
  }
  SUBCASE("blend without ratings") {
    config.ratings_path.clear();
    CHECK_THROWS_AS(run_pipeline(config), input_error);
  }
  SUBCASE("nothing selected") {
    config.algorithms.clear();
    CHECK_THROWS_AS(run_pipeline(config), input_error);
  }
}

TEST_CASE("build_networks stops before detection") {
  PipelineConfig config = fixture_config();
  const auto networks = build_networks(config);
  REQUIRE(networks.size() == 7);  // 1 primary + 3 sentiment + 3 blend
  for (const auto& net : networks) {
    INFO(variant_name(net.variant), " ", net.category_label());
    CHECK(net.graph.node_count() > 0);
    CHECK(net.graph.edge_count() > 0);
    // Post-processing leaves no isolated nodes behind.
    for (std::uint32_t i = 0; i < net.graph.node_count(); ++i)
      CHECK(net.graph.graph().degree(i) > 0);
  }
}

TEST_CASE("graphml writer") {
  TempDir dir;
  SUBCASE("single edge structure") {
    CoPreferenceGraph g;
    g.add_item("perfume_1", "A & B <test>");
    g.add_item("perfume_2");
    g.add_edge(0, 1, 2.5, 4);
    const Partition p({0, 0});
    const auto path = dir.path / "one.graphml";
    write_graphml(g, &p, path.string());
    const std::string xml = slurp(path);
    CHECK(xml.find("<node id=\"perfume_1\">") != std::string::npos);
    CHECK(xml.find("A &amp; B &lt;test&gt;") != std::string::npos);
    CHECK(xml.find("edgedefault=\"undirected\"") != std::string::npos);
    CHECK(xml.find("<data key=\"d2\">2.5</data>") != std::string::npos);
    CHECK(xml.find("<data key=\"d3\">4</data>") != std::string::npos);
    // Attribute keys declared exactly once.
    CHECK(xml.find("attr.name=\"weight\"") == xml.rfind("attr.name=\"weight\""));
  }
  SUBCASE("round-trip is exact") {
    Rng rng(2);
    CoPreferenceGraph g;
    for (int i = 0; i < 12; ++i)
      g.add_item("perfume_" + std::to_string(i),
                 i % 3 ? "Name \"" + std::to_string(i) + "\", special & <odd>" : "");
    std::vector<std::uint32_t> labels;
    for (std::uint32_t i = 0; i < 12; ++i) labels.push_back(static_cast<std::uint32_t>(i % 4));
    for (std::uint32_t i = 0; i < 12; ++i)
      for (std::uint32_t j = i + 1; j < 12; ++j)
        if (rng.uniform_real() < 0.3)
          g.add_edge(i, j, rng.uniform_real() * 11.0 + 1e-3,
                     1 + static_cast<int>(rng.uniform_index(9)));
    const Partition p(labels);

    const auto path = dir.path / "round.graphml";
    write_graphml(g, &p, path.string());
    const GraphmlData back = read_graphml(path.string());

    REQUIRE(back.partition.has_value());
    CHECK(*back.partition == p);
    REQUIRE(back.graph.node_count() == g.node_count());
    REQUIRE(back.graph.edge_count() == g.edge_count());
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
      CHECK(back.graph.graph().node_id(i) == g.graph().node_id(i));
      CHECK(back.graph.graph().display_name(i) == g.graph().display_name(i));
    }
    for (const auto& e : g.graph().edges()) {
      CHECK(back.graph.graph().edge_weight(e.a, e.b) == e.weight);  // bit-exact
      CHECK(back.graph.raw_count(e.a, e.b) == g.raw_count(e.a, e.b));
    }

    // Writing the parsed graph again reproduces the bytes.
    const auto path2 = dir.path / "round2.graphml";
    write_graphml(back.graph, &*back.partition, path2.string());
    CHECK(slurp(path2) == slurp(path));
  }
  SUBCASE("empty graph and partition-less output") {
    CoPreferenceGraph g;
    const auto path = dir.path / "empty.graphml";
    write_graphml(g, nullptr, path.string());
    const GraphmlData back = read_graphml(path.string());
    CHECK(back.graph.node_count() == 0);
    CHECK_FALSE(back.partition.has_value());
  }
}

TEST_CASE("communities CSV writer") {
  TempDir dir;
  const CoPreferenceGraph g = tiny_graph();
  CommunityReport report;
  report.algorithm = "louvain";
  report.variant = "blend";
  report.category = "scent";
  report.partition = Partition({1, 1, 0});  // deliberately non-sorted labels
  report.modularity_q = 0.125;
  report.community_count = 2;

  const auto rows_path = dir.path / "communities.csv";
  const auto summary_path = dir.path / "summary.csv";
  write_communities_csv(g, report, rows_path.string(), summary_path.string());

  const std::string rows = slurp(rows_path);
  CHECK(rows ==
        "community_id,perfume_id,perfume_name\n"
        "0,perfume_3,perfume_3\n"
        "1,perfume_1,\"First, \"\"quoted\"\" name\"\n"
        "1,perfume_2,perfume_2\n");
  CHECK(slurp(summary_path) ==
        "algorithm,variant,category,modularity,communities\n"
        "louvain,blend,scent,0.125,2\n");

  const auto parsed = read_communities_csv(rows_path.string());
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0] == std::pair<std::string, std::uint32_t>{"perfume_3", 0});
}

TEST_CASE("dot writer") {
  TempDir dir;
  SUBCASE("two communities use two fill colors") {
    const CoPreferenceGraph g = tiny_graph();
    const auto path = dir.path / "g.dot";
    write_dot(g, Partition({0, 0, 1}), path.string());
    const std::string dot = slurp(path);
    CHECK(dot.find("#a6cee3") != std::string::npos);
    CHECK(dot.find("#1f78b4") != std::string::npos);
    // Quotes in display names are escaped.
    CHECK(dot.find("First, \\\"quoted\\\" name") != std::string::npos);
    CHECK(dot.find("\"perfume_1\" -- \"perfume_3\"") == std::string::npos);  // p1-p3 not adjacent
    CHECK(dot.find("\"perfume_1\" -- \"perfume_2\"") != std::string::npos);
    CHECK(dot.find("\"perfume_2\" -- \"perfume_3\"") != std::string::npos);
  }
  SUBCASE("empty graph is valid DOT") {
    CoPreferenceGraph g;
    const auto path = dir.path / "empty.dot";
    write_dot(g, Partition(std::vector<std::uint32_t>{}), path.string());
    CHECK(slurp(path) == "graph copreference {\n  node [style=filled];\n}\n");
  }
}

TEST_CASE("full-grid outputs are byte-identical across runs") {
  TempDir dir1, dir2;
  PipelineConfig config = fixture_config();
  // Keep this quick: the full five-algorithm determinism run lives in the
  // acceptance suite; two algorithms exercise the same plumbing here.
  config.algorithms = {Algorithm::louvain, Algorithm::spectral};
  config.out_dir = dir1.path.string();
  run_pipeline(config);
  config.out_dir = dir2.path.string();
  run_pipeline(config);

  std::vector<fs::path> files1;
  for (const auto& entry : fs::directory_iterator(dir1.path)) files1.push_back(entry.path());
  REQUIRE(!files1.empty());
  // 7 networks x 2 algorithms x 4 files + aggregated summary.
  CHECK(files1.size() == 7 * 2 * 4 + 1);
  for (const auto& f1 : files1) {
    const auto f2 = dir2.path / f1.filename();
    REQUIRE(fs::exists(f2));
    CHECK(slurp(f1) == slurp(f2));
  }
}

TEST_CASE("serialized artifacts re-validate: score equals the reported Q") {
  TempDir dir;
  PipelineConfig config = fixture_config();
  config.variants = {NetworkVariant::blend};
  config.categories = {Category::longevity};
  config.algorithms = {Algorithm::fast_greedy};
  config.out_dir = dir.path.string();
  const auto reports = run_pipeline(config);
  REQUIRE(reports.size() == 1);

  const GraphmlData data = read_graphml((dir.path / "blend_longevity_fastgreedy.graphml").string());
  REQUIRE(data.partition.has_value());
  const double q = modularity(data.graph.graph(), *data.partition);
  CHECK(q == doctest::Approx(reports[0].modularity_q).epsilon(1e-9));

  // The communities CSV carries the same labels.
  const auto rows =
      read_communities_csv((dir.path / "blend_longevity_fastgreedy.communities.csv").string());
  REQUIRE(rows.size() == data.graph.node_count());
  for (const auto& [item, community] : rows) {
    const auto idx = data.graph.graph().index_of(item);
    CHECK(data.partition->label(idx) == community);
  }
}

TEST_CASE("config file parsing and validation") {
  TempDir dir;
  const auto path = dir.path / "copref.conf";
  std::ofstream(path) << "# experiment configuration\n"
                         "input = reviews.csv\n"
                         "ratings = ratings.csv\n"
                         "categories = scent, sillage\n"
                         "variants = sentiment, blend\n"
                         "algorithms = louvain, spectral\n"
                         "resolution = 2.0\n"
                         "min_edge_weight = 2.5\n"
                         "filter_mode = raw\n"
                         "modularity_mode = binarized\n"
                         "seed = 7\n";
  const PipelineConfig config = load_config_file(path.string());
  CHECK(config.input_path == "reviews.csv");
  CHECK(config.categories == std::vector<Category>{Category::scent, Category::sillage});
  CHECK(config.variants ==
        std::vector<NetworkVariant>{NetworkVariant::sentiment, NetworkVariant::blend});
  CHECK(config.algorithms == std::vector<Algorithm>{Algorithm::louvain, Algorithm::spectral});
  CHECK(config.params.resolution == 2.0);
  CHECK(config.min_edge_weight == 2.5);
  CHECK(config.filter_mode == EdgeFilterMode::raw_count);
  CHECK(config.modularity_mode == ModularityMode::binarized);
  CHECK(config.seed == 7);

  std::ofstream(path) << "unknown_key = 1\n";
  CHECK_THROWS_WITH_AS(load_config_file(path.string()), doctest::Contains("unknown key"),
                       input_error);
  CHECK_THROWS_AS(load_config_file("/missing/copref.conf"), input_error);
}

TEST_CASE("binarized scoring mode changes only the reported Q") {
  PipelineConfig config = fixture_config();
  config.variants = {NetworkVariant::blend};
  config.categories = {Category::scent};
  config.algorithms = {Algorithm::louvain};
  const auto weighted = run_pipeline(config);
  config.modularity_mode = ModularityMode::binarized;
  const auto binarized = run_pipeline(config);
  REQUIRE(weighted.size() == 1);
  REQUIRE(binarized.size() == 1);
  CHECK(weighted[0].partition == binarized[0].partition);  // same detection result
  CHECK(weighted[0].modularity_q != binarized[0].modularity_q);
}
