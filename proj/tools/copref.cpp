// copref: build perfume co-preference networks from review data and detect
// item communities.
//
//   copref run     full grid: ingest -> project -> detect -> report
//   copref project stop after network construction, emit GraphML
//   copref score   recompute modularity from serialized artifacts
//
// Exit codes: 0 success, 1 input error, 2 algorithm failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "copref/errors.hpp"
#include "copref/pipeline.hpp"
#include "copref/serialize.hpp"

namespace {

using namespace copref;

struct CommonFlags {
  std::string config_path;
  std::string input, emoji_dict, ratings, out_dir;
  std::vector<std::string> categories, variants, algorithms;
  double resolution = -1.0, gamma = -1.0, min_edge_weight = -1.0;
  double blend_rating = -1.0, blend_count = -1.0;
  int walk_length = -1, spin_states = -1, min_comments = -1;
  long long k_clusters = -1;
  std::string filter_mode, modularity_mode, laplacian;
  long long seed = -1;
  int workers = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_algorithms) {
  cmd->add_option("--config", f.config_path, "flat key = value configuration file");
  cmd->add_option("--input", f.input, "review CSV");
  cmd->add_option("--emoji-dict", f.emoji_dict, "emoji TSV dictionary");
  cmd->add_option("--ratings", f.ratings, "per-item category ratings CSV");
  cmd->add_option("--category", f.categories, "scent|longevity|sillage (repeatable)");
  cmd->add_option("--variant", f.variants, "primary|sentiment|blend (repeatable)");
  if (with_algorithms)
    cmd->add_option("--algorithm", f.algorithms,
                    "louvain|fastgreedy|walktrap|spinglass|spectral|all (repeatable)");
  cmd->add_option("--resolution", f.resolution, "Louvain resolution");
  cmd->add_option("--gamma", f.gamma, "Spinglass gamma");
  cmd->add_option("--walk-length", f.walk_length, "Walktrap steps");
  cmd->add_option("--spin-states", f.spin_states, "Spinglass state cap");
  cmd->add_option("--k", f.k_clusters, "Spectral cluster count (default: eigengap)");
  cmd->add_option("--laplacian", f.laplacian, "standard|rw");
  cmd->add_option("--min-comments", f.min_comments, "low-engagement threshold (exclusive)");
  cmd->add_option("--min-edge-weight", f.min_edge_weight, "edge filter threshold (exclusive)");
  cmd->add_option("--blend-rating", f.blend_rating, "rating coefficient");
  cmd->add_option("--blend-count", f.blend_count, "count coefficient");
  cmd->add_option("--filter-mode", f.filter_mode, "blended|raw");
  cmd->add_option("--modularity-mode", f.modularity_mode, "weighted|binarized");
  cmd->add_option("--seed", f.seed, "base RNG seed");
  cmd->add_option("--workers", f.workers, "parallel grid cells (0 = auto)");
  cmd->add_option("--out", f.out_dir, "output directory");
}

// Flags override the config file.
PipelineConfig merge(const CommonFlags& f) {
  PipelineConfig config;
  if (!f.config_path.empty()) config = load_config_file(f.config_path);
  if (!f.input.empty()) config.input_path = f.input;
  if (!f.emoji_dict.empty()) config.emoji_dict_path = f.emoji_dict;
  if (!f.ratings.empty()) config.ratings_path = f.ratings;
  if (!f.out_dir.empty()) config.out_dir = f.out_dir;
  if (!f.categories.empty()) {
    config.categories.clear();
    for (const auto& name : f.categories) {
      const auto c = parse_category(name);
      if (!c || *c == Category::bottle_design)
        throw input_error("unknown category: " + name);
      config.categories.push_back(*c);
    }
  }
  if (!f.variants.empty()) {
    config.variants.clear();
    for (const auto& name : f.variants) {
      const auto v = parse_variant(name);
      if (!v) throw input_error("unknown variant: " + name);
      config.variants.push_back(*v);
    }
  }
  if (!f.algorithms.empty()) {
    config.algorithms.clear();
    for (const auto& name : f.algorithms) {
      if (name == "all") {
        config.algorithms = {Algorithm::louvain, Algorithm::fast_greedy, Algorithm::walktrap,
                             Algorithm::spinglass, Algorithm::spectral};
        break;
      }
      const auto a = parse_algorithm(name);
      if (!a) throw input_error("unknown algorithm: " + name);
      config.algorithms.push_back(*a);
    }
  }
  if (f.resolution >= 0.0) config.params.resolution = f.resolution;
  if (f.gamma >= 0.0) config.params.gamma = f.gamma;
  if (f.walk_length >= 0) config.params.walk_length = f.walk_length;
  if (f.spin_states >= 0) config.params.spin_states = f.spin_states;
  if (f.k_clusters >= 0) config.params.k_clusters = static_cast<std::size_t>(f.k_clusters);
  if (!f.laplacian.empty()) {
    if (f.laplacian == "standard") config.params.laplacian = LaplacianKind::standard;
    else if (f.laplacian == "rw") config.params.laplacian = LaplacianKind::random_walk;
    else throw input_error("laplacian must be standard or rw");
  }
  if (f.min_comments >= 0) config.min_comments = f.min_comments;
  if (f.min_edge_weight >= 0.0) config.min_edge_weight = f.min_edge_weight;
  if (f.blend_rating >= 0.0) config.blend_rating_coeff = f.blend_rating;
  if (f.blend_count >= 0.0) config.blend_count_coeff = f.blend_count;
  if (!f.filter_mode.empty()) {
    if (f.filter_mode == "blended") config.filter_mode = EdgeFilterMode::blended;
    else if (f.filter_mode == "raw") config.filter_mode = EdgeFilterMode::raw_count;
    else throw input_error("filter mode must be blended or raw");
  }
  if (!f.modularity_mode.empty()) {
    if (f.modularity_mode == "weighted") config.modularity_mode = ModularityMode::weighted;
    else if (f.modularity_mode == "binarized") config.modularity_mode = ModularityMode::binarized;
    else throw input_error("modularity mode must be weighted or binarized");
  }
  if (f.seed >= 0) config.seed = static_cast<std::uint64_t>(f.seed);
  if (f.workers >= 0) config.workers = static_cast<unsigned>(f.workers);
  return config;
}

int cmd_run(const CommonFlags& flags) {
  const PipelineConfig config = merge(flags);
  const auto reports = run_pipeline(config);
  std::printf("%-11s %-10s %-10s %12s %12s %10s\n", "algorithm", "variant", "category",
              "modularity", "communities", "seconds");
  for (const auto& r : reports)
    std::printf("%-11s %-10s %-10s %12.5f %12zu %10.3f\n", r.algorithm.c_str(),
                r.variant.c_str(), r.category.c_str(), r.modularity_q, r.community_count,
                r.duration_seconds);
  if (!config.out_dir.empty())
    std::printf("outputs written to %s\n", config.out_dir.c_str());
  return 0;
}

int cmd_project(const CommonFlags& flags) {
  PipelineConfig config = merge(flags);
  const auto networks = build_networks(config);
  std::printf("%-10s %-10s %8s %8s\n", "variant", "category", "nodes", "edges");
  for (const auto& net : networks) {
    std::printf("%-10s %-10s %8zu %8zu\n", variant_name(net.variant),
                net.category_label().c_str(), net.graph.node_count(), net.graph.edge_count());
    if (!config.out_dir.empty()) {
      std::filesystem::create_directories(config.out_dir);
      const auto path = std::filesystem::path(config.out_dir) /
                        ("network_" + std::string(variant_name(net.variant)) + "_" +
                         net.category_label() + ".graphml");
      write_graphml(net.graph, nullptr, path.string());
    }
  }
  if (!config.out_dir.empty())
    std::printf("networks written to %s\n", config.out_dir.c_str());
  return 0;
}

int cmd_score(const std::string& graphml_path, const std::string& communities_path,
              const std::string& mode) {
  const GraphmlData data = read_graphml(graphml_path);
  const auto& g = data.graph.graph();
  const auto rows = read_communities_csv(communities_path);
  if (rows.size() != g.node_count())
    throw input_error("communities file covers " + std::to_string(rows.size()) + " items, graph has " +
                      std::to_string(g.node_count()));
  std::vector<std::uint32_t> labels(g.node_count());
  std::vector<bool> seen(g.node_count(), false);
  for (const auto& [item, community] : rows) {
    const auto idx = g.find_node(item);
    if (!idx) throw input_error("unknown item in communities file: " + item);
    if (seen[*idx]) throw input_error("duplicate item in communities file: " + item);
    seen[*idx] = true;
    labels[*idx] = community;
  }
  const Partition partition(labels);

  ModularityMode m = ModularityMode::weighted;
  if (mode == "binarized") m = ModularityMode::binarized;
  else if (!mode.empty() && mode != "weighted")
    throw input_error("modularity mode must be weighted or binarized");

  const double q = modularity(g, partition, m);
  std::printf("modularity %s\ncommunities %zu\n", format_double(q).c_str(),
              partition.community_count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perfume co-preference network toolkit"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run the detection grid");
  add_common_flags(run, run_flags, true);

  CommonFlags project_flags;
  CLI::App* project = app.add_subcommand("project", "stop after network construction");
  add_common_flags(project, project_flags, false);

  std::string score_graphml, score_communities, score_mode;
  CLI::App* score = app.add_subcommand("score", "recompute Q from serialized outputs");
  score->add_option("--graphml", score_graphml, "GraphML file")->required();
  score->add_option("--communities", score_communities, "communities CSV")->required();
  score->add_option("--modularity-mode", score_mode, "weighted|binarized");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_flags);
    if (project->parsed()) return cmd_project(project_flags);
    if (score->parsed()) return cmd_score(score_graphml, score_communities, score_mode);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const copref::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
