#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copref/community.hpp"
#include "copref/graph.hpp"
#include "copref/ingest.hpp"
#include "copref/projection.hpp"

namespace copref {

enum class NetworkVariant {
  primary = 0,  // all comments, both sentiments, weights = raw counts
  sentiment,    // positive-only per category, weights = raw counts
  blend,        // positive-only per category, rating-blended weights
};

const char* variant_name(NetworkVariant v);
std::optional<NetworkVariant> parse_variant(std::string name);

struct PipelineConfig {
  std::string input_path;
  std::string emoji_dict_path;  // optional
  std::string ratings_path;     // required when the blend variant is selected
  std::string out_dir;          // optional; no files written when empty

  std::vector<Category> categories = {Category::scent, Category::longevity, Category::sillage};
  std::vector<NetworkVariant> variants = {NetworkVariant::primary, NetworkVariant::sentiment,
                                          NetworkVariant::blend};
  std::vector<Algorithm> algorithms = {Algorithm::louvain, Algorithm::fast_greedy,
                                       Algorithm::walktrap, Algorithm::spinglass,
                                       Algorithm::spectral};
  AlgorithmParams params;  // per-algorithm knobs; seed is overridden per cell

  int min_comments = 3;
  double min_edge_weight = 3.0;
  double blend_rating_coeff = 0.6;
  double blend_count_coeff = 0.4;
  EdgeFilterMode filter_mode = EdgeFilterMode::blended;
  ModularityMode modularity_mode = ModularityMode::weighted;
  std::uint64_t seed = 42;
  unsigned workers = 0;  // 0 = hardware concurrency

  /// Throws input_error when no category/variant/algorithm is selected or a
  /// threshold is out of range.
  void validate() const;
};

/// Flat key = value file (# comments); unknown keys are rejected.
PipelineConfig load_config_file(const std::string& path);

struct BuiltNetwork {
  NetworkVariant variant;
  std::optional<Category> category;  // empty for the primary network
  CoPreferenceGraph graph;

  std::string category_label() const;
};

/// Ingests records and constructs every selected network (projection, blend,
/// filter, prune, normalize) without running any detector.
std::vector<BuiltNetwork> build_networks(const PipelineConfig& config);

/// Runs the full (network x algorithm) grid. Writes GraphML, communities CSV,
/// DOT and a summary CSV per cell plus an aggregated summary.csv when out_dir
/// is set. Reports come back sorted by (algorithm, variant, category).
std::vector<CommunityReport> run_pipeline(const PipelineConfig& config);

}  // namespace copref
