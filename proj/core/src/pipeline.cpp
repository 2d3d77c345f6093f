#include "copref/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "copref/csv.hpp"
#include "copref/errors.hpp"
#include "copref/rng.hpp"
#include "copref/serialize.hpp"

namespace copref {

const char* variant_name(NetworkVariant v) {
  switch (v) {
    case NetworkVariant::primary: return "primary";
    case NetworkVariant::sentiment: return "sentiment";
    case NetworkVariant::blend: return "blend";
  }
  return "?";
}

std::optional<NetworkVariant> parse_variant(std::string name) {
  for (char& c : name)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (name == "primary") return NetworkVariant::primary;
  if (name == "sentiment") return NetworkVariant::sentiment;
  if (name == "blend" || name == "sentiment+blend") return NetworkVariant::blend;
  return std::nullopt;
}

void PipelineConfig::validate() const {
  if (input_path.empty()) throw input_error("no input file configured");
  if (categories.empty()) throw input_error("at least one category must be selected");
  if (variants.empty()) throw input_error("at least one network variant must be selected");
  if (algorithms.empty()) throw input_error("at least one algorithm must be selected");
  if (min_comments < 0) throw input_error("min_comments must be >= 0");
  if (min_edge_weight < 0.0) throw input_error("min_edge_weight must be >= 0");
  if (blend_rating_coeff < 0.0 || blend_count_coeff < 0.0)
    throw input_error("blend coefficients must be >= 0");
  const bool needs_ratings =
      std::find(variants.begin(), variants.end(), NetworkVariant::blend) != variants.end();
  if (needs_ratings && ratings_path.empty())
    throw input_error("the blend variant requires a ratings file");
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
}

std::string BuiltNetwork::category_label() const {
  return category ? category_name(*category) : "all";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open config: " + path);

  PipelineConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw input_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto bad = [&](const std::string& why) {
      return input_error("config line " + std::to_string(line_no) + ": " + why);
    };
    try {
      if (key == "input") config.input_path = value;
      else if (key == "emoji_dict") config.emoji_dict_path = value;
      else if (key == "ratings") config.ratings_path = value;
      else if (key == "out_dir") config.out_dir = value;
      else if (key == "categories") {
        config.categories.clear();
        for (const auto& name : split_list(value)) {
          const auto c = parse_category(name);
          if (!c || *c == Category::bottle_design) throw bad("unknown category " + name);
          config.categories.push_back(*c);
        }
      } else if (key == "variants") {
        config.variants.clear();
        for (const auto& name : split_list(value)) {
          const auto v = parse_variant(name);
          if (!v) throw bad("unknown variant " + name);
          config.variants.push_back(*v);
        }
      } else if (key == "algorithms") {
        config.algorithms.clear();
        for (const auto& name : split_list(value)) {
          if (name == "all") {
            config.algorithms = {Algorithm::louvain, Algorithm::fast_greedy, Algorithm::walktrap,
                                 Algorithm::spinglass, Algorithm::spectral};
            break;
          }
          const auto a = parse_algorithm(name);
          if (!a) throw bad("unknown algorithm " + name);
          config.algorithms.push_back(*a);
        }
      } else if (key == "resolution") config.params.resolution = std::stod(value);
      else if (key == "gamma") config.params.gamma = std::stod(value);
      else if (key == "walk_length") config.params.walk_length = std::stoi(value);
      else if (key == "spin_states") config.params.spin_states = std::stoi(value);
      else if (key == "k_clusters") config.params.k_clusters = std::stoul(value);
      else if (key == "laplacian") {
        if (value == "standard") config.params.laplacian = LaplacianKind::standard;
        else if (value == "rw" || value == "random_walk")
          config.params.laplacian = LaplacianKind::random_walk;
        else throw bad("laplacian must be standard or rw");
      } else if (key == "anneal_t0") config.params.anneal.start_temperature = std::stod(value);
      else if (key == "anneal_cooling") config.params.anneal.cooling = std::stod(value);
      else if (key == "anneal_sweeps") config.params.anneal.max_sweeps = std::stoi(value);
      else if (key == "min_comments") config.min_comments = std::stoi(value);
      else if (key == "min_edge_weight") config.min_edge_weight = std::stod(value);
      else if (key == "blend_rating") config.blend_rating_coeff = std::stod(value);
      else if (key == "blend_count") config.blend_count_coeff = std::stod(value);
      else if (key == "filter_mode") {
        if (value == "blended") config.filter_mode = EdgeFilterMode::blended;
        else if (value == "raw" || value == "raw-count") config.filter_mode = EdgeFilterMode::raw_count;
        else throw bad("filter_mode must be blended or raw");
      } else if (key == "modularity_mode") {
        if (value == "weighted") config.modularity_mode = ModularityMode::weighted;
        else if (value == "binarized") config.modularity_mode = ModularityMode::binarized;
        else throw bad("modularity_mode must be weighted or binarized");
      } else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "workers") config.workers = static_cast<unsigned>(std::stoul(value));
      else throw bad("unknown key " + key);
    } catch (const input_error&) {
      throw;
    } catch (const std::exception&) {
      throw bad("bad value for " + key);
    }
  }
  return config;
}

namespace {

CoPreferenceGraph post_process(CoPreferenceGraph graph, const PipelineConfig& config) {
  graph = filter_edges(graph, config.min_edge_weight, config.filter_mode);
  graph = prune_isolated(graph);
  return normalize_weights(graph);
}

}  // namespace

std::vector<BuiltNetwork> build_networks(const PipelineConfig& config) {
  config.validate();

  auto records = load_reviews_csv(config.input_path);
  if (records.empty()) throw input_error("no records in " + config.input_path);

  std::optional<EmojiDictionary> dict;
  if (!config.emoji_dict_path.empty()) dict = EmojiDictionary::load_tsv(config.emoji_dict_path);
  apply_text_pipeline(records, dict ? &*dict : nullptr);

  records = filter_low_engagement(records, config.min_comments);
  if (records.empty()) throw input_error("no records survive the engagement filter");

  std::optional<ItemRatings> ratings;
  const bool blend_selected =
      std::find(config.variants.begin(), config.variants.end(), NetworkVariant::blend) !=
      config.variants.end();
  if (blend_selected) ratings = ItemRatings::load_csv(config.ratings_path);

  std::vector<BuiltNetwork> networks;
  for (NetworkVariant variant : config.variants) {
    if (variant == NetworkVariant::primary) {
      auto projected = project_bipartite(build_bipartite_primary(records));
      networks.push_back({variant, std::nullopt, post_process(std::move(projected), config)});
      continue;
    }
    for (Category category : config.categories) {
      auto projected = project_bipartite(build_bipartite(records, category));
      if (variant == NetworkVariant::blend)
        projected = blend_weights(projected, *ratings, category, config.blend_rating_coeff,
                                  config.blend_count_coeff);
      networks.push_back({variant, category, post_process(std::move(projected), config)});
    }
  }
  return networks;
}

namespace {

struct GridCell {
  const BuiltNetwork* network;
  Algorithm algorithm;
};

std::string cell_stem(const BuiltNetwork& network, Algorithm algorithm) {
  return std::string(variant_name(network.variant)) + "_" + network.category_label() + "_" +
         algorithm_name(algorithm);
}

CommunityReport run_cell(const GridCell& cell, const PipelineConfig& config) {
  AlgorithmParams params = config.params;
  params.algorithm = cell.algorithm;
  // Stable per-cell seeds: independent of which grid subsets were selected.
  const std::uint64_t salt = static_cast<std::uint64_t>(cell.algorithm) * 64 +
                             static_cast<std::uint64_t>(cell.network->variant) * 8 +
                             (cell.network->category
                                  ? static_cast<std::uint64_t>(*cell.network->category) + 1
                                  : 0);
  params.seed = Rng::mix(config.seed, salt);

  CommunityReport report = detect(cell.network->graph.graph(), params);
  report.variant = variant_name(cell.network->variant);
  report.category = cell.network->category_label();
  if (config.modularity_mode == ModularityMode::binarized)
    report.modularity_q =
        modularity(cell.network->graph.graph(), report.partition, ModularityMode::binarized);

  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    const std::string stem = cell_stem(*cell.network, cell.algorithm);
    write_graphml(cell.network->graph, &report.partition, (dir / (stem + ".graphml")).string());
    write_communities_csv(cell.network->graph, report,
                          (dir / (stem + ".communities.csv")).string(),
                          (dir / (stem + ".summary.csv")).string());
    write_dot(cell.network->graph, report.partition, (dir / (stem + ".dot")).string());
  }
  return report;
}

}  // namespace

std::vector<CommunityReport> run_pipeline(const PipelineConfig& config) {
  const std::vector<BuiltNetwork> networks = build_networks(config);

  if (!config.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw input_error("cannot create output directory " + config.out_dir);
  }

  // Grid cells in report order: (algorithm, variant, category).
  std::vector<GridCell> cells;
  for (Algorithm algorithm : config.algorithms)
    for (const auto& network : networks) cells.push_back({&network, algorithm});
  std::sort(cells.begin(), cells.end(), [](const GridCell& x, const GridCell& y) {
    if (x.algorithm != y.algorithm) return x.algorithm < y.algorithm;
    if (x.network->variant != y.network->variant) return x.network->variant < y.network->variant;
    const int cx = x.network->category ? static_cast<int>(*x.network->category) : -1;
    const int cy = y.network->category ? static_cast<int>(*y.network->category) : -1;
    return cx < cy;
  });

  std::vector<CommunityReport> reports(cells.size());
  std::vector<std::exception_ptr> failures(cells.size());

  unsigned workers = config.workers > 0 ? config.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, cells.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) reports[i] = run_cell(cells[i], config);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        try {
          reports[i] = run_cell(cells[i], config);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
  }

  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    std::ofstream summary(dir / "summary.csv", std::ios::binary);
    if (!summary) throw input_error("cannot write summary.csv");
    summary << "algorithm,variant,category,modularity,communities\n";
    for (const auto& r : reports)
      summary << csv_quote(r.algorithm) << ',' << csv_quote(r.variant) << ','
              << csv_quote(r.category) << ',' << format_double(r.modularity_q) << ','
              << r.community_count << '\n';
  }
  return reports;
}

}  // namespace copref
