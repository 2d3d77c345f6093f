#include "copref/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "copref/csv.hpp"
#include "copref/errors.hpp"

namespace copref {

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    auto end = s.find(';', i);
    if (end == std::string::npos) throw input_error("bad XML entity");
    const std::string entity = s.substr(i, end - i + 1);
    if (entity == "&amp;") out += '&';
    else if (entity == "&lt;") out += '<';
    else if (entity == "&gt;") out += '>';
    else if (entity == "&quot;") out += '"';
    else if (entity == "&apos;") out += '\'';
    else throw input_error("unknown XML entity " + entity);
    i = end + 1;
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write: " + path);
  return out;
}

}  // namespace

void write_graphml(const CoPreferenceGraph& graph, const Partition* partition,
                   const std::string& path) {
  const auto& g = graph.graph();
  if (partition && partition->size() != g.node_count())
    throw std::invalid_argument("partition does not cover the graph");

  auto out = open_output(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"d0\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n";
  if (partition)
    out << "  <key id=\"d1\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n";
  out << "  <key id=\"d2\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <key id=\"d3\" for=\"edge\" attr.name=\"raw_count\" attr.type=\"int\"/>\n"
      << "  <graph id=\"G\" edgedefault=\"undirected\">\n";

  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    out << "    <node id=\"" << xml_escape(g.node_id(i)) << "\">\n"
        << "      <data key=\"d0\">" << xml_escape(g.display_name(i)) << "</data>\n";
    if (partition) out << "      <data key=\"d1\">" << partition->label(i) << "</data>\n";
    out << "    </node>\n";
  }

  std::vector<WeightedGraph::Edge> edges = g.edges();
  std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  for (const auto& e : edges) {
    out << "    <edge source=\"" << xml_escape(g.node_id(e.a)) << "\" target=\""
        << xml_escape(g.node_id(e.b)) << "\">\n"
        << "      <data key=\"d2\">" << format_double(e.weight) << "</data>\n"
        << "      <data key=\"d3\">" << graph.raw_count(e.a, e.b) << "</data>\n"
        << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  if (!out) throw input_error("write failed: " + path);
}

namespace {

// Tiny pull-parser over the GraphML subset written above: tags with quoted
// attributes and text content, no CDATA or comments.
class XmlScanner {
public:
  explicit XmlScanner(std::string text) : text_(std::move(text)) {}

  struct Tag {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    bool closing = false;
    bool self_closing = false;
  };

  // Advances to the next tag; text content between tags lands in `text`.
  bool next(Tag& tag, std::string& text) {
    text.clear();
    auto lt = text_.find('<', pos_);
    if (lt == std::string::npos) return false;
    text = text_.substr(pos_, lt - pos_);
    auto gt = text_.find('>', lt);
    if (gt == std::string::npos) throw input_error("unterminated tag");
    std::string body = text_.substr(lt + 1, gt - lt - 1);
    pos_ = gt + 1;

    tag = Tag{};
    if (!body.empty() && body[0] == '?') {  // declaration
      return next(tag, text);
    }
    if (!body.empty() && body[0] == '/') {
      tag.closing = true;
      body.erase(0, 1);
    }
    if (!body.empty() && body.back() == '/') {
      tag.self_closing = true;
      body.pop_back();
    }
    std::size_t i = 0;
    while (i < body.size() && !isspace(static_cast<unsigned char>(body[i]))) ++i;
    tag.name = body.substr(0, i);
    while (i < body.size()) {
      while (i < body.size() && isspace(static_cast<unsigned char>(body[i]))) ++i;
      if (i >= body.size()) break;
      auto eq = body.find('=', i);
      if (eq == std::string::npos) throw input_error("malformed attribute in <" + tag.name + ">");
      std::string key = body.substr(i, eq - i);
      auto quote = body.find('"', eq);
      if (quote == std::string::npos) throw input_error("malformed attribute value");
      auto endq = body.find('"', quote + 1);
      if (endq == std::string::npos) throw input_error("malformed attribute value");
      tag.attrs.emplace_back(key, xml_unescape(body.substr(quote + 1, endq - quote - 1)));
      i = endq + 1;
    }
    return true;
  }

private:
  std::string text_;
  std::size_t pos_ = 0;
};

std::string attr_of(const XmlScanner::Tag& tag, const std::string& key) {
  for (const auto& [k, v] : tag.attrs)
    if (k == key) return v;
  throw input_error("missing attribute " + key + " in <" + tag.name + ">");
}

}  // namespace

GraphmlData read_graphml(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open graphml: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  XmlScanner scanner(buffer.str());

  GraphmlData result;
  // attribute key id -> attr.name
  std::vector<std::pair<std::string, std::string>> keys;
  auto key_name = [&](const std::string& id) -> std::string {
    for (const auto& [k, v] : keys)
      if (k == id) return v;
    throw input_error("unknown data key " + id);
  };

  std::vector<std::uint32_t> labels;
  bool has_labels = false;

  XmlScanner::Tag tag;
  std::string text;
  std::string current_node, edge_source, edge_target;
  bool in_node = false, in_edge = false;
  std::string node_name;
  std::optional<std::uint32_t> node_community;
  double edge_w = 0.0;
  int edge_count_attr = 0;

  while (scanner.next(tag, text)) {
    if (tag.closing) {
      if (tag.name == "node") {
        auto& g = result.graph;
        g.add_item(current_node, node_name == current_node ? "" : node_name);
        if (node_community) {
          labels.push_back(*node_community);
          has_labels = true;
        } else {
          labels.push_back(0);
        }
        in_node = false;
      } else if (tag.name == "edge") {
        const auto a = result.graph.graph().index_of(edge_source);
        const auto b = result.graph.graph().index_of(edge_target);
        result.graph.add_edge(a, b, edge_w, edge_count_attr);
        in_edge = false;
      }
      continue;
    }
    if (tag.name == "key") {
      keys.emplace_back(attr_of(tag, "id"), attr_of(tag, "attr.name"));
    } else if (tag.name == "node") {
      current_node = attr_of(tag, "id");
      node_name = current_node;
      node_community.reset();
      in_node = true;
      if (tag.self_closing) {
        result.graph.add_item(current_node);
        labels.push_back(0);
        in_node = false;
      }
    } else if (tag.name == "edge") {
      edge_source = attr_of(tag, "source");
      edge_target = attr_of(tag, "target");
      edge_w = 1.0;
      edge_count_attr = 1;
      in_edge = true;
    } else if (tag.name == "data") {
      const std::string name = key_name(attr_of(tag, "key"));
      XmlScanner::Tag closer;
      std::string value;
      if (!scanner.next(closer, value) || !closer.closing || closer.name != "data")
        throw input_error("malformed <data> element");
      value = xml_unescape(value);
      if (in_node) {
        if (name == "name") node_name = value;
        else if (name == "community") node_community = std::stoul(value);
      } else if (in_edge) {
        if (name == "weight") edge_w = std::stod(value);
        else if (name == "raw_count") edge_count_attr = std::stoi(value);
      }
    }
  }

  if (has_labels) result.partition = Partition(std::move(labels));
  return result;
}

void write_communities_csv(const CoPreferenceGraph& graph, const CommunityReport& report,
                           const std::string& rows_path, const std::string& summary_path) {
  const auto& g = graph.graph();
  if (report.partition.size() != g.node_count())
    throw std::invalid_argument("partition does not cover the graph");

  std::vector<std::uint32_t> order(g.node_count());
  for (std::uint32_t i = 0; i < g.node_count(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    if (report.partition.label(x) != report.partition.label(y))
      return report.partition.label(x) < report.partition.label(y);
    return g.node_id(x) < g.node_id(y);
  });

  auto rows = open_output(rows_path);
  rows << "community_id,perfume_id,perfume_name\n";
  for (std::uint32_t i : order)
    rows << report.partition.label(i) << ',' << csv_quote(g.node_id(i)) << ','
         << csv_quote(g.display_name(i)) << '\n';
  if (!rows) throw input_error("write failed: " + rows_path);

  auto summary = open_output(summary_path);
  summary << "algorithm,variant,category,modularity,communities\n";
  summary << csv_quote(report.algorithm) << ',' << csv_quote(report.variant) << ','
          << csv_quote(report.category) << ',' << format_double(report.modularity_q) << ','
          << report.community_count << '\n';
  if (!summary) throw input_error("write failed: " + summary_path);
}

std::vector<std::pair<std::string, std::uint32_t>> read_communities_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open communities: " + path);
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw input_error("empty communities file: " + path);

  std::vector<std::pair<std::string, std::uint32_t>> result;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() < 2)
      throw input_error("malformed communities row at line " +
                        std::to_string(reader.record_line()));
    try {
      result.emplace_back(row[1], static_cast<std::uint32_t>(std::stoul(row[0])));
    } catch (const std::exception&) {
      throw input_error("malformed community id at line " + std::to_string(reader.record_line()));
    }
  }
  return result;
}

namespace {

// Paired qualitative palette, cycled when a partition has more communities.
const char* kPalette[32] = {
    "#a6cee3", "#1f78b4", "#b2df8a", "#33a02c", "#fb9a99", "#e31a1c", "#fdbf6f", "#ff7f00",
    "#cab2d6", "#6a3d9a", "#ffff99", "#b15928", "#8dd3c7", "#ffffb3", "#bebada", "#fb8072",
    "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

void write_dot(const CoPreferenceGraph& graph, const Partition& partition,
               const std::string& path) {
  const auto& g = graph.graph();
  if (partition.size() != g.node_count())
    throw std::invalid_argument("partition does not cover the graph");

  auto out = open_output(path);
  out << "graph copreference {\n  node [style=filled];\n";
  for (std::uint32_t i = 0; i < g.node_count(); ++i)
    out << "  \"" << dot_escape(g.node_id(i)) << "\" [label=\"" << dot_escape(g.display_name(i))
        << "\", fillcolor=\"" << kPalette[partition.label(i) % 32] << "\"];\n";

  std::vector<WeightedGraph::Edge> edges = g.edges();
  std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  for (const auto& e : edges)
    out << "  \"" << dot_escape(g.node_id(e.a)) << "\" -- \"" << dot_escape(g.node_id(e.b))
        << "\" [weight=" << format_double(e.weight) << "];\n";
  out << "}\n";
  if (!out) throw input_error("write failed: " + path);
}

}  // namespace copref
