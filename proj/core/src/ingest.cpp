#include "copref/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "copref/csv.hpp"
#include "copref/errors.hpp"

namespace copref {

namespace {

const char* kPhraseSeparator = " \xd9\x88 ";  // " و " ("and")

std::string to_lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

// Length of the UTF-8 sequence starting at a leading byte.
std::size_t utf8_step(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte; advance one
}

}  // namespace

const char* category_name(Category c) {
  switch (c) {
    case Category::scent: return "scent";
    case Category::longevity: return "longevity";
    case Category::sillage: return "sillage";
    case Category::bottle_design: return "bottle";
  }
  return "?";
}

std::optional<Category> parse_category(std::string name) {
  name = to_lower(std::move(name));
  if (name == "scent") return Category::scent;
  if (name == "longevity") return Category::longevity;
  if (name == "sillage") return Category::sillage;
  if (name == "bottle" || name == "bottledesign" || name == "bottle_design")
    return Category::bottle_design;
  return std::nullopt;
}

void EmojiDictionary::add(const std::string& emoji, const std::string& phrase) {
  if (emoji.empty() || phrase.empty())
    throw std::invalid_argument("emoji dictionary entries must be non-empty");
  auto [it, inserted] = phrases_.emplace(emoji, phrase);
  if (!inserted) throw std::invalid_argument("duplicate emoji dictionary key");
  auto pos = std::lower_bound(keys_by_length_.begin(), keys_by_length_.end(), emoji,
                              [](const std::string& a, const std::string& b) {
                                return a.size() != b.size() ? a.size() > b.size() : a < b;
                              });
  keys_by_length_.insert(pos, emoji);
  leading_byte_[static_cast<unsigned char>(emoji[0])] = true;
}

const std::string* EmojiDictionary::match(const std::string& text, std::size_t pos,
                                          std::size_t* key_len) const {
  if (!leading_byte_[static_cast<unsigned char>(text[pos])]) return nullptr;
  for (const std::string& key : keys_by_length_) {
    if (key.size() <= text.size() - pos && text.compare(pos, key.size(), key) == 0) {
      *key_len = key.size();
      return &phrases_.at(key);
    }
  }
  return nullptr;
}

EmojiDictionary EmojiDictionary::load_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open emoji dictionary: " + path);
  EmojiDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw input_error("malformed emoji dictionary line " + std::to_string(line_no));
    try {
      dict.add(line.substr(0, tab), line.substr(tab + 1));
    } catch (const std::invalid_argument& e) {
      throw input_error(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
  }
  return dict;
}

std::string map_emojis(const std::string& text, const EmojiDictionary& dict) {
  if (dict.empty()) return text;
  std::string body;
  std::vector<const std::string*> phrases;
  body.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t key_len = 0;
    if (const std::string* phrase = dict.match(text, i, &key_len)) {
      phrases.push_back(phrase);
      i += key_len;
      continue;
    }
    const std::size_t step = std::min(utf8_step(static_cast<unsigned char>(text[i])),
                                      text.size() - i);
    body.append(text, i, step);
    i += step;
  }
  if (phrases.empty()) return text;
  std::string out = body;
  if (!out.empty() && out.back() != ' ' && out.back() != '\t' && out.back() != '\n')
    out += ' ';
  for (std::size_t p = 0; p < phrases.size(); ++p) {
    if (p > 0) out += kPhraseSeparator;
    out += *phrases[p];
  }
  return out;
}

Sentiment apply_vote_override(Sentiment base, std::optional<int> rating) {
  if (!rating) return base;
  const int r = *rating;
  if (r < 1 || r > 10) throw input_error("vote out of range: " + std::to_string(r));
  if (r >= 7) return Sentiment::positive;
  if (r <= 3) return Sentiment::negative;
  return base;  // 4..6 is ambiguous; the base label stands
}

std::vector<ReviewRecord> filter_low_engagement(const std::vector<ReviewRecord>& records,
                                                int min_comments_exclusive) {
  std::unordered_map<std::string, int> comment_count;
  for (const auto& r : records) ++comment_count[r.item_id];
  std::vector<ReviewRecord> kept;
  kept.reserve(records.size());
  for (const auto& r : records)
    if (comment_count[r.item_id] > min_comments_exclusive) kept.push_back(r);
  return kept;
}

void BipartiteGraph::add_incidence(const std::string& user_id, const std::string& item_id,
                                   const std::string& item_name) {
  auto user_it = user_index_.find(user_id);
  std::uint32_t u;
  if (user_it == user_index_.end()) {
    u = static_cast<std::uint32_t>(users_.size());
    users_.push_back(user_id);
    user_index_.emplace(user_id, u);
  } else {
    u = user_it->second;
  }
  auto item_it = item_index_.find(item_id);
  std::uint32_t v;
  if (item_it == item_index_.end()) {
    v = static_cast<std::uint32_t>(items_.size());
    items_.push_back(item_id);
    item_names_.push_back(item_name);
    item_index_.emplace(item_id, v);
  } else {
    v = item_it->second;
    if (item_names_[v].empty() && !item_name.empty()) item_names_[v] = item_name;
  }
  const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
  if (seen_.insert(key).second) incidences_.emplace_back(u, v);
}

const std::string& BipartiteGraph::item_name(std::uint32_t item_idx) const {
  return item_names_[item_idx].empty() ? items_[item_idx] : item_names_[item_idx];
}

BipartiteGraph build_bipartite(const std::vector<ReviewRecord>& records, Category category) {
  BipartiteGraph bip;
  for (const auto& r : records) {
    if (apply_vote_override(r.base_sentiment, r.vote(category)) == Sentiment::positive)
      bip.add_incidence(r.user_id, r.item_id, r.item_name);
  }
  return bip;
}

BipartiteGraph build_bipartite_primary(const std::vector<ReviewRecord>& records) {
  BipartiteGraph bip;
  for (const auto& r : records) bip.add_incidence(r.user_id, r.item_id, r.item_name);
  return bip;
}

void apply_text_pipeline(std::vector<ReviewRecord>& records, const EmojiDictionary* dict,
                         const TextNormalizer& normalize) {
  for (auto& r : records) {
    if (normalize) r.comment = normalize(r.comment);
    if (dict) r.comment = map_emojis(r.comment, *dict);
  }
}

namespace {

std::string with_prefix(const std::string& raw, const char* prefix) {
  if (raw.compare(0, std::string::traits_type::length(prefix), prefix) == 0) return raw;
  return prefix + raw;
}

std::optional<int> parse_vote(const std::string& cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
  } catch (const std::exception&) {
    throw input_error("malformed vote '" + cell + "' at line " + std::to_string(line));
  }
  if (value < 1 || value > 10)
    throw input_error("vote out of range at line " + std::to_string(line));
  return value;
}

}  // namespace

std::vector<ReviewRecord> load_reviews_csv(const std::string& path, LoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open input: " + path);
  CsvReader reader(in);

  std::vector<std::string> header;
  if (!reader.next(header)) throw input_error("no records: " + path);

  std::unordered_map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header.size(); ++i) columns[to_lower(header[i])] = i;
  const char* required[] = {"user_id",      "perfume_id",    "comment",
                            "vote_scent",   "vote_longevity", "vote_sillage",
                            "vote_bottle",  "sentiment",     "is_reply"};
  for (const char* name : required)
    if (!columns.count(name)) throw input_error(std::string("missing column: ") + name);
  const bool has_names = columns.count("perfume_name") != 0;

  auto cell = [&](const std::vector<std::string>& row, const char* name) -> const std::string& {
    return row[columns.at(name)];
  };

  std::vector<ReviewRecord> records;
  std::unordered_set<std::string> dedup;
  std::vector<std::string> row;
  LoadStats local;
  while (reader.next(row)) {
    const std::size_t line = reader.record_line();
    if (row.size() == 1 && row[0].empty()) continue;  // blank trailing line
    if (row.size() < header.size())
      throw input_error("malformed CSV row at line " + std::to_string(line));
    ++local.rows_read;

    ReviewRecord rec;
    const std::string& raw_user = cell(row, "user_id");
    const std::string& raw_item = cell(row, "perfume_id");
    if (raw_user.empty() || raw_item.empty()) {
      ++local.rows_missing_id;
      continue;
    }
    rec.user_id = with_prefix(raw_user, "user_");
    rec.item_id = with_prefix(raw_item, "perfume_");
    rec.comment = cell(row, "comment");
    if (has_names) rec.item_name = cell(row, "perfume_name");

    rec.votes[0] = parse_vote(cell(row, "vote_scent"), line);
    rec.votes[1] = parse_vote(cell(row, "vote_longevity"), line);
    rec.votes[2] = parse_vote(cell(row, "vote_sillage"), line);
    rec.votes[3] = parse_vote(cell(row, "vote_bottle"), line);

    const std::string sentiment = to_lower(cell(row, "sentiment"));
    if (sentiment == "positive") rec.base_sentiment = Sentiment::positive;
    else if (sentiment == "negative") rec.base_sentiment = Sentiment::negative;
    else throw input_error("unknown sentiment '" + cell(row, "sentiment") + "' at line " +
                           std::to_string(line));

    const std::string& reply = cell(row, "is_reply");
    if (reply == "0" || reply.empty()) rec.is_reply = false;
    else if (reply == "1") rec.is_reply = true;
    else throw input_error("is_reply must be 0 or 1 at line " + std::to_string(line));

    // Exact (user, item, comment) duplicates collapse to the first occurrence.
    std::string key = rec.user_id;
    key += '\x1f';
    key += rec.item_id;
    key += '\x1f';
    key += rec.comment;
    if (!dedup.insert(std::move(key)).second) {
      ++local.rows_duplicate;
      continue;
    }
    records.push_back(std::move(rec));
  }
  if (stats) *stats = local;
  return records;
}

}  // namespace copref
