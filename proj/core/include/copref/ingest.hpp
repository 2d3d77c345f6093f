#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace copref {

enum class Sentiment { positive, negative };

enum class Category { scent = 0, longevity = 1, sillage = 2, bottle_design = 3 };

constexpr std::array<Category, 3> kRatedCategories = {Category::scent, Category::longevity,
                                                      Category::sillage};

const char* category_name(Category c);
std::optional<Category> parse_category(std::string name);

/// One user's review of one item. IDs carry their "user_" / "perfume_"
/// prefixes; votes, when present, lie in [1,10].
struct ReviewRecord {
  std::string user_id;
  std::string item_id;
  std::string item_name;  // optional, empty when the input carries no names
  std::string comment;
  std::array<std::optional<int>, 4> votes;  // indexed by Category
  Sentiment base_sentiment = Sentiment::positive;
  bool is_reply = false;

  std::optional<int> vote(Category c) const { return votes[static_cast<int>(c)]; }
};

/// Emoji grapheme cluster -> replacement phrase. Lookup is longest-match-first
/// so multi-codepoint sequences (skin tones, ZWJ, variation selectors) match
/// before their prefixes.
class EmojiDictionary {
public:
  /// Throws std::invalid_argument on duplicate keys or empty key/phrase.
  void add(const std::string& emoji, const std::string& phrase);

  std::size_t size() const { return phrases_.size(); }
  bool empty() const { return phrases_.empty(); }

  /// Longest key matching at `pos` in `text`, or nullptr.
  const std::string* match(const std::string& text, std::size_t pos, std::size_t* key_len) const;

  /// Two-column TSV, emoji TAB phrase, UTF-8. Throws input_error on malformed
  /// lines or duplicate emojis.
  static EmojiDictionary load_tsv(const std::string& path);

private:
  std::unordered_map<std::string, std::string> phrases_;
  std::vector<std::string> keys_by_length_;  // descending byte length
  bool leading_byte_[256] = {};
};

/// Removes every dictionary emoji from the body and appends the matched
/// phrases (in occurrence order, repeats kept) to the end of the text,
/// joined by " و " ("and"). Text without mapped emoji is returned
/// unchanged. Unknown emoji pass through untouched.
std::string map_emojis(const std::string& text, const EmojiDictionary& dict);

/// Sentiment override from a category rating: >=7 positive, <=3 negative,
/// 4..6 or absent leaves the base label unchanged. Throws input_error
/// ("vote out of range") outside [1,10].
Sentiment apply_vote_override(Sentiment base, std::optional<int> rating);

/// Drops all records of items whose total comment count (both sentiments) is
/// <= min_comments_exclusive.
std::vector<ReviewRecord> filter_low_engagement(const std::vector<ReviewRecord>& records,
                                                int min_comments_exclusive = 3);

/// Binary user x item incidence structure (the matrix A). Nodes exist only
/// while incident to at least one pair; duplicate pairs collapse.
class BipartiteGraph {
public:
  void add_incidence(const std::string& user_id, const std::string& item_id,
                     const std::string& item_name = "");

  std::size_t user_count() const { return users_.size(); }
  std::size_t item_count() const { return items_.size(); }
  std::size_t incidence_count() const { return incidences_.size(); }

  const std::vector<std::string>& users() const { return users_; }
  const std::vector<std::string>& items() const { return items_; }
  const std::string& item_name(std::uint32_t item_idx) const;
  /// (user index, item index) pairs in first-insertion order.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& incidences() const {
    return incidences_;
  }

private:
  std::vector<std::string> users_, items_, item_names_;
  std::unordered_map<std::string, std::uint32_t> user_index_, item_index_;
  std::unordered_set<std::uint64_t> seen_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> incidences_;
};

/// Positive-only bipartite graph for one rated category: each record's final
/// sentiment is the vote override of its base label for that category and
/// only Positive records contribute an incidence pair.
BipartiteGraph build_bipartite(const std::vector<ReviewRecord>& records, Category category);

/// Bipartite graph over all records regardless of sentiment (the primary
/// network of the experiment grid).
BipartiteGraph build_bipartite_primary(const std::vector<ReviewRecord>& records);

using TextNormalizer = std::function<std::string(const std::string&)>;

/// Normalizes and emoji-maps every comment in place. The normalizer defaults
/// to identity; pass nullptr dict to skip emoji mapping.
void apply_text_pipeline(std::vector<ReviewRecord>& records, const EmojiDictionary* dict,
                         const TextNormalizer& normalize = {});

struct LoadStats {
  std::size_t rows_read = 0;
  std::size_t rows_missing_id = 0;
  std::size_t rows_duplicate = 0;
};

/// Reads the review CSV (header row: user_id, perfume_id, comment,
/// vote_scent, vote_longevity, vote_sillage, vote_bottle, sentiment,
/// is_reply; an optional perfume_name column is honored). IDs get their
/// "user_"/"perfume_" prefixes, rows with missing ids are dropped, and
/// exact (user, item, comment) duplicates collapse to the first occurrence.
/// Throws input_error on unreadable files or malformed rows (with line
/// numbers).
std::vector<ReviewRecord> load_reviews_csv(const std::string& path, LoadStats* stats = nullptr);

}  // namespace copref
