#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <locale>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hdbench/dataio/tabular.hpp"
#include "hdbench/error.hpp"
#include "json.hpp"

namespace hdbench::text {

/// Sparse vector with strictly increasing indices and no explicit zeros.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::size_t, double>> entries;

  std::size_t nnz() const { return entries.size(); }

  double get(std::size_t index) const {
    for (const auto& [i, v] : entries) {
      if (i == index) return v;
      if (i > index) break;
    }
    return 0.0;
  }

  std::vector<double> to_dense() const {
    std::vector<double> out(dim, 0.0);
    for (const auto& [i, v] : entries) out[i] = v;
    return out;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline nlohmann::json to_json(const SparseVector& v) {
  std::vector<std::size_t> idx;
  std::vector<double> val;
  for (const auto& [i, x] : v.entries) {
    idx.push_back(i);
    val.push_back(x);
  }
  return {{"dim", v.dim}, {"idx", idx}, {"val", val}};
}

inline SparseVector sparse_from_json(const nlohmann::json& j) {
  SparseVector v;
  v.dim = j.at("dim").get<std::size_t>();
  const auto idx = j.at("idx").get<std::vector<std::size_t>>();
  const auto val = j.at("val").get<std::vector<double>>();
  if (idx.size() != val.size()) throw DataError("idx and val lengths differ");
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= v.dim || (k > 0 && idx[k] <= idx[k - 1])) throw DataError("sparse indices must increase within dim");
    if (val[k] != 0.0) v.entries.emplace_back(idx[k], val[k]);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Tokenization

namespace detail {

// Character classes and lowercase mapping from the C.UTF-8 locale. When that
// locale is unavailable, ASCII is classified directly and every non-ASCII
// code point counts as a letter with no case mapping.
class CharClasses {
public:
  CharClasses() {
    try {
      locale_ = std::locale("C.UTF-8");
      facet_ = &std::use_facet<std::ctype<wchar_t>>(locale_);
    } catch (const std::runtime_error&) {
      facet_ = nullptr;
    }
  }

  bool is_word(char32_t c) const {
    if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (c == 0xFFFD) return false;
    return facet_ ? facet_->is(std::ctype_base::alnum, static_cast<wchar_t>(c)) : true;
  }

  char32_t lower(char32_t c) const {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    return facet_ ? static_cast<char32_t>(facet_->tolower(static_cast<wchar_t>(c))) : c;
  }

  static const CharClasses& instance() {
    static const CharClasses classes;
    return classes;
  }

private:
  std::locale locale_;
  const std::ctype<wchar_t>* facet_ = nullptr;
};

// Decodes one code point; malformed sequences yield U+FFFD and consume a byte.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const int c = cont(static_cast<std::size_t>(k));
    if (c < 0) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | static_cast<char32_t>(c);
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace detail

/// Lowercases, splits on maximal runs of non-(letter|digit) code points, and
/// drops tokens shorter than two code points.
inline std::vector<std::string> tokenize(std::string_view text) {
  const auto& classes = detail::CharClasses::instance();
  std::vector<std::string> tokens;
  std::string current;
  std::size_t length = 0;
  auto flush = [&] {
    if (length >= 2) tokens.push_back(current);
    current.clear();
    length = 0;
  };
  for (std::size_t i = 0; i < text.size();) {
    const char32_t cp = detail::next_code_point(text, i);
    if (classes.is_word(cp)) {
      detail::append_utf8(current, classes.lower(cp));
      ++length;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

// Code-point-wise lowercase of UTF-8 text.
inline std::string lowercase(std::string_view text) {
  const auto& classes = detail::CharClasses::instance();
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) detail::append_utf8(out, classes.lower(detail::next_code_point(text, i)));
  return out;
}

using Stoplist = std::unordered_set<std::string>;

inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.contains(t)) out.push_back(t);
  }
  return out;
}

// One token per line; blank lines and surrounding whitespace ignored.
inline Stoplist read_stoplist(std::istream& in) {
  Stoplist out;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = hdbench::detail::trim(line);
    if (!t.empty()) out.emplace(t);
  }
  return out;
}

inline const Stoplist& default_english_stoplist() {
  static const Stoplist kWords = {
      "a",     "about", "after", "again", "all",   "an",    "and",   "any",   "are",   "as",    "at",
      "be",    "been",  "before", "being", "but",  "by",    "can",   "could", "did",   "do",    "does",
      "during", "each", "for",   "from",  "had",   "has",   "have",  "he",    "her",   "here",  "him",
      "his",   "how",   "if",    "in",    "into",  "is",    "it",    "its",   "just",  "me",    "more",
      "most",  "my",    "no",    "nor",   "not",   "of",    "off",   "on",    "once",  "only",  "or",
      "other", "our",   "out",   "over",  "own",   "same",  "she",   "should", "so",   "some",  "such",
      "than",  "that",  "the",   "their", "them",  "then",  "there", "these", "they",  "this",  "those",
      "through", "to",  "too",   "under", "until", "up",    "very",  "was",   "we",    "were",  "what",
      "when",  "where", "which", "while", "who",   "whom",  "why",   "will",  "with",  "would", "you",
      "your"};
  return kWords;
}

// ---------------------------------------------------------------------------
// Hashed term frequencies and IDF

inline constexpr std::size_t kDefaultHashDim = 5000;

// 64-bit FNV-1a over the token's UTF-8 bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::size_t hash_index(std::string_view token, std::size_t dim) {
  return static_cast<std::size_t>(fnv1a64(token) % dim);
}

// Raw occurrence counts at fnv1a64(token) mod dim; colliding tokens share a slot.
inline SparseVector hashed_tf(const std::vector<std::string>& tokens, std::size_t dim = kDefaultHashDim) {
  require(dim >= 1, "hash dimension must be >= 1");
  std::map<std::size_t, double> counts;
  for (const auto& t : tokens) counts[hash_index(t, dim)] += 1.0;
  SparseVector v{dim, {}};
  v.entries.assign(counts.begin(), counts.end());
  return v;
}

struct IdfModel {
  std::size_t dim = 0;
  std::size_t num_docs = 0;
  std::vector<std::size_t> doc_freq;
  std::size_t min_doc_freq = 0;
  std::vector<double> idf;
};

/// idf[j] = ln((N+1)/(df[j]+1)), or 0 where df[j] < min_doc_freq.
inline IdfModel idf_fit(std::span<const SparseVector> corpus, std::size_t min_doc_freq) {
  if (corpus.empty()) throw ConfigError("idf_fit needs a non-empty corpus");
  IdfModel m;
  m.dim = corpus.front().dim;
  m.num_docs = corpus.size();
  m.min_doc_freq = min_doc_freq;
  m.doc_freq.assign(m.dim, 0);
  for (const auto& doc : corpus) {
    if (doc.dim != m.dim) throw DataError("corpus vectors have differing dimensions");
    for (const auto& [i, v] : doc.entries) {
      if (v != 0.0) ++m.doc_freq[i];
    }
  }
  m.idf.assign(m.dim, 0.0);
  const double n1 = static_cast<double>(m.num_docs) + 1.0;
  for (std::size_t j = 0; j < m.dim; ++j) {
    if (m.doc_freq[j] >= min_doc_freq) m.idf[j] = std::log(n1 / (static_cast<double>(m.doc_freq[j]) + 1.0));
  }
  return m;
}

inline SparseVector idf_transform(const IdfModel& model, const SparseVector& tf) {
  if (tf.dim != model.dim) {
    throw DataError("vector dim " + std::to_string(tf.dim) + " does not match idf dim " + std::to_string(model.dim));
  }
  SparseVector out{tf.dim, {}};
  for (const auto& [i, v] : tf.entries) {
    const double w = v * model.idf[i];
    if (w != 0.0) out.entries.emplace_back(i, w);
  }
  return out;
}

/// Appends named numerics after the text block: numeric j lands at
/// text.dim + j. Zero numerics are implicit.
inline SparseVector assemble(const SparseVector& text_vec, const std::vector<std::pair<std::string, double>>& numerics) {
  SparseVector out = text_vec;
  out.dim = text_vec.dim + numerics.size();
  for (std::size_t j = 0; j < numerics.size(); ++j) {
    const double v = numerics[j].second;
    if (!std::isfinite(v)) throw DataError("numeric '" + numerics[j].first + "' is not finite");
    if (v != 0.0) out.entries.emplace_back(text_vec.dim + j, v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon sentiment

enum class Polarity { pos, neg };
enum class Sentiment { positive, negative, neutral };

inline std::string to_string(Sentiment s) {
  switch (s) {
    case Sentiment::positive: return "positive";
    case Sentiment::negative: return "negative";
    default: return "neutral";
  }
}

using Lexicon = std::unordered_map<std::string, Polarity>;

inline Sentiment sentiment_tag(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  std::size_t pos = 0, neg = 0;
  for (const auto& t : tokens) {
    auto it = lexicon.find(t);
    if (it == lexicon.end()) continue;
    (it->second == Polarity::pos ? pos : neg) += 1;
  }
  if (pos > neg) return Sentiment::positive;
  if (neg > pos) return Sentiment::negative;
  return Sentiment::neutral;
}

// Lines `token,pos` or `token,neg`.
inline Lexicon read_lexicon(std::istream& in) {
  Lexicon out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = hdbench::detail::trim(line);
    if (t.empty()) continue;
    const auto comma = t.rfind(',');
    if (comma == std::string_view::npos) throw DataError("lexicon line " + std::to_string(line_no) + ": missing ','");
    const auto token = hdbench::detail::trim(t.substr(0, comma));
    const auto tag = hdbench::detail::trim(t.substr(comma + 1));
    if (tag == "pos") {
      out[std::string(token)] = Polarity::pos;
    } else if (tag == "neg") {
      out[std::string(token)] = Polarity::neg;
    } else {
      throw DataError("lexicon line " + std::to_string(line_no) + ": tag must be pos or neg");
    }
  }
  return out;
}

struct SentimentDistribution {
  std::size_t positive = 0, negative = 0, neutral = 0;

  std::size_t total() const { return positive + negative + neutral; }
  double percent(Sentiment s) const {
    if (total() == 0) return 0.0;
    const std::size_t c = s == Sentiment::positive ? positive : s == Sentiment::negative ? negative : neutral;
    return 100.0 * static_cast<double>(c) / static_cast<double>(total());
  }
  void add(Sentiment s) { (s == Sentiment::positive ? positive : s == Sentiment::negative ? negative : neutral) += 1; }
};

// ---------------------------------------------------------------------------
// all_text

inline const std::vector<std::string>& default_all_text_columns() {
  static const std::vector<std::string> kColumns = {"title",  "genre",  "director",   "writer",
                                                    "production_company", "actors", "description"};
  return kColumns;
}

// Single-space join of the present, non-empty cells in the given order.
inline std::string build_all_text(const TabularFrame& frame, std::size_t row, const std::vector<std::string>& columns) {
  std::string out;
  for (const auto& name : columns) {
    const auto cell = frame.text(row, frame.index_of(name));
    if (!cell || cell->empty()) continue;
    if (!out.empty()) out += ' ';
    out += *cell;
  }
  return out;
}

}  // namespace hdbench::text
