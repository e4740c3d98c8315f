#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdbench/error.hpp"
#include "hdbench/random.hpp"
#include "hdbench/textfeat.hpp"
#include "json.hpp"

namespace hdbench::prep {

struct LabeledText {
  std::string text;
  int label = 0;

  friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

// Produces one label-preserving paraphrase per call; throws on failure.
class Augmenter {
public:
  virtual ~Augmenter() = default;
  virtual std::string paraphrase(const std::string& text, Rng& rng) = 0;
};

struct AugmentResult {
  std::vector<LabeledText> items;
  std::size_t failures = 0;
};

/// Each input is followed by `factor - 1` paraphrases carrying its label.
/// A failed paraphrase is skipped and counted, never fatal.
inline AugmentResult augment(std::span<const LabeledText> texts, Augmenter& augmenter, std::size_t factor,
                             std::uint64_t seed) {
  require(factor >= 1, "augmentation factor must be >= 1");
  AugmentResult out;
  out.items.reserve(texts.size() * factor);
  Rng rng(seed);
  for (const auto& item : texts) {
    out.items.push_back(item);
    for (std::size_t k = 1; k < factor; ++k) {
      try {
        out.items.push_back({augmenter.paraphrase(item.text, rng), item.label});
      } catch (const std::exception&) {
        ++out.failures;
      }
    }
  }
  return out;
}

/// Deterministic test augmenter: each whitespace-separated word with an entry
/// in the synonym map is replaced, with probability `rate`, by a seeded pick
/// among its synonyms. Lookup is on the lowercased word.
class SynonymAugmenter : public Augmenter {
public:
  using SynonymMap = std::unordered_map<std::string, std::vector<std::string>>;

  explicit SynonymAugmenter(SynonymMap synonyms, double rate = 0.5) : synonyms_(std::move(synonyms)), rate_(rate) {}

  std::string paraphrase(const std::string& text, Rng& rng) override {
    std::istringstream words(text);
    std::string word, out;
    while (words >> word) {
      auto it = synonyms_.find(text::lowercase(word));
      if (it != synonyms_.end() && !it->second.empty() && rng.uniform() < rate_) {
        word = it->second[rng.below(it->second.size())];
      }
      if (!out.empty()) out += ' ';
      out += word;
    }
    return out;
  }

private:
  SynonymMap synonyms_;
  double rate_;
};

// Translation service transport: request {"text","source","pivot"} -> response {"text"}.
using TranslationTransport = std::function<nlohmann::json(const nlohmann::json& request)>;

/// Round-trip translation through a pivot language over a pluggable transport.
class BacktranslationAugmenter : public Augmenter {
public:
  BacktranslationAugmenter(TranslationTransport transport, std::string source = "es", std::string pivot = "en")
      : transport_(std::move(transport)), source_(std::move(source)), pivot_(std::move(pivot)) {}

  std::string paraphrase(const std::string& text, Rng&) override {
    const std::string forward = translate(text, source_, pivot_);
    return translate(forward, pivot_, source_);
  }

private:
  std::string translate(const std::string& text, const std::string& from, const std::string& to) const {
    const nlohmann::json response = transport_({{"text", text}, {"source", from}, {"pivot", to}});
    if (!response.is_object() || !response.contains("text") || !response["text"].is_string()) {
      throw DataError("translation response lacks a string 'text' field");
    }
    return response["text"].get<std::string>();
  }

  TranslationTransport transport_;
  std::string source_;
  std::string pivot_;
};

}  // namespace hdbench::prep
