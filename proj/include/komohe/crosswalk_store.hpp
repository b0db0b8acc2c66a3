#pragma once

#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "komohe/registry.hpp"

namespace komohe {

/// Relation from a source term to its target concept. BroaderTarget ("<")
/// means the target is broader than the source.
enum class RelationType {
  kEquivalent,      // =
  kBroaderTarget,   // <
  kNarrowerTarget,  // >
  kAssociation,     // ^
  kNull,            // 0
};

inline constexpr RelationType kAllRelations[] = {
    RelationType::kEquivalent, RelationType::kBroaderTarget,
    RelationType::kNarrowerTarget, RelationType::kAssociation,
    RelationType::kNull};

std::string_view symbol(RelationType relation);
std::optional<RelationType> parse_relation(std::string_view symbol);

/// Parses a comma-separated list of relation symbols ("=,^"). Throws
/// kInvalidArgument on an unknown symbol.
std::set<RelationType> parse_relation_list(std::string_view list);

/// Ordered so that comparisons implement HIGH > MEDIUM > LOW. Unrated sorts
/// below every rating and never satisfies a minimum-rating filter.
enum class Rating { kUnrated = 0, kLow = 1, kMedium = 2, kHigh = 3 };

std::string_view to_string(Rating rating);
std::optional<Rating> parse_rating(std::string_view text);

/// A single controlled term or an ordered combination of two or more terms.
/// Members are always stored normalized.
class Concept {
 public:
  static Concept single(std::string_view term);
  static Concept combination(const std::vector<std::string>& terms);
  /// Single for one term, combination for more.
  static Concept of(const std::vector<std::string>& terms);

  bool is_single() const { return terms_.size() == 1; }
  bool is_combination() const { return terms_.size() > 1; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term() const { return terms_.front(); }

  /// Members joined with " + ".
  std::string key() const;

  friend auto operator<=>(const Concept&, const Concept&) = default;

 private:
  explicit Concept(std::vector<std::string> terms) : terms_(std::move(terms)) {}

  std::vector<std::string> terms_;
};

inline constexpr std::string_view kCombinationSeparator = " + ";

struct Mapping {
  Concept source;
  RelationType relation = RelationType::kEquivalent;
  std::optional<Concept> target;
  Rating rating = Rating::kUnrated;

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

/// Throws kInvalidMapping when the NULL/target pairing or source arity is
/// wrong.
void validate(const Mapping& mapping);

struct CrosswalkId {
  std::string source;
  std::string target;

  /// "source-target"
  std::string to_string() const;

  friend auto operator<=>(const CrosswalkId&, const CrosswalkId&) = default;
};

using MappingId = std::size_t;

struct MappingHit {
  CrosswalkId crosswalk;
  MappingId id = 0;
  Mapping mapping;
};

struct LookupFilter {
  std::optional<std::string> source_vocab;
  std::optional<std::set<RelationType>> relations;
  std::optional<Rating> min_rating;
  std::optional<std::set<std::string>> target_vocabs;
};

struct CrosswalkStats {
  std::size_t mapping_count = 0;
  std::map<RelationType, std::size_t> by_relation;
  std::map<Rating, std::size_t> by_rating;

  friend bool operator==(const CrosswalkStats&, const CrosswalkStats&) = default;
};

/// In-memory cross-concordance store. Not internally synchronized; share it
/// through SharedStore when readers and writers run concurrently.
class Store {
 public:
  Registry& registry() { return registry_; }
  const Registry& registry() const { return registry_; }

  /// Both vocabularies must be registered and distinct.
  CrosswalkId add_crosswalk(std::string_view source, std::string_view target);
  bool has_crosswalk(const CrosswalkId& id) const;
  std::vector<CrosswalkId> crosswalks() const;

  /// Resolves "A-B". Vocabulary ids may contain '-', so every split point is
  /// tried against existing crosswalks.
  CrosswalkId resolve_crosswalk(std::string_view text) const;

  MappingId add_mapping(const CrosswalkId& crosswalk, Mapping mapping);

  const Mapping& mapping(MappingId id) const { return entries_.at(id).mapping; }
  const CrosswalkId& crosswalk_of(MappingId id) const;
  std::size_t mapping_count() const { return entries_.size(); }

  /// Mapping ids of one crosswalk in insertion order.
  std::span<const MappingId> crosswalk_mappings(const CrosswalkId& id) const;

  std::vector<MappingHit> mappings_from(std::string_view term,
                                        const LookupFilter& filter = {}) const;
  std::vector<MappingHit> mappings_to(
      std::string_view term,
      const std::optional<std::string>& target_vocab = std::nullopt) const;

  std::map<CrosswalkId, CrosswalkStats> stats() const;

 private:
  struct Crosswalk {
    CrosswalkId id;
    std::vector<MappingId> mappings;
    std::unordered_set<std::string> triples;
  };
  struct Entry {
    std::size_t crosswalk;
    Mapping mapping;
  };

  const Crosswalk& crosswalk(const CrosswalkId& id) const;
  std::vector<MappingHit> collect(std::vector<MappingId> ids) const;

  Registry registry_;
  std::vector<Crosswalk> crosswalks_;
  std::map<CrosswalkId, std::size_t> crosswalk_index_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::vector<MappingId>> by_source_;
  std::unordered_map<std::string, std::vector<MappingId>> by_target_;
};

// Cross-concordance TSV exchange format.

inline constexpr std::string_view kTsvHeader = "#komohe-tsv v1";

struct LineError {
  std::size_t line = 0;
  std::string reason;

  friend bool operator==(const LineError&, const LineError&) = default;
};

struct TsvImportReport {
  std::size_t crosswalks_created = 0;
  std::size_t mappings_added = 0;
  std::vector<LineError> errors;
};

/// Unknown vocabularies and terms are registered on the fly. Malformed lines
/// are reported and skipped. Throws kFormat for a missing or wrong header.
TsvImportReport import_tsv(Store& store, std::istream& in);

/// Writes the header and one block per crosswalk, rows ordered by source
/// term then insertion order. Throws kNotFound for an unknown crosswalk.
void export_tsv(const Store& store, std::span<const CrosswalkId> crosswalks,
                std::ostream& out);

/// Every mapping in id order, with a block comment whenever the crosswalk
/// changes. Importing the result into an empty store reproduces the ids.
void dump_tsv(const Store& store, std::ostream& out);

/// One data row (no trailing newline) using the registry's display forms.
std::string format_tsv_row(const Store& store, const CrosswalkId& crosswalk,
                           const Mapping& mapping);

}  // namespace komohe
