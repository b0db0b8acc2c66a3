#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "komohe/crosswalk_store.hpp"

namespace komohe::skos {

inline constexpr std::string_view kNamespace =
    "http://www.w3.org/2004/02/skos/core#";
inline constexpr std::string_view kUriPrefix = "urn:kos:";

/// Full predicate URI for a non-NULL relation.
std::string predicate_uri(RelationType relation);
std::optional<RelationType> relation_from_predicate(std::string_view uri);

/// Percent-encodes every byte outside the RFC 3986 unreserved set.
std::string percent_encode(std::string_view text);
/// Throws kFormat on a malformed escape.
std::string percent_decode(std::string_view text);

/// urn:kos:<vocab>:<term>, both parts percent-encoded.
std::string concept_uri(std::string_view vocab, std::string_view normalized_term);

struct ConceptRef {
  std::string vocab;
  std::string term;
};
std::optional<ConceptRef> parse_concept_uri(std::string_view uri);

struct ExportReport {
  std::size_t triples = 0;
  std::size_t skipped_null = 0;
  std::size_t skipped_combination = 0;
  /// Emitted mappings whose rating was dropped.
  std::size_t ratings_dropped = 0;
};

/// N-Triples, one line per single-target non-NULL mapping, sorted.
ExportReport export_skos(const Store& store, std::span<const CrosswalkId> crosswalks,
                         std::ostream& out);

struct ImportReport {
  std::size_t mappings_added = 0;
  std::vector<LineError> errors;
  std::vector<LineError> warnings;
};

/// Reads triples whose subjects live in source_vocab and objects in
/// target_vocab. Unknown vocabularies and terms are registered; mappings get
/// no rating. Unknown predicates produce warnings, malformed lines errors.
ImportReport import_skos(Store& store, std::istream& in,
                         const std::string& source_vocab,
                         const std::string& target_vocab);

}  // namespace komohe::skos
