#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "komohe/crosswalk_store.hpp"

namespace komohe {

/// Relation implied by chaining a->b (first) and b->c (second), or nullopt
/// when nothing can be concluded. Equivalence is the identity; < and > are
/// each transitive; mixing them, associations and NULL yield nothing.
std::optional<RelationType> compose_relations(RelationType first,
                                              RelationType second);

/// One level below the weaker input. LOW stays LOW; UNRATED anywhere gives
/// UNRATED.
Rating degrade_confidence(Rating first, Rating second);

struct InferredMapping {
  Concept source;
  Concept target;
  RelationType relation = RelationType::kEquivalent;
  Rating confidence = Rating::kUnrated;
  std::array<MappingId, 2> path{};
  std::string pivot_vocab;
  CrosswalkId crosswalk;  // from -> to

  friend bool operator==(const InferredMapping&, const InferredMapping&) = default;
};

/// Joins from->via with via->to on the pivot term. Only single-term targets
/// take part. Results are unique on (source, relation, target), keeping the
/// highest confidence, and ordered by source, target, relation.
/// Throws kNotFound when either crosswalk is missing.
std::vector<InferredMapping> infer_pivot(const Store& store,
                                         const std::string& from,
                                         const std::string& to,
                                         const std::string& via);

/// Writes TSV rows with a trailing `# via:<pivot>` column.
void write_inferred_tsv(const Store& store,
                        const std::vector<InferredMapping>& inferred,
                        std::ostream& out);

struct PromotionReport {
  std::size_t added = 0;
  std::size_t already_present = 0;
};

/// Stores inferred mappings in their from->to crosswalk (created on demand)
/// with rating = confidence. Existing triples are left alone.
PromotionReport promote(Store& store, const std::vector<InferredMapping>& inferred);

struct VariantConflict {
  std::string term;
  std::pair<std::string, std::string> vocab_pair;
  std::string target_vocab;
  std::pair<Concept, Concept> targets;

  friend bool operator==(const VariantConflict&, const VariantConflict&) = default;
};

/// A term present in two source vocabularies whose equivalence mappings into
/// target_vocab disagree. Reported for review, never repaired.
std::vector<VariantConflict> detect_variant_mappings(const Store& store,
                                                     const std::string& target_vocab);

}  // namespace komohe
