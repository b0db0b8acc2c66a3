#include "komohe/inference.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "komohe/error.hpp"

namespace komohe {

std::optional<RelationType> compose_relations(RelationType first,
                                              RelationType second) {
  using R = RelationType;
  if (first == R::kNull || second == R::kNull) return std::nullopt;
  if (first == R::kEquivalent) return second;
  if (second == R::kEquivalent) return first;
  if (first == second && first != R::kAssociation) return first;
  return std::nullopt;
}

Rating degrade_confidence(Rating first, Rating second) {
  if (first == Rating::kUnrated || second == Rating::kUnrated) {
    return Rating::kUnrated;
  }
  switch (std::min(first, second)) {
    case Rating::kHigh:
      return Rating::kMedium;
    case Rating::kMedium:
    case Rating::kLow:
      return Rating::kLow;
    case Rating::kUnrated:
      break;
  }
  return Rating::kUnrated;
}

std::vector<InferredMapping> infer_pivot(const Store& store,
                                         const std::string& from,
                                         const std::string& to,
                                         const std::string& via) {
  if (from == to || from == via || to == via) {
    throw Error(ErrorCode::kInvalidArgument,
                "pivot inference needs three distinct vocabularies");
  }
  CrosswalkId first{from, via};
  CrosswalkId second{via, to};
  for (const auto& id : {first, second}) {
    if (!store.has_crosswalk(id)) {
      throw Error(ErrorCode::kNotFound, "unknown crosswalk " + id.to_string());
    }
  }

  using Key = std::tuple<std::string, std::string, RelationType>;
  std::map<Key, InferredMapping> best;
  LookupFilter onward;
  onward.source_vocab = via;
  onward.target_vocabs = std::set<std::string>{to};

  for (MappingId id1 : store.crosswalk_mappings(first)) {
    const Mapping& m1 = store.mapping(id1);
    if (m1.relation == RelationType::kNull || !m1.target->is_single()) continue;
    for (const auto& hit : store.mappings_from(m1.target->term(), onward)) {
      const Mapping& m2 = hit.mapping;
      if (m2.relation == RelationType::kNull || !m2.target->is_single()) continue;
      auto relation = compose_relations(m1.relation, m2.relation);
      if (!relation) continue;
      InferredMapping inferred{m1.source,
                               *m2.target,
                               *relation,
                               degrade_confidence(m1.rating, m2.rating),
                               {id1, hit.id},
                               via,
                               CrosswalkId{from, to}};
      Key key{m1.source.key(), m2.target->key(), *relation};
      auto it = best.find(key);
      if (it == best.end()) {
        best.emplace(std::move(key), std::move(inferred));
      } else if (inferred.confidence > it->second.confidence) {
        it->second = std::move(inferred);
      }
    }
  }

  std::vector<InferredMapping> out;
  out.reserve(best.size());
  for (auto& [key, value] : best) out.push_back(std::move(value));
  return out;
}

void write_inferred_tsv(const Store& store,
                        const std::vector<InferredMapping>& inferred,
                        std::ostream& out) {
  out << kTsvHeader << '\n';
  for (const auto& m : inferred) {
    Mapping row{m.source, m.relation, m.target, m.confidence};
    out << format_tsv_row(store, m.crosswalk, row) << "\t# via:"
        << m.pivot_vocab << '\n';
  }
}

PromotionReport promote(Store& store,
                        const std::vector<InferredMapping>& inferred) {
  PromotionReport report;
  for (const auto& m : inferred) {
    if (!store.has_crosswalk(m.crosswalk)) {
      store.add_crosswalk(m.crosswalk.source, m.crosswalk.target);
    }
    try {
      store.add_mapping(m.crosswalk,
                        Mapping{m.source, m.relation, m.target, m.confidence});
      ++report.added;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kConflict) throw;
      ++report.already_present;
    }
  }
  return report;
}

std::vector<VariantConflict> detect_variant_mappings(
    const Store& store, const std::string& target_vocab) {
  // term -> source vocabulary -> distinct equivalence targets
  std::map<std::string, std::map<std::string, std::vector<Concept>>> index;
  for (const auto& cw : store.crosswalks()) {
    if (cw.target != target_vocab) continue;
    for (MappingId id : store.crosswalk_mappings(cw)) {
      const Mapping& m = store.mapping(id);
      if (m.relation != RelationType::kEquivalent) continue;
      auto& targets = index[m.source.term()][cw.source];
      if (std::find(targets.begin(), targets.end(), *m.target) == targets.end()) {
        targets.push_back(*m.target);
      }
    }
  }

  std::vector<VariantConflict> out;
  for (auto& [term, by_vocab] : index) {
    if (by_vocab.size() < 2) continue;
    for (auto& [vocab, targets] : by_vocab) std::sort(targets.begin(), targets.end());
    for (auto a = by_vocab.begin(); a != by_vocab.end(); ++a) {
      for (auto b = std::next(a); b != by_vocab.end(); ++b) {
        for (const auto& ta : a->second) {
          for (const auto& tb : b->second) {
            if (ta == tb) continue;
            out.push_back(VariantConflict{term, {a->first, b->first},
                                          target_vocab, {ta, tb}});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace komohe
