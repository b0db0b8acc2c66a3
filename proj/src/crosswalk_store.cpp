#include "komohe/crosswalk_store.hpp"

#include <algorithm>
#include <sstream>

#include "komohe/error.hpp"
#include "text_util.hpp"

namespace komohe {

namespace {

std::string triple_key(const Mapping& m) {
  std::string key = m.source.key();
  key += '\x1f';
  key += symbol(m.relation);
  key += '\x1f';
  if (m.target) key += m.target->key();
  return key;
}

std::string normalized_member(std::string_view raw) {
  std::string term = normalize_term(raw);
  if (term.find(kCombinationSeparator) != std::string::npos) {
    throw Error(ErrorCode::kInvalidTerm,
                "term '" + term + "' contains the combination separator");
  }
  return term;
}

}  // namespace

std::string_view symbol(RelationType relation) {
  switch (relation) {
    case RelationType::kEquivalent:
      return "=";
    case RelationType::kBroaderTarget:
      return "<";
    case RelationType::kNarrowerTarget:
      return ">";
    case RelationType::kAssociation:
      return "^";
    case RelationType::kNull:
      return "0";
  }
  return "?";
}

std::optional<RelationType> parse_relation(std::string_view text) {
  for (RelationType r : kAllRelations) {
    if (symbol(r) == text) return r;
  }
  return std::nullopt;
}

std::set<RelationType> parse_relation_list(std::string_view list) {
  std::set<RelationType> out;
  for (std::string_view part : split(list, ",")) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (part.empty()) continue;
    auto r = parse_relation(part);
    if (!r) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown relation '" + std::string(part) + "'");
    }
    out.insert(*r);
  }
  return out;
}

std::string_view to_string(Rating rating) {
  switch (rating) {
    case Rating::kHigh:
      return "high";
    case Rating::kMedium:
      return "medium";
    case Rating::kLow:
      return "low";
    case Rating::kUnrated:
      return "";
  }
  return "";
}

std::optional<Rating> parse_rating(std::string_view text) {
  if (text.empty()) return Rating::kUnrated;
  if (text == "high") return Rating::kHigh;
  if (text == "medium") return Rating::kMedium;
  if (text == "low") return Rating::kLow;
  return std::nullopt;
}

Concept Concept::single(std::string_view term) {
  return Concept({normalized_member(term)});
}

Concept Concept::combination(const std::vector<std::string>& terms) {
  if (terms.size() < 2) {
    throw Error(ErrorCode::kInvalidMapping,
                "a combination needs at least two terms");
  }
  std::vector<std::string> members;
  members.reserve(terms.size());
  for (const auto& t : terms) members.push_back(normalized_member(t));
  return Concept(std::move(members));
}

Concept Concept::of(const std::vector<std::string>& terms) {
  if (terms.size() == 1) return single(terms.front());
  return combination(terms);
}

std::string Concept::key() const { return join(terms_, kCombinationSeparator); }

void validate(const Mapping& m) {
  if (!m.source.is_single()) {
    throw Error(ErrorCode::kInvalidMapping,
                "source concept must be a single term");
  }
  if (m.relation == RelationType::kNull && m.target) {
    throw Error(ErrorCode::kInvalidMapping, "null relation cannot have a target");
  }
  if (m.relation != RelationType::kNull && !m.target) {
    throw Error(ErrorCode::kInvalidMapping,
                std::string("relation '") + std::string(symbol(m.relation)) +
                    "' requires a target");
  }
}

std::string CrosswalkId::to_string() const { return source + "-" + target; }

CrosswalkId Store::add_crosswalk(std::string_view source,
                                 std::string_view target) {
  if (!registry_.has_vocabulary(source)) registry_.vocabulary(source);
  if (!registry_.has_vocabulary(target)) registry_.vocabulary(target);
  if (source == target) {
    throw Error(ErrorCode::kInvalidArgument,
                "a crosswalk needs two distinct vocabularies");
  }
  CrosswalkId id{std::string(source), std::string(target)};
  if (crosswalk_index_.contains(id)) {
    throw Error(ErrorCode::kConflict,
                "crosswalk " + id.to_string() + " already exists");
  }
  crosswalk_index_.emplace(id, crosswalks_.size());
  crosswalks_.push_back(Crosswalk{id, {}, {}});
  return id;
}

bool Store::has_crosswalk(const CrosswalkId& id) const {
  return crosswalk_index_.contains(id);
}

std::vector<CrosswalkId> Store::crosswalks() const {
  std::vector<CrosswalkId> out;
  out.reserve(crosswalk_index_.size());
  for (const auto& [id, index] : crosswalk_index_) out.push_back(id);
  return out;
}

CrosswalkId Store::resolve_crosswalk(std::string_view text) const {
  std::vector<CrosswalkId> matches;
  for (std::size_t pos = text.find('-'); pos != std::string_view::npos;
       pos = text.find('-', pos + 1)) {
    CrosswalkId candidate{std::string(text.substr(0, pos)),
                          std::string(text.substr(pos + 1))};
    if (has_crosswalk(candidate)) matches.push_back(std::move(candidate));
  }
  if (matches.empty()) {
    throw Error(ErrorCode::kNotFound,
                "unknown crosswalk '" + std::string(text) + "'");
  }
  if (matches.size() > 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "ambiguous crosswalk '" + std::string(text) + "'");
  }
  return matches.front();
}

const Store::Crosswalk& Store::crosswalk(const CrosswalkId& id) const {
  auto it = crosswalk_index_.find(id);
  if (it == crosswalk_index_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown crosswalk " + id.to_string());
  }
  return crosswalks_[it->second];
}

const CrosswalkId& Store::crosswalk_of(MappingId id) const {
  return crosswalks_[entries_.at(id).crosswalk].id;
}

std::span<const MappingId> Store::crosswalk_mappings(
    const CrosswalkId& id) const {
  return crosswalk(id).mappings;
}

MappingId Store::add_mapping(const CrosswalkId& id, Mapping mapping) {
  auto it = crosswalk_index_.find(id);
  if (it == crosswalk_index_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown crosswalk " + id.to_string());
  }
  validate(mapping);
  if (!registry_.display_of(id.source, mapping.source.term())) {
    throw Error(ErrorCode::kNotFound, "term '" + mapping.source.term() +
                                          "' is not in vocabulary " + id.source);
  }
  if (mapping.target) {
    for (const auto& t : mapping.target->terms()) {
      if (!registry_.display_of(id.target, t)) {
        throw Error(ErrorCode::kNotFound,
                    "term '" + t + "' is not in vocabulary " + id.target);
      }
    }
  }
  Crosswalk& cw = crosswalks_[it->second];
  std::string key = triple_key(mapping);
  if (cw.triples.contains(key)) {
    throw Error(ErrorCode::kConflict, "duplicate mapping in crosswalk " +
                                          id.to_string() + ": " + key);
  }
  MappingId mid = entries_.size();
  cw.triples.insert(std::move(key));
  cw.mappings.push_back(mid);
  by_source_[mapping.source.term()].push_back(mid);
  if (mapping.target) {
    std::set<std::string> members(mapping.target->terms().begin(),
                                  mapping.target->terms().end());
    for (const auto& t : members) by_target_[t].push_back(mid);
  }
  entries_.push_back(Entry{it->second, std::move(mapping)});
  return mid;
}

std::vector<MappingHit> Store::collect(std::vector<MappingId> ids) const {
  std::stable_sort(ids.begin(), ids.end(), [&](MappingId a, MappingId b) {
    return crosswalk_of(a) < crosswalk_of(b);
  });
  std::vector<MappingHit> out;
  out.reserve(ids.size());
  for (MappingId id : ids) {
    out.push_back(MappingHit{crosswalk_of(id), id, entries_[id].mapping});
  }
  return out;
}

std::vector<MappingHit> Store::mappings_from(std::string_view term,
                                             const LookupFilter& filter) const {
  auto it = by_source_.find(normalize_term(term));
  if (it == by_source_.end()) return {};
  std::vector<MappingId> ids;
  for (MappingId id : it->second) {
    const Mapping& m = entries_[id].mapping;
    const CrosswalkId& cw = crosswalk_of(id);
    if (filter.source_vocab && cw.source != *filter.source_vocab) continue;
    if (filter.target_vocabs && !filter.target_vocabs->contains(cw.target)) {
      continue;
    }
    if (filter.relations && !filter.relations->contains(m.relation)) continue;
    if (filter.min_rating &&
        (m.rating == Rating::kUnrated || m.rating < *filter.min_rating)) {
      continue;
    }
    ids.push_back(id);
  }
  return collect(std::move(ids));
}

std::vector<MappingHit> Store::mappings_to(
    std::string_view term, const std::optional<std::string>& target_vocab) const {
  auto it = by_target_.find(normalize_term(term));
  if (it == by_target_.end()) return {};
  std::vector<MappingId> ids;
  for (MappingId id : it->second) {
    if (target_vocab && crosswalk_of(id).target != *target_vocab) continue;
    ids.push_back(id);
  }
  return collect(std::move(ids));
}

std::map<CrosswalkId, CrosswalkStats> Store::stats() const {
  std::map<CrosswalkId, CrosswalkStats> out;
  for (const auto& cw : crosswalks_) {
    CrosswalkStats& s = out[cw.id];
    s.mapping_count = cw.mappings.size();
    for (MappingId id : cw.mappings) {
      const Mapping& m = entries_[id].mapping;
      ++s.by_relation[m.relation];
      ++s.by_rating[m.rating];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TSV

namespace {

constexpr std::string_view kBlockMarker = "# crosswalk ";

struct ParsedRow {
  std::string source_vocab;
  std::string source_term;
  RelationType relation;
  std::string target_vocab;
  std::vector<std::string> target_terms;
  Rating rating;
};

// Throws Error describing why the row is malformed.
ParsedRow parse_row(std::string_view line) {
  auto fields = split(line, "\t");
  if (fields.size() == 7 && fields[6].starts_with("#")) fields.pop_back();
  if (fields.size() != 6) {
    throw Error(ErrorCode::kFormat, "expected 6 tab-separated fields, got " +
                                        std::to_string(fields.size()));
  }
  ParsedRow row;
  row.source_vocab = fields[0];
  if (!is_valid_vocabulary_id(row.source_vocab)) {
    throw Error(ErrorCode::kFormat, "invalid source vocabulary id");
  }
  if (is_blank(fields[1])) {
    throw Error(ErrorCode::kFormat, "empty source term");
  }
  if (fields[1].find(kCombinationSeparator) != std::string_view::npos) {
    throw Error(ErrorCode::kFormat,
                "combination source concepts are not supported");
  }
  row.source_term = fields[1];
  auto relation = parse_relation(fields[2]);
  if (!relation) {
    throw Error(ErrorCode::kFormat,
                "unknown relation '" + std::string(fields[2]) + "'");
  }
  row.relation = *relation;
  row.target_vocab = fields[3];
  if (!row.target_vocab.empty() && !is_valid_vocabulary_id(row.target_vocab)) {
    throw Error(ErrorCode::kFormat, "invalid target vocabulary id");
  }
  if (!fields[4].empty()) {
    for (auto part : split(fields[4], kCombinationSeparator)) {
      if (is_blank(part)) throw Error(ErrorCode::kFormat, "empty target term");
      row.target_terms.emplace_back(part);
    }
  }
  auto rating = parse_rating(fields[5]);
  if (!rating) {
    throw Error(ErrorCode::kFormat,
                "unknown rating '" + std::string(fields[5]) + "'");
  }
  row.rating = *rating;
  if (row.relation == RelationType::kNull) {
    if (!row.target_terms.empty()) {
      throw Error(ErrorCode::kInvalidMapping,
                  "null relation cannot have a target");
    }
  } else {
    if (row.target_terms.empty() || row.target_vocab.empty()) {
      throw Error(ErrorCode::kInvalidMapping,
                  "relation '" + std::string(fields[2]) + "' requires a target");
    }
    if (row.target_vocab == row.source_vocab) {
      throw Error(ErrorCode::kInvalidMapping,
                  "source and target vocabulary must differ");
    }
  }
  return row;
}

struct Importer {
  Store& store;
  TsvImportReport& report;

  void ensure_vocabulary(const std::string& id) {
    if (store.registry().has_vocabulary(id)) return;
    store.registry().register_vocabulary(Vocabulary{id, id, "", "", 0});
  }

  CrosswalkId ensure_crosswalk(const std::string& source,
                               const std::string& target) {
    CrosswalkId id{source, target};
    if (!store.has_crosswalk(id)) {
      ensure_vocabulary(source);
      ensure_vocabulary(target);
      store.add_crosswalk(source, target);
      ++report.crosswalks_created;
    }
    return id;
  }

  void add(const ParsedRow& row) {
    // Normalize everything before touching the store so a bad term leaves no
    // partial registration behind.
    Mapping mapping{Concept::single(row.source_term), row.relation,
                    std::nullopt, row.rating};
    if (!row.target_terms.empty()) {
      mapping.target = Concept::of(row.target_terms);
    }
    CrosswalkId id = ensure_crosswalk(row.source_vocab, row.target_vocab);
    store.registry().add_term(row.source_vocab, row.source_term);
    for (const auto& t : row.target_terms) {
      store.registry().add_term(row.target_vocab, t);
    }
    store.add_mapping(id, std::move(mapping));
    ++report.mappings_added;
  }
};

}  // namespace

TsvImportReport import_tsv(Store& store, std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormat, "missing '#komohe-tsv v1' header");
  }
  strip_cr(line);
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (line != kTsvHeader) {
    throw Error(ErrorCode::kFormat, "bad header: expected '#komohe-tsv v1'");
  }

  TsvImportReport report;
  Importer importer{store, report};
  std::optional<CrosswalkId> block;
  struct Pending {
    std::size_t line;
    ParsedRow row;
  };
  std::vector<Pending> pending_null;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.starts_with(kBlockMarker)) {
      auto parts = split(std::string_view(line).substr(kBlockMarker.size()), " ");
      if (parts.size() == 2) {
        block = CrosswalkId{std::string(parts[0]), std::string(parts[1])};
      }
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    try {
      ParsedRow row = parse_row(line);
      if (row.relation == RelationType::kNull && row.target_vocab.empty()) {
        if (block && block->source == row.source_vocab) {
          row.target_vocab = block->target;
        } else {
          pending_null.push_back(Pending{line_no, std::move(row)});
          continue;
        }
      }
      importer.add(row);
    } catch (const Error& e) {
      report.errors.push_back(LineError{line_no, e.what()});
    }
  }

  // Null rows outside a matching block take the only crosswalk leaving their
  // source vocabulary once the whole file is known.
  for (auto& p : pending_null) {
    try {
      std::vector<CrosswalkId> candidates;
      for (const auto& id : store.crosswalks()) {
        if (id.source == p.row.source_vocab) candidates.push_back(id);
      }
      if (candidates.size() != 1) {
        throw Error(ErrorCode::kInvalidMapping,
                    "cannot determine the crosswalk of a null mapping "
                    "without a target vocabulary");
      }
      p.row.target_vocab = candidates.front().target;
      importer.add(p.row);
    } catch (const Error& e) {
      report.errors.push_back(LineError{p.line, e.what()});
    }
  }
  std::stable_sort(report.errors.begin(), report.errors.end(),
                   [](const LineError& a, const LineError& b) {
                     return a.line < b.line;
                   });
  return report;
}

std::string format_tsv_row(const Store& store, const CrosswalkId& crosswalk,
                           const Mapping& mapping) {
  const Registry& reg = store.registry();
  auto display = [&](const std::string& vocab, const std::string& key) {
    const std::string* d = reg.display_of(vocab, key);
    return d ? *d : key;
  };
  std::string row = crosswalk.source;
  row += '\t';
  row += display(crosswalk.source, mapping.source.term());
  row += '\t';
  row += symbol(mapping.relation);
  row += '\t';
  if (mapping.target) {
    row += crosswalk.target;
    row += '\t';
    std::vector<std::string> members;
    for (const auto& t : mapping.target->terms()) {
      members.push_back(display(crosswalk.target, t));
    }
    row += join(members, kCombinationSeparator);
  } else {
    row += '\t';
  }
  row += '\t';
  row += to_string(mapping.rating);
  return row;
}

void export_tsv(const Store& store, std::span<const CrosswalkId> crosswalks,
                std::ostream& out) {
  std::vector<CrosswalkId> ids(crosswalks.begin(), crosswalks.end());
  for (const auto& id : ids) store.crosswalk_mappings(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  out << kTsvHeader << '\n';
  for (const auto& id : ids) {
    auto span = store.crosswalk_mappings(id);
    if (span.empty()) continue;
    std::vector<MappingId> order(span.begin(), span.end());
    std::stable_sort(order.begin(), order.end(), [&](MappingId a, MappingId b) {
      return store.mapping(a).source.term() < store.mapping(b).source.term();
    });
    out << kBlockMarker << id.source << ' ' << id.target << '\n';
    for (MappingId mid : order) {
      out << format_tsv_row(store, id, store.mapping(mid)) << '\n';
    }
  }
}

void dump_tsv(const Store& store, std::ostream& out) {
  out << kTsvHeader << '\n';
  const CrosswalkId* current = nullptr;
  for (MappingId id = 0; id < store.mapping_count(); ++id) {
    const CrosswalkId& cw = store.crosswalk_of(id);
    if (!current || *current != cw) {
      out << kBlockMarker << cw.source << ' ' << cw.target << '\n';
      current = &cw;
    }
    out << format_tsv_row(store, cw, store.mapping(id)) << '\n';
  }
}

}  // namespace komohe
