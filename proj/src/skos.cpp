#include "komohe/skos.hpp"

#include <algorithm>

#include "komohe/error.hpp"
#include "text_util.hpp"

namespace komohe::skos {

namespace {

bool is_unreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

// Reads one `<...>` IRI starting at pos; advances pos past it.
std::optional<std::string_view> read_iri(std::string_view line, std::size_t& pos) {
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  if (pos >= line.size() || line[pos] != '<') return std::nullopt;
  std::size_t end = line.find('>', pos + 1);
  if (end == std::string_view::npos) return std::nullopt;
  std::string_view iri = line.substr(pos + 1, end - pos - 1);
  if (iri.empty() || iri.find_first_of(" <\"{}|^`\\") != std::string_view::npos) {
    return std::nullopt;
  }
  pos = end + 1;
  return iri;
}

}  // namespace

std::string predicate_uri(RelationType relation) {
  std::string uri(kNamespace);
  switch (relation) {
    case RelationType::kEquivalent:
      return uri + "exactMatch";
    case RelationType::kBroaderTarget:
      return uri + "broadMatch";
    case RelationType::kNarrowerTarget:
      return uri + "narrowMatch";
    case RelationType::kAssociation:
      return uri + "relatedMatch";
    case RelationType::kNull:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "null relation has no SKOS predicate");
}

std::optional<RelationType> relation_from_predicate(std::string_view uri) {
  for (RelationType r : kAllRelations) {
    if (r != RelationType::kNull && predicate_uri(r) == uri) return r;
  }
  return std::nullopt;
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_unreserved(c)) {
      out += ch;
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out += text[i];
      continue;
    }
    if (i + 2 >= text.size()) {
      throw Error(ErrorCode::kFormat, "truncated percent escape");
    }
    int hi = hex_value(text[i + 1]);
    int lo = hex_value(text[i + 2]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kFormat, "bad percent escape");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

std::string concept_uri(std::string_view vocab, std::string_view normalized_term) {
  std::string uri(kUriPrefix);
  uri += percent_encode(vocab);
  uri += ':';
  uri += percent_encode(normalized_term);
  return uri;
}

std::optional<ConceptRef> parse_concept_uri(std::string_view uri) {
  if (!uri.starts_with(kUriPrefix)) return std::nullopt;
  uri.remove_prefix(kUriPrefix.size());
  std::size_t colon = uri.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == uri.size()) {
    return std::nullopt;
  }
  try {
    return ConceptRef{percent_decode(uri.substr(0, colon)),
                      percent_decode(uri.substr(colon + 1))};
  } catch (const Error&) {
    return std::nullopt;
  }
}

ExportReport export_skos(const Store& store, std::span<const CrosswalkId> crosswalks,
                         std::ostream& out) {
  ExportReport report;
  std::vector<std::string> lines;
  std::vector<CrosswalkId> ids(crosswalks.begin(), crosswalks.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const auto& id : ids) {
    for (MappingId mid : store.crosswalk_mappings(id)) {
      const Mapping& m = store.mapping(mid);
      if (m.relation == RelationType::kNull) {
        ++report.skipped_null;
        continue;
      }
      if (m.target->is_combination()) {
        ++report.skipped_combination;
        continue;
      }
      if (m.rating != Rating::kUnrated) ++report.ratings_dropped;
      lines.push_back("<" + concept_uri(id.source, m.source.term()) + "> <" +
                      predicate_uri(m.relation) + "> <" +
                      concept_uri(id.target, m.target->term()) + "> .");
    }
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& line : lines) out << line << '\n';
  report.triples = lines.size();
  return report;
}

ImportReport import_skos(Store& store, std::istream& in,
                         const std::string& source_vocab,
                         const std::string& target_vocab) {
  if (source_vocab == target_vocab) {
    throw Error(ErrorCode::kInvalidArgument,
                "source and target vocabulary must differ");
  }
  ImportReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    std::string_view view = line;
    while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) {
      view.remove_prefix(1);
    }
    if (view.empty() || view.front() == '#') continue;

    std::size_t pos = 0;
    auto subject = read_iri(view, pos);
    auto predicate = subject ? read_iri(view, pos) : std::nullopt;
    auto object = predicate ? read_iri(view, pos) : std::nullopt;
    std::string_view rest = pos <= view.size() ? view.substr(pos) : "";
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) {
      rest.remove_prefix(1);
    }
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) {
      rest.remove_suffix(1);
    }
    if (!object || rest != ".") {
      report.errors.push_back({line_no, "malformed N-Triples line"});
      continue;
    }
    auto relation = relation_from_predicate(*predicate);
    if (!relation) {
      report.warnings.push_back(
          {line_no, "unsupported predicate <" + std::string(*predicate) + ">"});
      continue;
    }
    auto s = parse_concept_uri(*subject);
    auto o = parse_concept_uri(*object);
    if (!s || !o) {
      report.errors.push_back({line_no, "not a urn:kos concept URI"});
      continue;
    }
    if (s->vocab != source_vocab || o->vocab != target_vocab) {
      report.errors.push_back(
          {line_no, "triple does not belong to crosswalk " + source_vocab + "-" +
                        target_vocab});
      continue;
    }
    try {
      Mapping mapping{Concept::single(s->term), *relation,
                      Concept::single(o->term), Rating::kUnrated};
      Registry& reg = store.registry();
      for (const auto& v : {source_vocab, target_vocab}) {
        if (!reg.has_vocabulary(v)) reg.register_vocabulary(Vocabulary{v, v, "", "", 0});
      }
      CrosswalkId id{source_vocab, target_vocab};
      if (!store.has_crosswalk(id)) store.add_crosswalk(source_vocab, target_vocab);
      reg.add_term(source_vocab, s->term);
      reg.add_term(target_vocab, o->term);
      store.add_mapping(id, std::move(mapping));
      ++report.mappings_added;
    } catch (const Error& e) {
      report.errors.push_back({line_no, e.what()});
    }
  }
  return report;
}

}  // namespace komohe::skos
