#include "komohe/assessment.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "komohe/error.hpp"
#include "text_util.hpp"

namespace komohe {

bool Corpus::add(const std::string& doc_id, const std::string& vocab,
                 std::string_view term) {
  Descriptor d{vocab, normalize_term(term)};
  bool inserted = docs_[doc_id].insert(d).second;
  if (inserted) postings_[d].insert(doc_id);
  return inserted;
}

const std::set<Corpus::Descriptor>& Corpus::descriptors(
    const std::string& doc_id) const {
  auto it = docs_.find(doc_id);
  if (it == docs_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown document '" + doc_id + "'");
  }
  return it->second;
}

std::size_t Corpus::count_all(const std::string& vocab,
                              const std::vector<std::string>& terms) const {
  if (terms.empty()) return 0;
  std::vector<const std::set<std::string>*> lists;
  for (const auto& t : terms) {
    auto it = postings_.find(Descriptor{vocab, t});
    if (it == postings_.end()) return 0;
    lists.push_back(&it->second);
  }
  std::sort(lists.begin(), lists.end(),
            [](const auto* a, const auto* b) { return a->size() < b->size(); });
  std::size_t count = 0;
  for (const auto& doc : *lists.front()) {
    bool all = std::all_of(lists.begin() + 1, lists.end(),
                           [&](const auto* l) { return l->contains(doc); });
    if (all) ++count;
  }
  return count;
}

CorpusLoad load_corpus(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormat, "missing '#corpus v1' header");
  }
  strip_cr(line);
  if (line != "#corpus v1") {
    throw Error(ErrorCode::kFormat, "bad header: expected '#corpus v1'");
  }
  CorpusLoad load;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, "\t");
    if (fields.size() != 3) {
      load.errors.push_back({line_no, "expected 3 tab-separated fields"});
      continue;
    }
    if (is_blank(fields[0]) || !is_valid_vocabulary_id(fields[1])) {
      load.errors.push_back({line_no, "empty document id or bad vocabulary id"});
      continue;
    }
    try {
      load.corpus.add(std::string(fields[0]), std::string(fields[1]), fields[2]);
    } catch (const Error& e) {
      load.errors.push_back({line_no, e.what()});
    }
  }
  return load;
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::kOk ? "OK" : "EMPTY_TARGET";
}

Assessment assess_mapping(const CrosswalkId& crosswalk, const Mapping& mapping,
                          const Corpus& corpus) {
  if (mapping.relation == RelationType::kNull || !mapping.target) {
    throw Error(ErrorCode::kInvalidArgument,
                "null mappings have no target to assess");
  }
  Assessment a;
  a.source_hits = corpus.count_all(crosswalk.source, {mapping.source.term()});
  a.target_hits = corpus.count_all(crosswalk.target, mapping.target->terms());
  a.verdict = a.target_hits > 0 ? Verdict::kOk : Verdict::kEmptyTarget;
  return a;
}

namespace {

// Uniform draw in [0, bound) by rejection; stable across standard libraries,
// unlike std::uniform_int_distribution.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

AssessmentReport sample_assessment(const Store& store, const CrosswalkId& crosswalk,
                                   const Corpus& corpus, std::size_t sample_size,
                                   std::uint64_t seed) {
  if (sample_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample size must be at least 1");
  }
  std::vector<MappingId> pool;
  for (MappingId id : store.crosswalk_mappings(crosswalk)) {
    if (store.mapping(id).relation != RelationType::kNull) pool.push_back(id);
  }
  std::size_t n = std::min(sample_size, pool.size());
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(draw_below(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());

  AssessmentReport report;
  report.crosswalk = crosswalk;
  report.requested = sample_size;
  report.seed = seed;
  std::size_t empty = 0;
  for (MappingId id : pool) {
    Assessment a = assess_mapping(crosswalk, store.mapping(id), corpus);
    if (a.verdict == Verdict::kEmptyTarget) ++empty;
    report.rows.push_back(AssessmentRow{id, a});
  }
  report.empty_target_rate =
      n == 0 ? 0.0 : static_cast<double>(empty) / static_cast<double>(n);
  return report;
}

void write_report(const Store& store, const AssessmentReport& report,
                  std::ostream& out) {
  out << "#assessment v1\tcrosswalk=" << report.crosswalk.to_string()
      << "\tsample=" << report.requested << "\tseed=" << report.seed << '\n';
  const Registry& reg = store.registry();
  auto display = [&](const std::string& vocab, const std::string& key) {
    const std::string* d = reg.display_of(vocab, key);
    return d ? *d : key;
  };
  for (const auto& row : report.rows) {
    const Mapping& m = store.mapping(row.mapping);
    std::vector<std::string> members;
    for (const auto& t : m.target->terms()) {
      members.push_back(display(report.crosswalk.target, t));
    }
    out << report.crosswalk.source << ':'
        << display(report.crosswalk.source, m.source.term()) << ' '
        << symbol(m.relation) << ' ' << report.crosswalk.target << ':'
        << join(members, kCombinationSeparator) << '\t' << row.result.source_hits
        << '\t' << row.result.target_hits << '\t' << to_string(row.result.verdict)
        << '\n';
  }
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.4f", report.empty_target_rate);
  out << "#empty_target_rate\t" << rate << '\n';
}

}  // namespace komohe
