#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "komohe/crosswalk_store.hpp"

namespace komohe {

/// Documents indexed with controlled descriptors, keyed by doc id.
class Corpus {
 public:
  using Descriptor = std::pair<std::string, std::string>;  // (vocab, normalized term)

  /// Returns false when the descriptor was already present.
  bool add(const std::string& doc_id, const std::string& vocab,
           std::string_view term);

  std::size_t size() const { return docs_.size(); }
  const std::set<Descriptor>& descriptors(const std::string& doc_id) const;

  /// Number of documents carrying every given term under vocab.
  std::size_t count_all(const std::string& vocab,
                        const std::vector<std::string>& terms) const;

 private:
  std::map<std::string, std::set<Descriptor>> docs_;
  std::map<Descriptor, std::set<std::string>> postings_;
};

struct CorpusLoad {
  Corpus corpus;
  std::vector<LineError> errors;
};

/// `#corpus v1` header, then `doc_id<TAB>vocab<TAB>term` lines.
CorpusLoad load_corpus(std::istream& in);

enum class Verdict { kOk, kEmptyTarget };
std::string_view to_string(Verdict verdict);

struct Assessment {
  std::size_t source_hits = 0;
  std::size_t target_hits = 0;
  Verdict verdict = Verdict::kOk;

  friend bool operator==(const Assessment&, const Assessment&) = default;
};

/// Combination targets count only documents carrying all members.
/// Throws kInvalidArgument for a NULL mapping.
Assessment assess_mapping(const CrosswalkId& crosswalk, const Mapping& mapping,
                          const Corpus& corpus);

struct AssessmentRow {
  MappingId mapping = 0;
  Assessment result;

  friend bool operator==(const AssessmentRow&, const AssessmentRow&) = default;
};

struct AssessmentReport {
  CrosswalkId crosswalk;
  std::size_t requested = 0;
  std::uint64_t seed = 0;
  std::vector<AssessmentRow> rows;  // ordered by mapping id
  double empty_target_rate = 0.0;

  friend bool operator==(const AssessmentReport&, const AssessmentReport&) = default;
};

/// Seeded sample of min(sample_size, non-NULL mappings) drawn without
/// replacement. Same seed, same store, same report.
AssessmentReport sample_assessment(const Store& store, const CrosswalkId& crosswalk,
                                   const Corpus& corpus, std::size_t sample_size,
                                   std::uint64_t seed);

/// `mapping<TAB>source_hits<TAB>target_hits<TAB>verdict` rows framed by
/// comment lines.
void write_report(const Store& store, const AssessmentReport& report,
                  std::ostream& out);

}  // namespace komohe
