#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace komohe {

/// Canonical lookup key for a controlled term: NFC composition, simple case
/// folding, trimmed, internal whitespace runs collapsed to one space.
/// Throws Error(kInvalidTerm) for empty or all-whitespace input.
std::string normalize_term(std::string_view raw);

/// Display form kept next to the key: NFC, trimmed and whitespace-collapsed,
/// original capitalization retained.
std::string clean_display(std::string_view raw);

/// True for a two-letter ISO 639-1 code in lower case.
bool is_language_code(std::string_view code);

/// True when id is usable as a vocabulary identifier (non-empty, printable,
/// no whitespace).
bool is_valid_vocabulary_id(std::string_view id);

struct Vocabulary {
  std::string id;
  std::string name;
  /// ISO 639-1; empty only for vocabularies auto-registered by an import.
  std::string language;
  std::string discipline;
  std::size_t term_count = 0;

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

struct Term {
  std::string vocabulary;
  std::string normalized;
  std::string display;

  friend bool operator==(const Term&, const Term&) = default;
};

struct TermListImport {
  std::string vocabulary;
  std::size_t terms_added = 0;
  std::size_t duplicates = 0;
};

class Registry {
 public:
  /// Throws kConflict on a duplicate id, kInvalidArgument on a bad id or
  /// language code.
  std::string register_vocabulary(Vocabulary vocabulary);

  /// Replaces name/language/discipline of an existing vocabulary.
  void update_vocabulary(const Vocabulary& vocabulary);

  bool has_vocabulary(std::string_view id) const;
  const Vocabulary& vocabulary(std::string_view id) const;

  /// Vocabularies ordered by id.
  std::vector<Vocabulary> vocabularies() const;

  /// Idempotent on the normalized form; the first display form wins.
  Term add_term(std::string_view vocabulary, std::string_view display);

  std::optional<Term> lookup_term(std::string_view vocabulary,
                                  std::string_view raw) const;

  /// Lookup by an already-normalized key; no normalization performed.
  const std::string* display_of(std::string_view vocabulary,
                                std::string_view normalized) const;

  /// Terms of one vocabulary in insertion order.
  std::vector<Term> terms(std::string_view vocabulary) const;

  /// Reads the `#terms <vocab-id>` list format. The vocabulary named in the
  /// header must already exist.
  TermListImport import_term_list(std::istream& in);

 private:
  struct Entry {
    Vocabulary vocabulary;
    std::unordered_map<std::string, std::string> display_by_key;
    std::vector<std::string> order;
  };

  Entry& entry(std::string_view id);
  const Entry& entry(std::string_view id) const;

  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace komohe
