#include "komohe/registry.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <string>

#include "komohe/error.hpp"
#include "text_util.hpp"

namespace komohe {

namespace {

constexpr std::array<std::string_view, 184> kLanguageCodes = {
    "aa", "ab", "ae", "af", "ak", "am", "an", "ar", "as", "av", "ay", "az",
    "ba", "be", "bg", "bh", "bi", "bm", "bn", "bo", "br", "bs", "ca", "ce",
    "ch", "co", "cr", "cs", "cu", "cv", "cy", "da", "de", "dv", "dz", "ee",
    "el", "en", "eo", "es", "et", "eu", "fa", "ff", "fi", "fj", "fo", "fr",
    "fy", "ga", "gd", "gl", "gn", "gu", "gv", "ha", "he", "hi", "ho", "hr",
    "ht", "hu", "hy", "hz", "ia", "id", "ie", "ig", "ii", "ik", "io", "is",
    "it", "iu", "ja", "jv", "ka", "kg", "ki", "kj", "kk", "kl", "km", "kn",
    "ko", "kr", "ks", "ku", "kv", "kw", "ky", "la", "lb", "lg", "li", "ln",
    "lo", "lt", "lu", "lv", "mg", "mh", "mi", "mk", "ml", "mn", "mr", "ms",
    "mt", "my", "na", "nb", "nd", "ne", "ng", "nl", "nn", "no", "nr", "nv",
    "ny", "oc", "oj", "om", "or", "os", "pa", "pi", "pl", "ps", "pt", "qu",
    "rm", "rn", "ro", "ru", "rw", "sa", "sc", "sd", "se", "sg", "si", "sk",
    "sl", "sm", "sn", "so", "sq", "sr", "ss", "st", "su", "sv", "sw", "ta",
    "te", "tg", "th", "ti", "tk", "tl", "tn", "to", "tr", "ts", "tt", "tw",
    "ty", "ug", "uk", "ur", "uz", "ve", "vi", "vo", "wa", "wo", "xh", "yi",
    "yo", "za", "zh", "zu"};

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Whitespace collapse over ASCII input, optionally lower-casing.
std::string collapse_ascii(std::string_view raw, bool fold) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (fold && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
  return out;
}

icu::UnicodeString nfc(const icu::UnicodeString& in) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidTerm, "unicode normalizer unavailable");
  }
  icu::UnicodeString out = normalizer->normalize(in, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidTerm, "unicode normalization failed");
  }
  return out;
}

icu::UnicodeString collapse_unicode(const icu::UnicodeString& in) {
  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < in.length();) {
    UChar32 c = in.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) {
      out.append(static_cast<UChar>(' '));
      pending_space = false;
    }
    out.append(c);
  }
  return out;
}

// Simple (one-to-one) case folding, code point by code point.
icu::UnicodeString fold_simple(const icu::UnicodeString& in) {
  icu::UnicodeString out;
  for (int32_t i = 0; i < in.length();) {
    UChar32 c = in.char32At(i);
    i += U16_LENGTH(c);
    out.append(u_foldCase(c, U_FOLD_CASE_DEFAULT));
  }
  return out;
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace

std::string normalize_term(std::string_view raw) {
  std::string result;
  if (is_ascii(raw)) {
    result = collapse_ascii(raw, true);
  } else {
    auto text = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    // Folding can leave a string that is no longer composed; iterate to the
    // fixed point so the function stays idempotent.
    for (int round = 0; round < 4; ++round) {
      icu::UnicodeString next = collapse_unicode(nfc(fold_simple(nfc(text))));
      if (next == text) break;
      text = std::move(next);
    }
    result = to_utf8(text);
  }
  if (result.empty()) {
    throw Error(ErrorCode::kInvalidTerm, "term is empty or whitespace only");
  }
  return result;
}

std::string clean_display(std::string_view raw) {
  std::string result;
  if (is_ascii(raw)) {
    result = collapse_ascii(raw, false);
  } else {
    auto text = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    result = to_utf8(collapse_unicode(nfc(text)));
  }
  if (result.empty()) {
    throw Error(ErrorCode::kInvalidTerm, "term is empty or whitespace only");
  }
  return result;
}

bool is_language_code(std::string_view code) {
  return std::find(kLanguageCodes.begin(), kLanguageCodes.end(), code) !=
         kLanguageCodes.end();
}

bool is_valid_vocabulary_id(std::string_view id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u <= 0x20 || u == 0x7f;
  });
}

std::string Registry::register_vocabulary(Vocabulary vocabulary) {
  if (!is_valid_vocabulary_id(vocabulary.id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid vocabulary id '" + vocabulary.id + "'");
  }
  if (!vocabulary.language.empty() && !is_language_code(vocabulary.language)) {
    throw Error(ErrorCode::kInvalidArgument,
                "unrecognized language code '" + vocabulary.language + "'");
  }
  if (entries_.contains(vocabulary.id)) {
    throw Error(ErrorCode::kConflict,
                "vocabulary '" + vocabulary.id + "' already registered");
  }
  vocabulary.term_count = 0;
  std::string id = vocabulary.id;
  entries_.emplace(id, Entry{std::move(vocabulary), {}, {}});
  return id;
}

void Registry::update_vocabulary(const Vocabulary& vocabulary) {
  if (!vocabulary.language.empty() && !is_language_code(vocabulary.language)) {
    throw Error(ErrorCode::kInvalidArgument,
                "unrecognized language code '" + vocabulary.language + "'");
  }
  Entry& e = entry(vocabulary.id);
  e.vocabulary.name = vocabulary.name;
  e.vocabulary.language = vocabulary.language;
  e.vocabulary.discipline = vocabulary.discipline;
}

bool Registry::has_vocabulary(std::string_view id) const {
  return entries_.find(id) != entries_.end();
}

const Vocabulary& Registry::vocabulary(std::string_view id) const {
  return entry(id).vocabulary;
}

std::vector<Vocabulary> Registry::vocabularies() const {
  std::vector<Vocabulary> out;
  out.reserve(entries_.size());
  for (const auto& [id, e] : entries_) out.push_back(e.vocabulary);
  return out;
}

Term Registry::add_term(std::string_view vocabulary, std::string_view display) {
  Entry& e = entry(vocabulary);
  std::string key = normalize_term(display);
  auto it = e.display_by_key.find(key);
  if (it == e.display_by_key.end()) {
    it = e.display_by_key.emplace(key, clean_display(display)).first;
    e.order.push_back(key);
    e.vocabulary.term_count = e.order.size();
  }
  return Term{e.vocabulary.id, it->first, it->second};
}

std::optional<Term> Registry::lookup_term(std::string_view vocabulary,
                                          std::string_view raw) const {
  const Entry& e = entry(vocabulary);
  std::string key = normalize_term(raw);
  auto it = e.display_by_key.find(key);
  if (it == e.display_by_key.end()) return std::nullopt;
  return Term{e.vocabulary.id, it->first, it->second};
}

const std::string* Registry::display_of(std::string_view vocabulary,
                                        std::string_view normalized) const {
  auto e = entries_.find(vocabulary);
  if (e == entries_.end()) return nullptr;
  auto it = e->second.display_by_key.find(std::string(normalized));
  return it == e->second.display_by_key.end() ? nullptr : &it->second;
}

std::vector<Term> Registry::terms(std::string_view vocabulary) const {
  const Entry& e = entry(vocabulary);
  std::vector<Term> out;
  out.reserve(e.order.size());
  for (const auto& key : e.order) {
    out.push_back(Term{e.vocabulary.id, key, e.display_by_key.at(key)});
  }
  return out;
}

TermListImport Registry::import_term_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormat, "term list is empty");
  }
  strip_cr(line);
  constexpr std::string_view kHeader = "#terms ";
  if (!line.starts_with(kHeader)) {
    throw Error(ErrorCode::kFormat, "term list header must be '#terms <vocab-id>'");
  }
  TermListImport result;
  result.vocabulary = line.substr(kHeader.size());
  Entry& e = entry(result.vocabulary);
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    if (is_blank(line)) continue;
    std::size_t before = e.order.size();
    add_term(result.vocabulary, line);
    if (e.order.size() > before) {
      ++result.terms_added;
    } else {
      ++result.duplicates;
    }
  }
  return result;
}

Registry::Entry& Registry::entry(std::string_view id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kNotFound,
                "unknown vocabulary '" + std::string(id) + "'");
  }
  return it->second;
}

const Registry::Entry& Registry::entry(std::string_view id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kNotFound,
                "unknown vocabulary '" + std::string(id) + "'");
  }
  return it->second;
}

}  // namespace komohe
