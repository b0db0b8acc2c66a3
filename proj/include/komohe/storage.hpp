#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "komohe/crosswalk_store.hpp"

namespace komohe {

inline constexpr std::string_view kVocabulariesHeader = "#komohe-vocabularies v1";
inline constexpr std::string_view kTermsHeader = "#komohe-terms v1";

/// Vocabulary metadata: `id<TAB>name<TAB>language<TAB>discipline` rows.
/// Existing vocabularies get their metadata replaced.
void read_vocabularies(Registry& registry, std::istream& in);
void write_vocabularies(const Registry& registry, std::ostream& out);

/// Every registered term: `vocab<TAB>display` rows.
void read_terms(Registry& registry, std::istream& in);
void write_terms(const Registry& registry, std::ostream& out);

/// A data directory holds vocabularies.tsv, terms.tsv and crosswalks.tsv.
/// Missing files load as empty. Any error in a persisted file is fatal.
Store load_data_dir(const std::filesystem::path& dir);

/// Rewrites the three files, each through a temporary file and rename.
/// Mappings are written in id order, so a reload keeps every mapping id.
void save_data_dir(const Store& store, const std::filesystem::path& dir);

}  // namespace komohe
