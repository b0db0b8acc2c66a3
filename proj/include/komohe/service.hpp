#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "komohe/crosswalk_store.hpp"

namespace komohe {

struct TranslationCandidate {
  std::string term;  // normalized target term
  std::string vocab;
  Rating rating = Rating::kUnrated;
  CrosswalkId crosswalk;

  friend bool operator==(const TranslationCandidate&,
                         const TranslationCandidate&) = default;
};

/// Follows equivalence mappings from every vocabulary in source_lang (all
/// vocabularies when absent) that knows the term into vocabularies whose
/// language is target_lang. Single-term targets only, ordered by rating
/// (best first) then term then vocabulary. Throws kNotFound when no
/// vocabulary uses target_lang.
std::vector<TranslationCandidate> translate(
    const Store& store, std::string_view term,
    const std::optional<std::string>& source_lang, const std::string& target_lang);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> vocabularies;
  std::vector<std::filesystem::path> term_lists;
  std::vector<std::filesystem::path> crosswalks;
  std::chrono::milliseconds read_timeout{5000};
  std::size_t max_expansion_terms = 32;
};

/// Flat `key=value` file; `#` starts a comment line. Keys: host, port,
/// data_dir, vocabularies, terms, crosswalks (comma lists allowed for the
/// last two), read_timeout_ms, max_expansion_terms.
ServiceConfig parse_service_config(std::istream& in);

/// Throws kInvalidArgument on an out-of-range port, a zero expansion cap or
/// no data path at all.
void validate(const ServiceConfig& config);

/// Loads data_dir, then vocabularies, crosswalk files and term lists, in that
/// order. Unreadable files and malformed crosswalk lines are fatal.
Store load_service_data(const ServiceConfig& config);

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Route table of the lookup service, independent of any HTTP transport.
/// Every response body is deterministic JSON carrying "v": 1.
class Api {
 public:
  Api(std::shared_ptr<const Store> store, std::size_t max_expansion_terms);

  /// target is the raw request target: percent-encoded path plus query.
  HttpResponse get(std::string_view target) const;

 private:
  std::shared_ptr<const Store> store_;
  std::size_t max_expansion_terms_;
};

/// HTTP/1.1 front end over Api. Read-only; a reload is a restart.
class Server {
 public:
  Server(const ServiceConfig& config, std::shared_ptr<const Store> store);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds config.port, or an ephemeral port when any_port is set. Returns
  /// the bound port. Throws kInvalidArgument when binding fails.
  int bind(bool any_port = false);

  /// Serves until stop(); in-flight requests finish before it returns.
  void run();
  void stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-line summary of store totals for startup logs.
std::string describe_store(const Store& store);

}  // namespace komohe
