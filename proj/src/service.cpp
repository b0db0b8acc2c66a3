#include "komohe/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <json.hpp>
#include <sstream>

#include "komohe/error.hpp"
#include "komohe/query.hpp"
#include "komohe/storage.hpp"
#include "text_util.hpp"

namespace komohe {

using nlohmann::json;

std::vector<TranslationCandidate> translate(
    const Store& store, std::string_view term,
    const std::optional<std::string>& source_lang, const std::string& target_lang) {
  if (!is_language_code(target_lang)) {
    throw Error(ErrorCode::kInvalidArgument,
                "unrecognized language code '" + target_lang + "'");
  }
  if (source_lang && !is_language_code(*source_lang)) {
    throw Error(ErrorCode::kInvalidArgument,
                "unrecognized language code '" + *source_lang + "'");
  }
  const Registry& reg = store.registry();
  std::set<std::string> targets;
  for (const auto& v : reg.vocabularies()) {
    if (v.language == target_lang) targets.insert(v.id);
  }
  if (targets.empty()) {
    throw Error(ErrorCode::kNotFound, "no vocabulary in language '" + target_lang + "'");
  }

  std::map<std::pair<std::string, std::string>, TranslationCandidate> best;
  for (const auto& v : reg.vocabularies()) {
    if (source_lang && v.language != *source_lang) continue;
    auto found = reg.lookup_term(v.id, term);
    if (!found) continue;
    LookupFilter filter;
    filter.source_vocab = v.id;
    filter.relations = std::set<RelationType>{RelationType::kEquivalent};
    filter.target_vocabs = targets;
    for (const auto& hit : store.mappings_from(found->normalized, filter)) {
      if (!hit.mapping.target->is_single()) continue;
      TranslationCandidate c{hit.mapping.target->term(), hit.crosswalk.target,
                             hit.mapping.rating, hit.crosswalk};
      auto key = std::make_pair(c.term, c.vocab);
      auto it = best.find(key);
      if (it == best.end()) {
        best.emplace(std::move(key), std::move(c));
      } else if (c.rating > it->second.rating) {
        it->second = std::move(c);
      }
    }
  }
  std::vector<TranslationCandidate> out;
  for (auto& [key, c] : best) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.rating != b.rating) return a.rating > b.rating;
    if (a.term != b.term) return a.term < b.term;
    return a.vocab < b.vocab;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && is_blank(s.substr(0, 1))) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.substr(s.size() - 1))) s.remove_suffix(1);
  return std::string(s);
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::vector<std::filesystem::path> path_list(std::string_view value) {
  std::vector<std::filesystem::path> out;
  for (auto part : split(value, ",")) {
    std::string p = trim(part);
    if (!p.empty()) out.emplace_back(p);
  }
  return out;
}

}  // namespace

ServiceConfig parse_service_config(std::istream& in) {
  ServiceConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto eq = text.find('=');
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::kFormat,
                   "config line " + std::to_string(line_no) + ": " + why);
    };
    if (eq == std::string::npos) throw bad("expected key=value");
    std::string key = trim(std::string_view(text).substr(0, eq));
    std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key == "host") {
      config.host = value;
    } else if (key == "port") {
      auto port = parse_int<int>(value);
      if (!port) throw bad("port must be an integer");
      config.port = *port;
    } else if (key == "data_dir") {
      config.data_dir = value;
    } else if (key == "vocabularies") {
      config.vocabularies = value;
    } else if (key == "terms") {
      auto more = path_list(value);
      config.term_lists.insert(config.term_lists.end(), more.begin(), more.end());
    } else if (key == "crosswalks") {
      auto more = path_list(value);
      config.crosswalks.insert(config.crosswalks.end(), more.begin(), more.end());
    } else if (key == "read_timeout_ms") {
      auto ms = parse_int<long>(value);
      if (!ms || *ms <= 0) throw bad("read_timeout_ms must be a positive integer");
      config.read_timeout = std::chrono::milliseconds(*ms);
    } else if (key == "max_expansion_terms") {
      auto n = parse_int<std::size_t>(value);
      if (!n) throw bad("max_expansion_terms must be a positive integer");
      config.max_expansion_terms = *n;
    } else {
      throw bad("unknown key '" + key + "'");
    }
  }
  return config;
}

void validate(const ServiceConfig& config) {
  if (config.port < 1 || config.port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "port must be in [1, 65535]");
  }
  if (config.max_expansion_terms == 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_expansion_terms must be positive");
  }
  if (!config.data_dir && !config.vocabularies && config.term_lists.empty() &&
      config.crosswalks.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no data path configured");
  }
}

Store load_service_data(const ServiceConfig& config) {
  Store store;
  if (config.data_dir) store = load_data_dir(*config.data_dir);
  auto open = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::kNotFound, "cannot read " + p.string());
    return in;
  };
  if (config.vocabularies) {
    auto in = open(*config.vocabularies);
    read_vocabularies(store.registry(), in);
  }
  for (const auto& p : config.crosswalks) {
    auto in = open(p);
    auto report = import_tsv(store, in);
    if (!report.errors.empty()) {
      throw Error(ErrorCode::kFormat, p.string() + " line " +
                                          std::to_string(report.errors[0].line) +
                                          ": " + report.errors[0].reason);
    }
  }
  // Term lists may target vocabularies that only a crosswalk file introduced.
  for (const auto& p : config.term_lists) {
    auto in = open(p);
    store.registry().import_term_list(in);
  }
  return store;
}

std::string describe_store(const Store& store) {
  std::size_t terms = 0;
  auto vocabularies = store.registry().vocabularies();
  for (const auto& v : vocabularies) terms += v.term_count;
  auto stats = store.stats();
  std::map<RelationType, std::size_t> relations;
  for (const auto& [id, s] : stats) {
    for (const auto& [r, n] : s.by_relation) relations[r] += n;
  }
  std::ostringstream out;
  out << vocabularies.size() << " vocabularies, " << terms << " terms, "
      << stats.size() << " crosswalks, " << store.mapping_count() << " mappings";
  for (const auto& [r, n] : relations) out << ", " << symbol(r) << ':' << n;
  return out.str();
}

// ---------------------------------------------------------------------------
// Routes

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

std::string url_decode(std::string_view s, bool plus_is_space) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '+' && plus_is_space) {
      out += ' ';
    } else if (c == '%') {
      auto hex = [](char h) -> int {
        if (h >= '0' && h <= '9') return h - '0';
        if (h >= 'a' && h <= 'f') return h - 'a' + 10;
        if (h >= 'A' && h <= 'F') return h - 'A' + 10;
        return -1;
      };
      if (i + 2 >= s.size() || hex(s[i + 1]) < 0 || hex(s[i + 2]) < 0) {
        throw HttpError{400, "bad_request", "malformed percent escape"};
      }
      out += static_cast<char>(hex(s[i + 1]) * 16 + hex(s[i + 2]));
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

using Params = std::map<std::string, std::string>;

Params parse_params(std::string_view query) {
  Params params;
  if (query.empty()) return params;
  for (auto pair : split(query, "&")) {
    if (pair.empty()) continue;
    auto eq = pair.find('=');
    std::string key = url_decode(pair.substr(0, eq), true);
    std::string value =
        eq == std::string_view::npos ? "" : url_decode(pair.substr(eq + 1), true);
    if (params.contains(key)) {
      throw HttpError{400, "bad_request", "repeated parameter '" + key + "'"};
    }
    params.emplace(std::move(key), std::move(value));
  }
  return params;
}

std::optional<std::string> param(const Params& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

void allow_only(const Params& params, std::initializer_list<std::string_view> keys) {
  for (const auto& [key, value] : params) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw HttpError{400, "bad_request", "unknown parameter '" + key + "'"};
    }
  }
}

json rating_json(Rating r) {
  if (r == Rating::kUnrated) return nullptr;
  return std::string(to_string(r));
}

Rating parse_min_rating(const std::string& text) {
  auto r = parse_rating(text);
  if (!r || *r == Rating::kUnrated) {
    throw HttpError{400, "bad_request", "min_rating must be high, medium or low"};
  }
  return *r;
}

std::set<std::string> parse_vocab_list(const std::string& text) {
  std::set<std::string> out;
  for (auto part : split(text, ",")) {
    std::string id = trim(part);
    if (!id.empty()) out.insert(id);
  }
  return out;
}

std::string dump(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

json vocabularies(const Store& store) {
  json list = json::array();
  for (const auto& v : store.registry().vocabularies()) {
    list.push_back({{"id", v.id},
                    {"name", v.name},
                    {"language", v.language},
                    {"discipline", v.discipline},
                    {"term_count", v.term_count}});
  }
  return {{"v", 1}, {"vocabularies", std::move(list)}};
}

json term_mappings(const Store& store, const std::string& vocab,
                   const std::string& term, const Params& params) {
  allow_only(params, {"relation", "target", "min_rating"});
  if (!store.registry().has_vocabulary(vocab)) {
    throw HttpError{404, "not_found", "unknown vocabulary '" + vocab + "'"};
  }
  LookupFilter filter;
  filter.source_vocab = vocab;
  if (auto r = param(params, "relation")) filter.relations = parse_relation_list(*r);
  if (auto t = param(params, "target")) filter.target_vocabs = parse_vocab_list(*t);
  if (auto m = param(params, "min_rating")) filter.min_rating = parse_min_rating(*m);
  json list = json::array();
  for (const auto& hit : store.mappings_from(term, filter)) {
    const Mapping& m = hit.mapping;
    json targets = json::array();
    if (m.target) {
      for (const auto& t : m.target->terms()) targets.push_back(t);
    }
    list.push_back({{"relation", symbol(m.relation)},
                    {"target_vocab", m.target ? json(hit.crosswalk.target) : json()},
                    {"target_terms", std::move(targets)},
                    {"rating", rating_json(m.rating)}});
  }
  return {{"v", 1}, {"mappings", std::move(list)}};
}

json expand(const Store& store, const Params& params, std::size_t default_max) {
  allow_only(params, {"q", "relations", "vocabs", "max"});
  auto q = param(params, "q");
  if (!q) throw HttpError{400, "bad_request", "missing parameter 'q'"};
  ExpansionConfig config;
  config.max_terms_per_leaf = default_max;
  if (auto r = param(params, "relations")) config.relations = parse_relation_list(*r);
  if (auto v = param(params, "vocabs")) config.target_vocabs = parse_vocab_list(*v);
  if (auto m = param(params, "max")) {
    auto n = parse_int<std::size_t>(*m);
    if (!n || *n == 0) {
      throw HttpError{400, "bad_request", "max must be a positive integer"};
    }
    config.max_terms_per_leaf = *n;
  }
  QueryAst ast = parse_query(*q);
  auto result = expand_query(ast, store, config);
  json trace = json::array();
  for (const auto& leaf : result.trace) {
    json added = json::array();
    for (const auto& e : leaf.added) {
      added.push_back({{"term", e.added},
                       {"source_vocab", e.source_vocab},
                       {"target_vocab", e.target_vocab},
                       {"relation", symbol(e.relation)},
                       {"rating", rating_json(e.rating)}});
    }
    trace.push_back({{"leaf", leaf.leaf},
                     {"leaf_index", leaf.leaf_index},
                     {"added", std::move(added)}});
  }
  return {{"v", 1},
          {"original", render_query(ast)},
          {"expanded", render_query(result.ast)},
          {"trace", std::move(trace)}};
}

json translation(const Store& store, const Params& params) {
  allow_only(params, {"term", "from_lang", "to_lang"});
  auto term = param(params, "term");
  auto to = param(params, "to_lang");
  if (!term) throw HttpError{400, "bad_request", "missing parameter 'term'"};
  if (!to) throw HttpError{400, "bad_request", "missing parameter 'to_lang'"};
  json list = json::array();
  for (const auto& c : translate(store, *term, param(params, "from_lang"), *to)) {
    list.push_back({{"term", c.term},
                    {"vocab", c.vocab},
                    {"rating", rating_json(c.rating)},
                    {"crosswalk", c.crosswalk.to_string()}});
  }
  return {{"v", 1}, {"candidates", std::move(list)}};
}

HttpResponse error_response(int status, std::string_view code,
                            std::string_view message) {
  json body = {{"v", 1},
               {"error", {{"code", std::string(code)}, {"message", std::string(message)}}}};
  return HttpResponse{status, dump(body)};
}

}  // namespace

Api::Api(std::shared_ptr<const Store> store, std::size_t max_expansion_terms)
    : store_(std::move(store)), max_expansion_terms_(max_expansion_terms) {}

HttpResponse Api::get(std::string_view target) const {
  try {
    auto qmark = target.find('?');
    std::string_view raw_path = target.substr(0, qmark);
    Params params = parse_params(
        qmark == std::string_view::npos ? std::string_view{} : target.substr(qmark + 1));
    std::vector<std::string> segments;
    for (auto seg : split(raw_path, "/")) {
      if (!seg.empty()) segments.push_back(url_decode(seg, false));
    }
    const Store& store = *store_;
    if (segments.size() == 1 && segments[0] == "vocabularies") {
      allow_only(params, {});
      return {200, dump(vocabularies(store))};
    }
    if (segments.size() == 4 && segments[0] == "terms" && segments[3] == "mappings") {
      return {200, dump(term_mappings(store, segments[1], segments[2], params))};
    }
    if (segments.size() == 1 && segments[0] == "expand") {
      return {200, dump(expand(store, params, max_expansion_terms_))};
    }
    if (segments.size() == 1 && segments[0] == "translate") {
      return {200, dump(translation(store, params))};
    }
    return error_response(404, "not_found", "no route for " + std::string(raw_path));
  } catch (const HttpError& e) {
    return error_response(e.status, e.code, e.message);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kNotFound:
        return error_response(404, to_string(e.code()), e.what());
      case ErrorCode::kConflict:
      case ErrorCode::kFormat:
        return error_response(500, to_string(e.code()), e.what());
      default:
        return error_response(400, to_string(e.code()), e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// HTTP transport

struct Server::Impl {
  Impl(const ServiceConfig& c, std::shared_ptr<const Store> store)
      : config(c), api(std::move(store), c.max_expansion_terms) {}

  ServiceConfig config;
  Api api;
  httplib::Server http;
  int port = 0;
};

Server::Server(const ServiceConfig& config, std::shared_ptr<const Store> store)
    : impl_(std::make_unique<Impl>(config, std::move(store))) {
  auto& http = impl_->http;
  http.new_task_queue = [] { return new httplib::ThreadPool(64); };
  http.set_read_timeout(config.read_timeout);
  http.set_keep_alive_max_count(100);
  const Api& api = impl_->api;
  http.Get(".*", [&api](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = api.get(req.target);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  auto not_allowed = [](const httplib::Request&, httplib::Response& res) {
    res.status = 405;
    res.set_content(
        R"({"error":{"code":"method_not_allowed","message":"read-only service"},"v":1})",
        "application/json");
  };
  http.Post(".*", not_allowed);
  http.Put(".*", not_allowed);
  http.Delete(".*", not_allowed);
  http.Patch(".*", not_allowed);
}

Server::~Server() { stop(); }

int Server::bind(bool any_port) {
  auto& impl = *impl_;
  if (any_port) {
    impl.port = impl.http.bind_to_any_port(impl.config.host);
  } else {
    validate(impl.config);
    impl.port = impl.http.bind_to_port(impl.config.host, impl.config.port)
                    ? impl.config.port
                    : -1;
  }
  if (impl.port <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot bind " + impl.config.host + ":" +
                    std::to_string(impl.config.port));
  }
  return impl.port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

bool Server::is_running() const { return impl_->http.is_running(); }

}  // namespace komohe
