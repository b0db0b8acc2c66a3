#include "komohe/cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "komohe/assessment.hpp"
#include "komohe/error.hpp"
#include "komohe/inference.hpp"
#include "komohe/query.hpp"
#include "komohe/service.hpp"
#include "komohe/skos.hpp"
#include "komohe/storage.hpp"

namespace komohe::cli {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot read " + path);
  return in;
}

void report_lines(std::ostream& err, const std::string& what,
                  const std::vector<LineError>& lines) {
  for (const auto& e : lines) {
    err << what << " line " << e.line << ": " << e.reason << '\n';
  }
}

std::vector<CrosswalkId> resolve_all(const Store& store,
                                     const std::vector<std::string>& names) {
  if (names.empty()) return store.crosswalks();
  std::vector<CrosswalkId> ids;
  for (const auto& n : names) ids.push_back(store.resolve_crosswalk(n));
  return ids;
}

std::set<std::string> vocab_set(const std::string& list) {
  std::set<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

Rating min_rating_of(const std::string& text) {
  auto r = parse_rating(text);
  if (!r || *r == Rating::kUnrated) {
    throw Error(ErrorCode::kInvalidArgument,
                "rating must be high, medium or low");
  }
  return *r;
}

// Blocks SIGINT/SIGTERM for the process threads and stops the server when
// one arrives.
int serve(const ServiceConfig& config, std::ostream& err) {
  validate(config);
  auto store = std::make_shared<const Store>(load_service_data(config));
  err << "komohe: loaded " << describe_store(*store) << '\n';

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Server server(config, store);
  int port = server.bind();
  err << "komohe: serving on " << config.host << ':' << port << '\n';

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // Wake the waiter if the server stopped for another reason.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  err << "komohe: stopped\n";
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-concordance terminology mapping service", "komohe"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string data_dir;
  if (const char* env = std::getenv("KOMOHE_DATA")) data_dir = env;
  if (data_dir.empty()) data_dir = "komohe-data";
  app.add_option("--data", data_dir, "Data directory (default $KOMOHE_DATA)");

  // import
  std::string import_path;
  auto* import_cmd = app.add_subcommand("import", "Import a cross-concordance TSV");
  import_cmd->add_option("tsv", import_path)->required();

  // export
  std::vector<std::string> crosswalk_names;
  auto* export_cmd = app.add_subcommand("export", "Export crosswalks as TSV");
  export_cmd->add_option("--crosswalk", crosswalk_names, "Crosswalk id, e.g. A-B");

  // vocab / terms
  std::string vocab_id;
  std::optional<std::string> vocab_name, vocab_lang, vocab_discipline;
  auto* vocab_cmd = app.add_subcommand("vocab", "Register or update a vocabulary");
  vocab_cmd->add_option("id", vocab_id)->required();
  std::string term_file;
  auto* terms_cmd = app.add_subcommand("terms", "Import a term list");
  terms_cmd->add_option("vocab", vocab_id)->required();
  terms_cmd->add_option("file", term_file)->required();
  for (auto* cmd : {vocab_cmd, terms_cmd}) {
    cmd->add_option("--name", vocab_name);
    cmd->add_option("--lang", vocab_lang, "ISO 639-1 code");
    cmd->add_option("--discipline", vocab_discipline);
  }

  // lookup
  std::string term;
  std::optional<std::string> lookup_vocab, relation_list, min_rating;
  bool reverse = false;
  auto* lookup_cmd = app.add_subcommand("lookup", "Mappings of a term");
  lookup_cmd->add_option("term", term)->required();
  lookup_cmd->add_option("--vocab", lookup_vocab,
                         "Source vocabulary (target vocabulary with --reverse)");
  lookup_cmd->add_option("--relation", relation_list, "Relation symbols, e.g. =,<");
  lookup_cmd->add_option("--min-rating", min_rating);
  lookup_cmd->add_flag("--reverse", reverse, "Find mappings that target the term");

  // expand
  std::string query;
  std::optional<std::string> relations, vocabs;
  std::size_t max_terms = 32;
  bool under_not = false;
  bool show_trace = false;
  auto* expand_cmd = app.add_subcommand("expand", "Expand a Boolean query");
  expand_cmd->add_option("query", query)->required();
  expand_cmd->add_option("--relations", relations, "Relation symbols, default =");
  expand_cmd->add_option("--vocabs", vocabs, "Target vocabularies");
  expand_cmd->add_option("--max", max_terms, "Max added terms per leaf")
      ->check(CLI::PositiveNumber);
  expand_cmd->add_option("--min-rating", min_rating);
  expand_cmd->add_flag("--expand-under-not", under_not);
  expand_cmd->add_flag("--trace", show_trace, "Print the expansion trace");

  // translate
  std::string to_lang;
  std::optional<std::string> from_lang;
  auto* translate_cmd = app.add_subcommand("translate", "Cross-language lookup");
  translate_cmd->add_option("term", term)->required();
  translate_cmd->add_option("--to", to_lang)->required();
  translate_cmd->add_option("--from", from_lang);

  // infer / variants
  std::string from, to, via;
  bool promote_flag = false;
  auto* infer_cmd = app.add_subcommand("infer", "Infer mappings through a pivot");
  infer_cmd->add_option("--from", from)->required();
  infer_cmd->add_option("--to", to)->required();
  infer_cmd->add_option("--via", via)->required();
  infer_cmd->add_flag("--promote", promote_flag, "Store the inferred mappings");
  std::string target_vocab;
  auto* variants_cmd = app.add_subcommand("variants", "Report variant mappings");
  variants_cmd->add_option("--target", target_vocab)->required();

  // check
  std::string crosswalk_name, corpus_path;
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  auto* check_cmd = app.add_subcommand("check", "Assess sampled mappings on a corpus");
  check_cmd->add_option("--crosswalk", crosswalk_name)->required();
  check_cmd->add_option("--corpus", corpus_path)->required();
  check_cmd->add_option("--sample", sample)->required()->check(CLI::PositiveNumber);
  check_cmd->add_option("--seed", seed)->required();

  // skos
  auto* skos_export_cmd = app.add_subcommand("skos-export", "Export as SKOS N-Triples");
  skos_export_cmd->add_option("--crosswalk", crosswalk_names);
  std::string skos_path, skos_source, skos_target;
  auto* skos_import_cmd = app.add_subcommand("skos-import", "Import SKOS N-Triples");
  skos_import_cmd->add_option("file", skos_path)->required();
  skos_import_cmd->add_option("--source", skos_source)->required();
  skos_import_cmd->add_option("--target", skos_target)->required();

  auto* stats_cmd = app.add_subcommand("stats", "Per-crosswalk tallies");

  // serve
  std::string config_path;
  std::optional<std::string> host;
  std::optional<int> port;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP lookup service");
  serve_cmd->add_option("--config", config_path)->required();
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);

  std::vector<std::string> argv_storage{"komohe"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    fs::path data(data_dir);
    auto load = [&] { return load_data_dir(data); };

    if (*import_cmd) {
      Store store = load();
      auto in = open_input(import_path);
      auto report = import_tsv(store, in);
      report_lines(err, import_path, report.errors);
      save_data_dir(store, data);
      out << "crosswalks_created\t" << report.crosswalks_created << '\n'
          << "mappings_added\t" << report.mappings_added << '\n'
          << "errors\t" << report.errors.size() << '\n';
      return kExitOk;
    }
    if (*export_cmd) {
      Store store = load();
      auto ids = resolve_all(store, crosswalk_names);
      export_tsv(store, ids, out);
      return kExitOk;
    }
    if (*vocab_cmd || *terms_cmd) {
      Store store = load();
      Registry& reg = store.registry();
      if (!reg.has_vocabulary(vocab_id)) {
        reg.register_vocabulary(Vocabulary{vocab_id, vocab_name.value_or(vocab_id),
                                           vocab_lang.value_or(""),
                                           vocab_discipline.value_or(""), 0});
      } else if (vocab_name || vocab_lang || vocab_discipline) {
        Vocabulary v = reg.vocabulary(vocab_id);
        v.name = vocab_name.value_or(v.name);
        v.language = vocab_lang.value_or(v.language);
        v.discipline = vocab_discipline.value_or(v.discipline);
        reg.update_vocabulary(v);
      }
      if (*terms_cmd) {
        auto in = open_input(term_file);
        auto result = reg.import_term_list(in);
        if (result.vocabulary != vocab_id) {
          throw Error(ErrorCode::kInvalidArgument,
                      "term list is for '" + result.vocabulary + "', not '" +
                          vocab_id + "'");
        }
        out << "terms_added\t" << result.terms_added << '\n'
            << "duplicates\t" << result.duplicates << '\n';
      }
      save_data_dir(store, data);
      const Vocabulary& v = reg.vocabulary(vocab_id);
      err << v.id << ": " << v.term_count << " terms\n";
      return kExitOk;
    }
    if (*lookup_cmd) {
      Store store = load();
      std::vector<MappingHit> hits;
      if (reverse) {
        hits = store.mappings_to(term, lookup_vocab);
        if (relation_list || min_rating) {
          LookupFilter f;
          if (relation_list) f.relations = parse_relation_list(*relation_list);
          if (min_rating) f.min_rating = min_rating_of(*min_rating);
          std::erase_if(hits, [&](const MappingHit& h) {
            if (f.relations && !f.relations->contains(h.mapping.relation)) return true;
            return f.min_rating && (h.mapping.rating == Rating::kUnrated ||
                                    h.mapping.rating < *f.min_rating);
          });
        }
      } else {
        LookupFilter filter;
        filter.source_vocab = lookup_vocab;
        if (relation_list) filter.relations = parse_relation_list(*relation_list);
        if (min_rating) filter.min_rating = min_rating_of(*min_rating);
        hits = store.mappings_from(term, filter);
      }
      for (const auto& h : hits) {
        out << format_tsv_row(store, h.crosswalk, h.mapping) << '\n';
      }
      return kExitOk;
    }
    if (*expand_cmd) {
      Store store = load();
      ExpansionConfig config;
      if (relations) config.relations = parse_relation_list(*relations);
      if (vocabs) config.target_vocabs = vocab_set(*vocabs);
      if (min_rating) config.min_rating = min_rating_of(*min_rating);
      config.max_terms_per_leaf = max_terms;
      config.expand_under_not = under_not;
      auto result = expand_query(parse_query(query), store, config);
      out << render_query(result.ast) << '\n';
      if (show_trace) {
        for (const auto& leaf : result.trace) {
          for (const auto& e : leaf.added) {
            out << "#trace\t" << leaf.leaf_index << '\t' << leaf.leaf << '\t'
                << e.added << '\t' << e.source_vocab << '\t' << e.target_vocab
                << '\t' << symbol(e.relation) << '\t' << to_string(e.rating)
                << '\n';
          }
        }
      }
      return kExitOk;
    }
    if (*translate_cmd) {
      Store store = load();
      for (const auto& c : translate(store, term, from_lang, to_lang)) {
        out << c.term << '\t' << c.vocab << '\t' << to_string(c.rating) << '\t'
            << c.crosswalk.to_string() << '\n';
      }
      return kExitOk;
    }
    if (*infer_cmd) {
      Store store = load();
      auto inferred = infer_pivot(store, from, to, via);
      write_inferred_tsv(store, inferred, out);
      if (promote_flag) {
        auto report = promote(store, inferred);
        save_data_dir(store, data);
        err << "promoted " << report.added << " mappings ("
            << report.already_present << " already present)\n";
      }
      return kExitOk;
    }
    if (*variants_cmd) {
      Store store = load();
      for (const auto& c : detect_variant_mappings(store, target_vocab)) {
        out << c.term << '\t' << c.vocab_pair.first << '\t' << c.vocab_pair.second
            << '\t' << c.target_vocab << '\t' << c.targets.first.key() << '\t'
            << c.targets.second.key() << '\n';
      }
      return kExitOk;
    }
    if (*check_cmd) {
      Store store = load();
      auto id = store.resolve_crosswalk(crosswalk_name);
      auto in = open_input(corpus_path);
      auto corpus = load_corpus(in);
      report_lines(err, corpus_path, corpus.errors);
      auto report = sample_assessment(store, id, corpus.corpus, sample, seed);
      write_report(store, report, out);
      return kExitOk;
    }
    if (*skos_export_cmd) {
      Store store = load();
      auto ids = resolve_all(store, crosswalk_names);
      auto report = skos::export_skos(store, ids, out);
      err << "triples " << report.triples << ", skipped_null "
          << report.skipped_null << ", skipped_combination "
          << report.skipped_combination << ", ratings_dropped "
          << report.ratings_dropped << '\n';
      return kExitOk;
    }
    if (*skos_import_cmd) {
      Store store = load();
      auto in = open_input(skos_path);
      auto report = skos::import_skos(store, in, skos_source, skos_target);
      report_lines(err, skos_path + " warning:", report.warnings);
      report_lines(err, skos_path, report.errors);
      save_data_dir(store, data);
      out << "mappings_added\t" << report.mappings_added << '\n'
          << "errors\t" << report.errors.size() << '\n'
          << "warnings\t" << report.warnings.size() << '\n';
      return kExitOk;
    }
    if (*stats_cmd) {
      Store store = load();
      out << "#crosswalk\tmappings";
      for (RelationType r : kAllRelations) out << '\t' << symbol(r);
      out << "\thigh\tmedium\tlow\tunrated\n";
      for (const auto& [id, s] : store.stats()) {
        out << id.to_string() << '\t' << s.mapping_count;
        for (RelationType r : kAllRelations) {
          auto it = s.by_relation.find(r);
          out << '\t' << (it == s.by_relation.end() ? 0 : it->second);
        }
        for (Rating r : {Rating::kHigh, Rating::kMedium, Rating::kLow, Rating::kUnrated}) {
          auto it = s.by_rating.find(r);
          out << '\t' << (it == s.by_rating.end() ? 0 : it->second);
        }
        out << '\n';
      }
      return kExitOk;
    }
    if (*serve_cmd) {
      auto in = open_input(config_path);
      ServiceConfig config = parse_service_config(in);
      if (host) config.host = *host;
      if (port) config.port = *port;
      if (!config.data_dir && !config.vocabularies && config.term_lists.empty() &&
          config.crosswalks.empty()) {
        config.data_dir = data;
      }
      return serve(config, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace komohe::cli
