#include "komohe/storage.hpp"

#include <fstream>
#include <string>

#include "komohe/error.hpp"
#include "text_util.hpp"

namespace komohe {

namespace fs = std::filesystem;

namespace {

void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormat, "missing header '" + std::string(header) + "'");
  }
  strip_cr(line);
  if (line != header) {
    throw Error(ErrorCode::kFormat, "bad header: expected '" +
                                        std::string(header) + "'");
  }
}

template <typename Writer>
void write_atomically(const fs::path& target, Writer&& writer) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kFormat, "cannot write " + tmp.string());
    }
    writer(out);
    out.flush();
    if (!out) throw Error(ErrorCode::kFormat, "write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

void read_vocabularies(Registry& registry, std::istream& in) {
  expect_header(in, kVocabulariesHeader);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, "\t");
    if (fields.size() != 4) {
      throw Error(ErrorCode::kFormat,
                  "vocabularies line " + std::to_string(line_no) +
                      ": expected 4 fields");
    }
    Vocabulary v{std::string(fields[0]), std::string(fields[1]),
                 std::string(fields[2]), std::string(fields[3]), 0};
    if (registry.has_vocabulary(v.id)) {
      registry.update_vocabulary(v);
    } else {
      registry.register_vocabulary(std::move(v));
    }
  }
}

void write_vocabularies(const Registry& registry, std::ostream& out) {
  out << kVocabulariesHeader << '\n';
  for (const auto& v : registry.vocabularies()) {
    out << v.id << '\t' << v.name << '\t' << v.language << '\t'
        << v.discipline << '\n';
  }
}

void read_terms(Registry& registry, std::istream& in) {
  expect_header(in, kTermsHeader);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kFormat,
                  "terms line " + std::to_string(line_no) + ": expected 2 fields");
    }
    registry.add_term(line.substr(0, tab), line.substr(tab + 1));
  }
}

void write_terms(const Registry& registry, std::ostream& out) {
  out << kTermsHeader << '\n';
  for (const auto& v : registry.vocabularies()) {
    for (const auto& t : registry.terms(v.id)) {
      out << v.id << '\t' << t.display << '\n';
    }
  }
}

Store load_data_dir(const fs::path& dir) {
  Store store;
  auto open = [&](const char* name) {
    return std::ifstream(dir / name, std::ios::binary);
  };
  if (auto in = open("vocabularies.tsv")) read_vocabularies(store.registry(), in);
  if (auto in = open("terms.tsv")) read_terms(store.registry(), in);
  if (auto in = open("crosswalks.tsv")) {
    auto report = import_tsv(store, in);
    if (!report.errors.empty()) {
      const auto& e = report.errors.front();
      throw Error(ErrorCode::kFormat, (dir / "crosswalks.tsv").string() +
                                          " line " + std::to_string(e.line) +
                                          ": " + e.reason);
    }
  }
  return store;
}

void save_data_dir(const Store& store, const fs::path& dir) {
  fs::create_directories(dir);
  write_atomically(dir / "vocabularies.tsv", [&](std::ostream& out) {
    write_vocabularies(store.registry(), out);
  });
  write_atomically(dir / "terms.tsv",
                   [&](std::ostream& out) { write_terms(store.registry(), out); });
  write_atomically(dir / "crosswalks.tsv",
                   [&](std::ostream& out) { dump_tsv(store, out); });
}

}  // namespace komohe
