#include <gtest/gtest.h>

#include <sstream>

#include "komohe/crosswalk_store.hpp"
#include "komohe/error.hpp"
#include "test_support.hpp"

namespace komohe {
namespace {

using testing::export_all;
using testing::load_fixture;

std::vector<std::string> describe(const std::vector<MappingHit>& hits) {
  std::vector<std::string> out;
  for (const auto& h : hits) {
    out.push_back(h.mapping.source.key() + " " + std::string(symbol(h.mapping.relation)) +
                  " " + (h.mapping.target ? h.mapping.target->key() : ""));
  }
  return out;
}

class TwoVocabStore : public ::testing::Test {
 protected:
  void SetUp() override {
    store.registry().register_vocabulary({"A", "A", "en", "", 0});
    store.registry().register_vocabulary({"B", "B", "en", "", 0});
    for (const char* t : {"hacker", "isdn device", "isdn"}) store.registry().add_term("A", t);
    for (const char* t : {"hacking", "computers", "crime", "telecommunications"}) {
      store.registry().add_term("B", t);
    }
    ab = store.add_crosswalk("A", "B");
  }

  Store store;
  CrosswalkId ab;
};

TEST(RelationType, SymbolsRoundTrip) {
  for (RelationType r : kAllRelations) EXPECT_EQ(parse_relation(symbol(r)), r);
  EXPECT_FALSE(parse_relation("\xE2\x89\x88"));  // ≈
  EXPECT_FALSE(parse_relation("^+"));
  EXPECT_FALSE(parse_relation(""));
}

TEST(Rating, TotalOrder) {
  EXPECT_GT(Rating::kHigh, Rating::kMedium);
  EXPECT_GT(Rating::kMedium, Rating::kLow);
  EXPECT_EQ(parse_rating(""), Rating::kUnrated);
  EXPECT_FALSE(parse_rating("HIGH"));
}

TEST(Concept, CombinationNeedsTwoTerms) {
  EXPECT_THROW(Concept::combination({"x"}), Error);
  auto c = Concept::combination({"Computers", "Crime"});
  EXPECT_TRUE(c.is_combination());
  EXPECT_EQ(c.key(), "computers + crime");
  EXPECT_NE(c, Concept::single("computers"));
}

TEST_F(TwoVocabStore, AddMappingStoresAndIndexes) {
  store.add_mapping(ab, {Concept::single("hacker"), RelationType::kEquivalent,
                         Concept::single("hacking"), Rating::kHigh});
  store.add_mapping(ab, {Concept::single("isdn device"), RelationType::kNull,
                         std::nullopt, Rating::kUnrated});
  EXPECT_EQ(store.mapping_count(), 2u);
  EXPECT_EQ(describe(store.mappings_from("Hacker")),
            std::vector<std::string>{"hacker = hacking"});
}

TEST_F(TwoVocabStore, AddMappingRejectsInvalidMappings) {
  auto code = [&](Mapping m) {
    try {
      store.add_mapping(ab, std::move(m));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kFormat;
  };
  EXPECT_EQ(code({Concept::single("hacker"), RelationType::kEquivalent, std::nullopt,
                  Rating::kHigh}),
            ErrorCode::kInvalidMapping);
  EXPECT_EQ(code({Concept::single("isdn"), RelationType::kNull,
                  Concept::single("crime"), Rating::kLow}),
            ErrorCode::kInvalidMapping);
  EXPECT_EQ(code({Concept::combination({"hacker", "isdn"}), RelationType::kAssociation,
                  Concept::single("crime"), Rating::kLow}),
            ErrorCode::kInvalidMapping);
  EXPECT_EQ(code({Concept::single("unknown"), RelationType::kEquivalent,
                  Concept::single("crime"), Rating::kLow}),
            ErrorCode::kNotFound);
  EXPECT_EQ(code({Concept::single("hacker"), RelationType::kEquivalent,
                  Concept::single("missing"), Rating::kLow}),
            ErrorCode::kNotFound);
  Mapping ok{Concept::single("hacker"), RelationType::kEquivalent,
             Concept::single("hacking"), Rating::kHigh};
  store.add_mapping(ab, ok);
  EXPECT_EQ(code(ok), ErrorCode::kConflict);
  ok.rating = Rating::kLow;  // rating is not part of the triple
  EXPECT_EQ(code(ok), ErrorCode::kConflict);
  EXPECT_THROW(store.add_mapping({"A", "Q"}, ok), Error);
}

TEST_F(TwoVocabStore, CrosswalkNeedsDistinctRegisteredVocabularies) {
  EXPECT_THROW(store.add_crosswalk("A", "A"), Error);
  EXPECT_THROW(store.add_crosswalk("A", "Z"), Error);
  EXPECT_THROW(store.add_crosswalk("A", "B"), Error);
  EXPECT_NO_THROW(store.add_crosswalk("B", "A"));
}

TEST(Crosswalk, ResolveHandlesHyphenatedIds) {
  Store store;
  for (const char* v : {"iz-soz", "en", "A", "B"}) {
    store.registry().register_vocabulary({v, v, "", "", 0});
  }
  store.add_crosswalk("iz-soz", "en");
  store.add_crosswalk("A", "B");
  EXPECT_EQ(store.resolve_crosswalk("iz-soz-en"), (CrosswalkId{"iz-soz", "en"}));
  EXPECT_EQ(store.resolve_crosswalk("A-B"), (CrosswalkId{"A", "B"}));
  EXPECT_THROW(store.resolve_crosswalk("B-A"), Error);
}

TEST(Tab1, MappingsFrom) {
  Store store = load_fixture("tab1.tsv");
  EXPECT_EQ(describe(store.mappings_from("hacker")),
            (std::vector<std::string>{"hacker = hacking", "hacker ^ computers + crime",
                                      "hacker ^ internet + security"}));
  LookupFilter broader;
  broader.relations = std::set<RelationType>{RelationType::kBroaderTarget};
  EXPECT_EQ(describe(store.mappings_from("isdn", broader)),
            std::vector<std::string>{"isdn < telecommunications"});
  EXPECT_TRUE(store.mappings_from("zzz").empty());
}

TEST(Tab1, MappingsFromFilters) {
  Store store = load_fixture("tab1.tsv");
  LookupFilter high;
  high.min_rating = Rating::kHigh;
  EXPECT_EQ(describe(store.mappings_from("hacker", high)),
            std::vector<std::string>{"hacker = hacking"});
  LookupFilter other_vocab;
  other_vocab.source_vocab = "B";
  EXPECT_TRUE(store.mappings_from("hacker", other_vocab).empty());
  LookupFilter medium;
  medium.min_rating = Rating::kMedium;
  EXPECT_EQ(store.mappings_from("hacker", medium).size(), 3u);
  // Unrated never passes a rating threshold.
  LookupFilter low;
  low.min_rating = Rating::kLow;
  EXPECT_TRUE(store.mappings_from("isdn device", low).empty());
}

TEST(Tab1, MappingsTo) {
  Store store = load_fixture("tab1.tsv");
  EXPECT_EQ(describe(store.mappings_to("hacking")),
            std::vector<std::string>{"hacker = hacking"});
  EXPECT_EQ(describe(store.mappings_to("crime")),
            std::vector<std::string>{"hacker ^ computers + crime"});
  EXPECT_TRUE(store.mappings_to("isdn device").empty());
  EXPECT_TRUE(store.mappings_to("hacking", std::string("A")).empty());
}

TEST(Tab1, Stats) {
  Store store = load_fixture("tab1.tsv");
  auto stats = store.stats();
  ASSERT_EQ(stats.size(), 1u);
  const CrosswalkStats& s = stats.at({"A", "B"});
  EXPECT_EQ(s.mapping_count, 6u);
  std::map<RelationType, std::size_t> expected{
      {RelationType::kEquivalent, 1},    {RelationType::kAssociation, 2},
      {RelationType::kNull, 1},          {RelationType::kBroaderTarget, 1},
      {RelationType::kNarrowerTarget, 1}};
  EXPECT_EQ(s.by_relation, expected);
  EXPECT_TRUE(Store{}.stats().empty());
}

TEST(Tab1, StatsForTwoCrosswalks) {
  Store store = load_fixture("tab1.tsv");
  std::string copy = testing::read_file(testing::fixture("tab1.tsv"));
  for (std::size_t pos; (pos = copy.find("A\t")) != std::string::npos;) copy[pos] = 'C';
  for (std::size_t pos; (pos = copy.find("\tB\t")) != std::string::npos;) copy[pos + 1] = 'D';
  std::istringstream in(copy);
  auto report = import_tsv(store, in);
  EXPECT_TRUE(report.errors.empty());
  auto stats = store.stats();
  ASSERT_EQ(stats.size(), 2u);
  EXPECT_EQ(stats.at({"A", "B"}), stats.at({"C", "D"}));
}

TEST(Asymmetry, DirectionsAreIndependent) {
  Store store = load_fixture("asymmetry.tsv");
  LookupFilter from_b;
  from_b.source_vocab = "B";
  EXPECT_EQ(describe(store.mappings_from("information system", from_b)),
            std::vector<std::string>{"information system = data base"});
  LookupFilter from_a;
  from_a.source_vocab = "A";
  EXPECT_EQ(describe(store.mappings_from("computer", from_a)),
            std::vector<std::string>{"computer = information system"});
}

TEST(Tsv, ImportReportsAndReimportsAsDuplicates) {
  Store store;
  std::ifstream in(testing::fixture("tab1.tsv"));
  auto first = import_tsv(store, in);
  EXPECT_EQ(first.crosswalks_created, 1u);
  EXPECT_EQ(first.mappings_added, 6u);
  EXPECT_TRUE(first.errors.empty());
  std::ifstream again(testing::fixture("tab1.tsv"));
  auto second = import_tsv(store, again);
  EXPECT_EQ(second.mappings_added, 0u);
  ASSERT_EQ(second.errors.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(second.errors[i].line, i + 2);
}

TEST(Tsv, MalformedLinesAreSkipped) {
  Store store;
  std::istringstream in(
      "#komohe-tsv v1\n"
      "A\thacker\t=\tB\thacking\thigh\n"
      "A\thacker\t\xE2\x89\x88\tB\thacking\thigh\n"  // line 3: unknown relation
      "A\thacker\t=\tB\t\thigh\n"                      // 4: missing target
      "A\tisdn\t0\tB\ttelecom\t\n"                     // 5: null with target
      "A\thacker\t=\tB\tx\tsuper\n"                    // 6: bad rating
      "A\thacker\t=\tB\n"                              // 7: too few fields
      "A\tcomputers + crime\t=\tB\tx\t\n"              // 8: combination source
      "A\thacker\t=\tA\tx\t\n"                         // 9: same vocabulary
      "# comment\n"
      "\n"
      "A\tx\t=\tB\ty\tlow\n");
  auto report = import_tsv(store, in);
  EXPECT_EQ(report.mappings_added, 2u);
  std::vector<std::size_t> lines;
  for (const auto& e : report.errors) lines.push_back(e.line);
  EXPECT_EQ(lines, (std::vector<std::size_t>{3, 4, 5, 6, 7, 8, 9}));
  // A rejected line leaves no terms behind.
  EXPECT_FALSE(store.registry().lookup_term("B", "telecom"));
}

TEST(Tsv, BadHeaderIsAFormatError) {
  Store store;
  std::istringstream empty("");
  EXPECT_THROW(import_tsv(store, empty), Error);
  std::istringstream wrong("#komohe-tsv v2\n");
  EXPECT_THROW(import_tsv(store, wrong), Error);
}

TEST(Tsv, NullRowsResolveTheirCrosswalk) {
  Store store;
  std::istringstream in(
      "#komohe-tsv v1\n"
      "A\tisdn device\t0\t\t\t\n"
      "A\thacker\t=\tB\thacking\t\n"
      "X\tlonely\t0\t\t\t\n");
  auto report = import_tsv(store, in);
  EXPECT_EQ(report.mappings_added, 2u);
  ASSERT_EQ(report.errors.size(), 1u);
  EXPECT_EQ(report.errors[0].line, 4u);
  EXPECT_EQ(store.crosswalk_mappings({"A", "B"}).size(), 2u);
}

TEST(Tsv, NullRowsFollowBlockMarkers) {
  Store store;
  std::istringstream in(
      "#komohe-tsv v1\n"
      "# crosswalk A B\n"
      "A\tx\t=\tB\ty\t\n"
      "# crosswalk A C\n"
      "A\tisdn device\t0\t\t\t\n"
      "A\tx\t=\tC\tz\t\n");
  auto report = import_tsv(store, in);
  EXPECT_TRUE(report.errors.empty());
  EXPECT_EQ(store.crosswalk_mappings({"A", "C"}).size(), 2u);
}

TEST(Tsv, ExportIsCanonical) {
  Store store = load_fixture("tab1.tsv");
  EXPECT_EQ(export_all(store),
            "#komohe-tsv v1\n"
            "# crosswalk A B\n"
            "A\tdocumentation system\t>\tB\tabstracting services\tmedium\n"
            "A\thacker\t=\tB\thacking\thigh\n"
            "A\thacker\t^\tB\tcomputers + crime\tmedium\n"
            "A\thacker\t^\tB\tinternet + security\tmedium\n"
            "A\tisdn\t<\tB\ttelecommunications\thigh\n"
            "A\tisdn device\t0\t\t\t\n");
}

TEST(Tsv, ExportOfEmptyCrosswalkIsHeaderOnly) {
  Store store;
  store.registry().register_vocabulary({"A", "", "", "", 0});
  store.registry().register_vocabulary({"B", "", "", "", 0});
  auto id = store.add_crosswalk("A", "B");
  std::ostringstream out;
  export_tsv(store, std::vector<CrosswalkId>{id}, out);
  EXPECT_EQ(out.str(), "#komohe-tsv v1\n");
  std::ostringstream unused;
  EXPECT_THROW(export_tsv(store, std::vector<CrosswalkId>{{"B", "A"}}, unused), Error);
}

TEST(Tsv, AsymmetryExportsTwoBlocks) {
  Store store = load_fixture("asymmetry.tsv");
  EXPECT_EQ(export_all(store),
            "#komohe-tsv v1\n"
            "# crosswalk A B\n"
            "A\tComputer\t=\tB\tInformation System\thigh\n"
            "# crosswalk B A\n"
            "B\tInformation System\t=\tA\tData base\thigh\n");
}

TEST(Tsv, RoundTripOnRandomStores) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing::StoreGenerator gen(seed);
    Store original;
    gen.populate(original, {"A", "B", "iz-soz"}, 150);
    std::string text = export_all(original);
    Store copy;
    std::istringstream in(text);
    auto report = import_tsv(copy, in);
    ASSERT_TRUE(report.errors.empty()) << report.errors[0].reason;
    ASSERT_EQ(report.mappings_added, original.mapping_count());
    EXPECT_EQ(export_all(copy), text) << "seed " << seed;
    EXPECT_EQ(copy.stats(), original.stats());
  }
}

TEST(Invariants, ForwardAndReverseIndexesAgree) {
  testing::StoreGenerator gen(99);
  Store store;
  gen.populate(store, {"A", "B", "C"}, 400);
  for (MappingId id = 0; id < store.mapping_count(); ++id) {
    const Mapping& m = store.mapping(id);
    auto from = store.mappings_from(m.source.term());
    ASSERT_TRUE(std::any_of(from.begin(), from.end(),
                            [&](const MappingHit& h) { return h.id == id; }));
    if (!m.target) continue;
    for (const auto& member : m.target->terms()) {
      auto to = store.mappings_to(member);
      ASSERT_TRUE(std::any_of(to.begin(), to.end(),
                              [&](const MappingHit& h) { return h.id == id; }));
      for (const auto& h : to) ASSERT_NE(h.mapping.relation, RelationType::kNull);
    }
  }
}

TEST(Invariants, StatsSumToMappingCount) {
  testing::StoreGenerator gen(5);
  Store store;
  gen.populate(store, {"A", "B", "C"}, 300);
  std::size_t total = 0;
  for (const auto& [id, s] : store.stats()) {
    std::size_t sum = 0;
    for (const auto& [r, n] : s.by_relation) sum += n;
    EXPECT_EQ(sum, s.mapping_count);
    total += s.mapping_count;
  }
  EXPECT_EQ(total, store.mapping_count());
}

}  // namespace
}  // namespace komohe
