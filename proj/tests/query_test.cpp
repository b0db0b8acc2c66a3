#include <gtest/gtest.h>

#include <random>

#include "komohe/error.hpp"
#include "komohe/query.hpp"
#include "test_support.hpp"

namespace komohe {
namespace {

QueryNode term(const char* t) { return QueryNode::leaf(t); }
QueryNode all_of(std::vector<QueryNode> c) { return QueryNode::op(NodeKind::kAnd, std::move(c)); }
QueryNode any_of(std::vector<QueryNode> c) { return QueryNode::op(NodeKind::kOr, std::move(c)); }

std::size_t parse_error_position(std::string_view q) {
  try {
    parse_query(q);
  } catch (const ParseError& e) {
    return e.position();
  }
  ADD_FAILURE() << "no parse error for " << q;
  return 0;
}

TEST(ParseQuery, Conjunction) {
  EXPECT_EQ(parse_query("hacker AND security"), all_of({term("hacker"), term("security")}));
}

TEST(ParseQuery, PhrasesGroupingAndNegation) {
  auto expected = any_of({term("social work"),
                          all_of({term("hacker"), QueryNode::negate(term("crime"))})});
  EXPECT_EQ(parse_query("\"social work\" OR (hacker AND NOT crime)"), expected);
  EXPECT_EQ(expected.children[0].kind, NodeKind::kPhrase);
}

TEST(ParseQuery, DanglingOperatorFailsAtEnd) {
  try {
    parse_query("hacker AND");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_TRUE(e.at_end());
    EXPECT_EQ(e.position(), 10u);
    EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos);
  }
}

TEST(ParseQuery, OperatorsAreCaseInsensitive) {
  EXPECT_EQ(parse_query("a and b or not c"), parse_query("a AND b OR NOT c"));
}

TEST(ParseQuery, Precedence) {
  // NOT > AND > OR
  EXPECT_EQ(parse_query("a OR b AND NOT c"),
            any_of({term("a"), all_of({term("b"), QueryNode::negate(term("c"))})}));
  EXPECT_EQ(parse_query("NOT a b"), all_of({QueryNode::negate(term("a")), term("b")}));
  EXPECT_EQ(parse_query("NOT NOT a"), QueryNode::negate(QueryNode::negate(term("a"))));
}

TEST(ParseQuery, ImplicitAndFlattensWithExplicitAnd) {
  EXPECT_EQ(parse_query("a b AND c"), all_of({term("a"), term("b"), term("c")}));
  EXPECT_EQ(parse_query("(a)"), term("a"));
}

TEST(ParseQuery, LeavesAreNormalized) {
  EXPECT_EQ(parse_query("HACKER"), term("hacker"));
  EXPECT_EQ(parse_query("\"  Social   WORK \""), term("social work"));
  // Quoted operator words are terms.
  EXPECT_EQ(parse_query("\"and\""), term("and"));
}

TEST(ParseQuery, Errors) {
  EXPECT_EQ(parse_error_position("(a AND b"), 0u);
  EXPECT_EQ(parse_error_position("a AND b)"), 7u);
  EXPECT_EQ(parse_error_position("\"open"), 0u);
  EXPECT_EQ(parse_error_position("OR a"), 0u);
  EXPECT_EQ(parse_error_position("a OR OR b"), 5u);
  EXPECT_EQ(parse_error_position("()"), 1u);
  EXPECT_EQ(parse_error_position("\"\""), 0u);
  EXPECT_EQ(parse_error_position(""), 0u);
  EXPECT_EQ(parse_error_position("   "), 3u);
  EXPECT_EQ(parse_error_position("NOT"), 3u);
}

TEST(RenderQuery, CanonicalForms) {
  EXPECT_EQ(render_query(all_of({any_of({term("hacker"), term("hacking")}), term("security")})),
            "((\"hacker\" OR \"hacking\") AND \"security\")");
  EXPECT_EQ(render_query(term("hacker")), "\"hacker\"");
  EXPECT_EQ(render_query(QueryNode::negate(term("crime"))), "(NOT \"crime\")");
  EXPECT_EQ(render_query(term("say \"hi\"")), "\"say \\\"hi\\\"\"");
}

TEST(RenderQuery, ParseOfRenderIsIdentity) {
  testing::AstGenerator gen(42);
  for (int i = 0; i < 1000; ++i) {
    QueryNode ast = gen.make(6);
    std::string text = render_query(ast);
    ASSERT_EQ(parse_query(text), ast) << text;
  }
}

// Skeleton check: every original leaf is either untouched or the first
// disjunct of an OR group; operator nodes match one for one.
void expect_same_skeleton(const QueryNode& before, const QueryNode& after) {
  if (before.is_leaf()) {
    if (after == before) return;
    ASSERT_EQ(after.kind, NodeKind::kOr);
    ASSERT_GE(after.children.size(), 2u);
    EXPECT_EQ(after.children.front(), before);
    return;
  }
  ASSERT_EQ(after.kind, before.kind);
  ASSERT_EQ(after.children.size(), before.children.size());
  for (std::size_t i = 0; i < before.children.size(); ++i) {
    expect_same_skeleton(before.children[i], after.children[i]);
  }
}

TEST(ExpandQuery, EquivalenceOnlyByDefault) {
  Store store = testing::load_fixture("tab1.tsv");
  auto ast = parse_query("hacker AND security");
  auto result = expand_query(ast, store);
  EXPECT_EQ(result.ast, all_of({any_of({term("hacker"), term("hacking")}), term("security")}));
  EXPECT_EQ(render_query(result.ast), "((\"hacker\" OR \"hacking\") AND \"security\")");
  ASSERT_EQ(result.trace.size(), 1u);
  EXPECT_EQ(result.trace[0].leaf, "hacker");
  EXPECT_EQ(result.trace[0].leaf_index, 0u);
  EXPECT_EQ(result.trace[0].added,
            (std::vector<ExpansionEntry>{
                {"hacking", "A", "B", RelationType::kEquivalent, Rating::kHigh}}));
  expect_same_skeleton(ast, result.ast);
}

TEST(ExpandQuery, NullMappingsContributeNothing) {
  Store store = testing::load_fixture("tab1.tsv");
  auto ast = parse_query("\"isdn device\"");
  ExpansionConfig all;
  all.relations = {RelationType::kEquivalent, RelationType::kBroaderTarget,
                   RelationType::kNarrowerTarget, RelationType::kAssociation};
  auto result = expand_query(ast, store, all);
  EXPECT_EQ(result.ast, ast);
  EXPECT_TRUE(result.trace.empty());
}

TEST(ExpandQuery, BroaderTargetOptIn) {
  Store store = testing::load_fixture("tab1.tsv");
  ExpansionConfig config;
  config.relations = {RelationType::kEquivalent, RelationType::kBroaderTarget};
  auto result = expand_query(term("isdn"), store, config);
  EXPECT_EQ(result.ast, any_of({term("isdn"), term("telecommunications")}));
  EXPECT_EQ(expand_query(term("isdn"), store).ast, term("isdn"));
}

TEST(ExpandQuery, CombinationsBecomeConjunctions) {
  Store store = testing::load_fixture("tab1.tsv");
  ExpansionConfig config;
  config.relations = {RelationType::kEquivalent, RelationType::kAssociation};
  auto ast = parse_query("hacker AND security");
  auto result = expand_query(ast, store, config);
  EXPECT_EQ(render_query(result.ast),
            "((\"hacker\" OR \"hacking\" OR (\"computers\" AND \"crime\") OR "
            "(\"internet\" AND \"security\")) AND \"security\")");
  expect_same_skeleton(ast, result.ast);
  ASSERT_EQ(result.trace.size(), 1u);
  EXPECT_EQ(result.trace[0].added.size(), 3u);
  EXPECT_EQ(result.trace[0].added[1].added, "computers + crime");
}

TEST(ExpandQuery, NegatedLeavesOnlyWhenEnabled) {
  Store store = testing::load_fixture("tab1.tsv");
  auto ast = parse_query("security AND NOT hacker");
  EXPECT_EQ(expand_query(ast, store).ast, ast);
  ExpansionConfig config;
  config.expand_under_not = true;
  auto result = expand_query(ast, store, config);
  EXPECT_EQ(render_query(result.ast),
            "(\"security\" AND (NOT (\"hacker\" OR \"hacking\")))");
  EXPECT_EQ(result.trace[0].leaf_index, 1u);
}

TEST(ExpandQuery, CapsAndDeduplicates) {
  Store store;
  store.registry().register_vocabulary({"A", "", "", "", 0});
  store.registry().register_vocabulary({"B", "", "", "", 0});
  store.registry().register_vocabulary({"C", "", "", "", 0});
  auto ab = store.add_crosswalk("A", "B");
  auto ac = store.add_crosswalk("A", "C");
  store.registry().add_term("A", "car");
  for (const char* t : {"auto", "automobile", "car"}) store.registry().add_term("B", t);
  for (const char* t : {"Auto", "motor car"}) store.registry().add_term("C", t);
  for (const char* t : {"auto", "automobile", "car"}) {
    store.add_mapping(ab, {Concept::single("car"), RelationType::kEquivalent,
                           Concept::single(t), Rating::kHigh});
  }
  for (const char* t : {"Auto", "motor car"}) {
    store.add_mapping(ac, {Concept::single("car"), RelationType::kEquivalent,
                           Concept::single(t), Rating::kLow});
  }
  auto result = expand_query(term("car"), store);
  // "car" maps to itself in B and "auto" appears twice: both dropped.
  EXPECT_EQ(render_query(result.ast),
            "(\"car\" OR \"auto\" OR \"automobile\" OR \"motor car\")");
  EXPECT_EQ(result.ast.children[3].kind, NodeKind::kPhrase);

  ExpansionConfig capped;
  capped.max_terms_per_leaf = 1;
  EXPECT_EQ(render_query(expand_query(term("car"), store, capped).ast),
            "(\"car\" OR \"auto\")");

  ExpansionConfig only_c;
  only_c.target_vocabs = std::set<std::string>{"C"};
  EXPECT_EQ(render_query(expand_query(term("car"), store, only_c).ast),
            "(\"car\" OR \"auto\" OR \"motor car\")");

  ExpansionConfig high;
  high.min_rating = Rating::kHigh;
  EXPECT_EQ(render_query(expand_query(term("car"), store, high).ast),
            "(\"car\" OR \"auto\" OR \"automobile\")");
}

TEST(ExpandQuery, RejectsBadConfig) {
  Store store;
  ExpansionConfig with_null;
  with_null.relations.insert(RelationType::kNull);
  EXPECT_THROW(expand_query(term("x"), store, with_null), Error);
  ExpansionConfig zero;
  zero.max_terms_per_leaf = 0;
  EXPECT_THROW(expand_query(term("x"), store, zero), Error);
}

TEST(ExpandQuery, EmptyStoreIsIdentity) {
  Store store;
  testing::AstGenerator gen(3);
  for (int i = 0; i < 200; ++i) {
    auto ast = gen.make(5);
    auto result = expand_query(ast, store);
    ASSERT_EQ(result.ast, ast);
    ASSERT_TRUE(result.trace.empty());
  }
}

std::set<std::string> added_terms(const ExpansionTrace& trace) {
  std::set<std::string> out;
  for (const auto& leaf : trace) {
    for (const auto& e : leaf.added) out.insert(std::to_string(leaf.leaf_index) + ":" + e.added);
  }
  return out;
}

TEST(ExpandQuery, StructureAndMonotonicityOnRandomStores) {
  const std::vector<std::set<RelationType>> relation_sets = {
      {RelationType::kEquivalent},
      {RelationType::kEquivalent, RelationType::kBroaderTarget},
      {RelationType::kEquivalent, RelationType::kBroaderTarget, RelationType::kAssociation},
      {RelationType::kEquivalent, RelationType::kBroaderTarget, RelationType::kAssociation,
       RelationType::kNarrowerTarget}};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    testing::StoreGenerator gen(seed, 15);
    Store store;
    gen.populate(store, {"A", "B", "C"}, 200);
    for (int q = 0; q < 20; ++q) {
      std::vector<QueryNode> leaves;
      for (int k = 0; k < 3; ++k) leaves.push_back(QueryNode::leaf(gen.term()));
      QueryNode ast = any_of({all_of({leaves[0], leaves[1]}), QueryNode::negate(leaves[2])});
      std::set<std::string> previous;
      for (const auto& relations : relation_sets) {
        ExpansionConfig config;
        config.relations = relations;
        config.max_terms_per_leaf = 1000;
        config.expand_under_not = true;
        auto result = expand_query(ast, store, config);
        expect_same_skeleton(ast, result.ast);
        auto now = added_terms(result.trace);
        for (const auto& t : previous) ASSERT_TRUE(now.contains(t)) << t;
        for (const auto& leaf : result.trace) {
          std::set<std::string> unique;
          for (const auto& e : leaf.added) {
            ASSERT_NE(e.added, leaf.leaf);
            ASSERT_TRUE(unique.insert(e.added).second);
          }
        }
        previous = std::move(now);
      }
    }
  }
}

}  // namespace
}  // namespace komohe
