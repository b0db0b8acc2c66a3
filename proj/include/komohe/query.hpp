#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "komohe/crosswalk_store.hpp"

namespace komohe {

enum class NodeKind { kTerm, kPhrase, kAnd, kOr, kNot };

/// Boolean query tree. Leaves hold normalized text: a one-word leaf is a
/// Term, a multi-word leaf is a Phrase. And/Or have at least two children,
/// Not exactly one.
struct QueryNode {
  NodeKind kind = NodeKind::kTerm;
  std::string text;
  std::vector<QueryNode> children;

  bool is_leaf() const {
    return kind == NodeKind::kTerm || kind == NodeKind::kPhrase;
  }

  /// Normalizes text and picks Term or Phrase from its word count.
  static QueryNode leaf(std::string_view text);
  static QueryNode op(NodeKind kind, std::vector<QueryNode> children);
  static QueryNode negate(QueryNode child);

  friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

using QueryAst = QueryNode;

/// Grammar: case-insensitive AND / OR / NOT, parentheses, double-quoted
/// phrases with backslash escapes, implicit AND between adjacent operands.
/// Precedence NOT > AND > OR. Throws ParseError.
QueryAst parse_query(std::string_view input);

/// Canonical form: upper-case operators, every composite node parenthesized,
/// every leaf double-quoted.
std::string render_query(const QueryAst& ast);

struct ExpansionConfig {
  std::set<RelationType> relations{RelationType::kEquivalent};
  std::optional<std::set<std::string>> target_vocabs;
  std::optional<Rating> min_rating;
  std::size_t max_terms_per_leaf = 32;
  bool expand_under_not = false;
};

/// Throws kInvalidArgument if relations contains NULL or the cap is zero.
void validate(const ExpansionConfig& config);

struct ExpansionEntry {
  std::string added;  // combination members joined with " + "
  std::string source_vocab;
  std::string target_vocab;
  RelationType relation = RelationType::kEquivalent;
  Rating rating = Rating::kUnrated;

  friend bool operator==(const ExpansionEntry&, const ExpansionEntry&) = default;
};

struct LeafTrace {
  std::size_t leaf_index = 0;  // pre-order position among the input's leaves
  std::string leaf;
  std::vector<ExpansionEntry> added;

  friend bool operator==(const LeafTrace&, const LeafTrace&) = default;
};

using ExpansionTrace = std::vector<LeafTrace>;

struct ExpansionResult {
  QueryAst ast;
  ExpansionTrace trace;
};

/// Replaces every eligible leaf that has mapped terms by an OR group whose
/// first disjunct is the original leaf. Operator nodes are left untouched.
ExpansionResult expand_query(const QueryAst& ast, const Store& store,
                             const ExpansionConfig& config = {});

}  // namespace komohe
