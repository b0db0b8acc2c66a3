#include <unordered_set>

#include "komohe/error.hpp"
#include "komohe/query.hpp"

namespace komohe {

void validate(const ExpansionConfig& config) {
  if (config.relations.contains(RelationType::kNull)) {
    throw Error(ErrorCode::kInvalidArgument,
                "the null relation cannot drive expansion");
  }
  if (config.max_terms_per_leaf == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "max terms per leaf must be positive");
  }
}

namespace {

class Expander {
 public:
  Expander(const Store& store, const ExpansionConfig& config)
      : store_(store), config_(config) {
    filter_.relations = config.relations;
    filter_.min_rating = config.min_rating;
    filter_.target_vocabs = config.target_vocabs;
  }

  QueryNode rewrite(const QueryNode& node, bool under_not) {
    if (node.is_leaf()) return rewrite_leaf(node, under_not);
    QueryNode out;
    out.kind = node.kind;
    out.children.reserve(node.children.size());
    bool negated = under_not || node.kind == NodeKind::kNot;
    for (const auto& child : node.children) {
      out.children.push_back(rewrite(child, negated));
    }
    return out;
  }

  ExpansionTrace take_trace() { return std::move(trace_); }

 private:
  QueryNode rewrite_leaf(const QueryNode& leaf, bool under_not) {
    std::size_t index = leaf_counter_++;
    if (under_not && !config_.expand_under_not) return leaf;

    LeafTrace trace{index, leaf.text, {}};
    std::vector<QueryNode> group{leaf};
    std::unordered_set<std::string> seen{leaf.text};
    for (const auto& hit : store_.mappings_from(leaf.text, filter_)) {
      if (group.size() - 1 >= config_.max_terms_per_leaf) break;
      // Relation NULL never passes the filter, so a target is present.
      const Concept& target = *hit.mapping.target;
      std::string key = target.key();
      if (!seen.insert(key).second) continue;
      if (target.is_single()) {
        group.push_back(QueryNode::leaf(target.term()));
      } else {
        std::vector<QueryNode> members;
        for (const auto& t : target.terms()) members.push_back(QueryNode::leaf(t));
        group.push_back(QueryNode::op(NodeKind::kAnd, std::move(members)));
      }
      trace.added.push_back(ExpansionEntry{key, hit.crosswalk.source,
                                           hit.crosswalk.target,
                                           hit.mapping.relation,
                                           hit.mapping.rating});
    }
    if (group.size() == 1) return leaf;
    trace_.push_back(std::move(trace));
    return QueryNode::op(NodeKind::kOr, std::move(group));
  }

  const Store& store_;
  const ExpansionConfig& config_;
  LookupFilter filter_;
  ExpansionTrace trace_;
  std::size_t leaf_counter_ = 0;
};

}  // namespace

ExpansionResult expand_query(const QueryAst& ast, const Store& store,
                             const ExpansionConfig& config) {
  validate(config);
  Expander expander(store, config);
  QueryAst out = expander.rewrite(ast, false);
  return ExpansionResult{std::move(out), expander.take_trace()};
}

}  // namespace komohe
