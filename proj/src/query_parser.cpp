#include <cctype>

#include "komohe/error.hpp"
#include "komohe/query.hpp"

namespace komohe {

QueryNode QueryNode::leaf(std::string_view text) {
  QueryNode node;
  node.text = normalize_term(text);
  node.kind = node.text.find(' ') == std::string::npos ? NodeKind::kTerm
                                                       : NodeKind::kPhrase;
  return node;
}

QueryNode QueryNode::op(NodeKind kind, std::vector<QueryNode> children) {
  if ((kind != NodeKind::kAnd && kind != NodeKind::kOr) || children.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "AND/OR nodes need at least two children");
  }
  QueryNode node;
  node.kind = kind;
  node.children = std::move(children);
  return node;
}

QueryNode QueryNode::negate(QueryNode child) {
  QueryNode node;
  node.kind = NodeKind::kNot;
  node.children.push_back(std::move(child));
  return node;
}

namespace {

enum class TokenKind { kWord, kQuoted, kAnd, kOr, kNot, kOpen, kClose, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t position;
};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) !=
        std::toupper(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::vector<Token> tokenize(std::string_view input) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < input.size()) {
    char c = input[i];
    if (is_space(c)) {
      ++i;
    } else if (c == '(') {
      tokens.push_back({TokenKind::kOpen, "(", i++});
    } else if (c == ')') {
      tokens.push_back({TokenKind::kClose, ")", i++});
    } else if (c == '"') {
      std::size_t start = i++;
      std::string text;
      bool closed = false;
      while (i < input.size()) {
        char d = input[i++];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\\' && i < input.size()) d = input[i++];
        text.push_back(d);
      }
      if (!closed) throw ParseError(start, input.size(), "unterminated quote");
      tokens.push_back({TokenKind::kQuoted, std::move(text), start});
    } else {
      std::size_t start = i;
      while (i < input.size() && !is_space(input[i]) && input[i] != '(' &&
             input[i] != ')' && input[i] != '"') {
        ++i;
      }
      std::string_view word = input.substr(start, i - start);
      TokenKind kind = TokenKind::kWord;
      if (iequals(word, "AND")) {
        kind = TokenKind::kAnd;
      } else if (iequals(word, "OR")) {
        kind = TokenKind::kOr;
      } else if (iequals(word, "NOT")) {
        kind = TokenKind::kNot;
      }
      tokens.push_back({kind, std::string(word), start});
    }
  }
  tokens.push_back({TokenKind::kEnd, "", input.size()});
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::string_view input)
      : input_(input), tokens_(tokenize(input)) {}

  QueryNode parse() {
    QueryNode node = parse_or();
    if (peek().kind == TokenKind::kClose) {
      fail(peek().position, "unbalanced ')'");
    }
    if (peek().kind != TokenKind::kEnd) fail(peek().position, "unexpected token");
    return node;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(std::size_t position, const std::string& message) const {
    throw ParseError(position, input_.size(), message);
  }

  static bool starts_operand(TokenKind kind) {
    return kind == TokenKind::kWord || kind == TokenKind::kQuoted ||
           kind == TokenKind::kNot || kind == TokenKind::kOpen;
  }

  QueryNode parse_or() {
    std::vector<QueryNode> items;
    items.push_back(parse_and());
    while (peek().kind == TokenKind::kOr) {
      next();
      items.push_back(parse_and());
    }
    if (items.size() == 1) return std::move(items.front());
    return QueryNode::op(NodeKind::kOr, std::move(items));
  }

  QueryNode parse_and() {
    std::vector<QueryNode> items;
    items.push_back(parse_unary());
    while (true) {
      if (peek().kind == TokenKind::kAnd) {
        next();
        items.push_back(parse_unary());
      } else if (starts_operand(peek().kind)) {
        items.push_back(parse_unary());
      } else {
        break;
      }
    }
    if (items.size() == 1) return std::move(items.front());
    return QueryNode::op(NodeKind::kAnd, std::move(items));
  }

  QueryNode parse_unary() {
    if (peek().kind == TokenKind::kNot) {
      next();
      return QueryNode::negate(parse_unary());
    }
    return parse_primary();
  }

  QueryNode parse_primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case TokenKind::kWord:
      case TokenKind::kQuoted: {
        next();
        try {
          return QueryNode::leaf(tok.text);
        } catch (const Error&) {
          fail(tok.position, "empty term");
        }
      }
      case TokenKind::kOpen: {
        std::size_t open = tok.position;
        next();
        if (peek().kind == TokenKind::kClose) {
          fail(peek().position, "empty parentheses");
        }
        QueryNode inner = parse_or();
        if (peek().kind != TokenKind::kClose) {
          fail(peek().kind == TokenKind::kEnd ? open : peek().position,
               "unbalanced '('");
        }
        next();
        return inner;
      }
      case TokenKind::kEnd:
        fail(tok.position, "expected a term");
      case TokenKind::kClose:
        fail(tok.position, "unexpected ')'");
      default:
        fail(tok.position, "dangling operator '" + tok.text + "'");
    }
  }

  std::string_view input_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void render_into(const QueryNode& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::kTerm:
    case NodeKind::kPhrase:
      out += '"';
      for (char c : node.text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
      return;
    case NodeKind::kNot:
      out += "(NOT ";
      render_into(node.children.front(), out);
      out += ')';
      return;
    case NodeKind::kAnd:
    case NodeKind::kOr: {
      const char* sep = node.kind == NodeKind::kAnd ? " AND " : " OR ";
      out += '(';
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i > 0) out += sep;
        render_into(node.children[i], out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace

QueryAst parse_query(std::string_view input) {
  Parser parser(input);
  return parser.parse();
}

std::string render_query(const QueryAst& ast) {
  std::string out;
  render_into(ast, out);
  return out;
}

}  // namespace komohe
