#include "diamond/funcspec.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>

#include "diamond/error.hpp"

namespace diamond {

enum class Builtin { kId, kRuler, kFloorLog2, kPow2, kConst, kAdd, kMul, kMin, kCompose };

struct FuncSpec::Node {
  enum class Kind { kLiteral, kName, kCall };
  Kind kind = Kind::kLiteral;
  Builtin op = Builtin::kId;
  std::string name;
  std::uint64_t value = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = FuncSpec::Node;
using NodePtr = std::shared_ptr<const Node>;
using Value = std::optional<std::uint64_t>;

struct CatalogEntry {
  Builtin op;
  bool bare_ok;
  std::size_t min_args;
  std::size_t max_args;
};

const std::map<std::string, CatalogEntry, std::less<>>& catalog() {
  static const std::map<std::string, CatalogEntry, std::less<>> entries = {
      {"id", {Builtin::kId, true, 1, 1}},
      {"ruler", {Builtin::kRuler, true, 1, 1}},
      {"floorlog2", {Builtin::kFloorLog2, true, 1, 1}},
      {"pow2", {Builtin::kPow2, true, 1, 1}},
      {"const", {Builtin::kConst, false, 1, 1}},
      {"add", {Builtin::kAdd, false, 1, SIZE_MAX}},
      {"mul", {Builtin::kMul, false, 1, SIZE_MAX}},
      {"min", {Builtin::kMin, false, 1, SIZE_MAX}},
      {"compose", {Builtin::kCompose, false, 1, SIZE_MAX}},
  };
  return entries;
}

Value apply_unary(Builtin op, std::uint64_t v) noexcept {
  switch (op) {
    case Builtin::kId:
      return v;
    case Builtin::kRuler:
      // v + 1 == 2^64 has valuation 64.
      return v == UINT64_MAX ? 64 : static_cast<std::uint64_t>(std::countr_zero(v + 1));
    case Builtin::kFloorLog2:
      return v == UINT64_MAX ? 64 : static_cast<std::uint64_t>(std::bit_width(v + 1) - 1);
    case Builtin::kPow2:
      if (v >= 64) return std::nullopt;
      return std::uint64_t{1} << v;
    default:
      return std::nullopt;
  }
}

Value eval_node(const Node& node, std::uint64_t x) noexcept {
  switch (node.kind) {
    case Node::Kind::kLiteral:
      return node.value;
    case Node::Kind::kName:
      return apply_unary(node.op, x);
    case Node::Kind::kCall:
      break;
  }
  switch (node.op) {
    case Builtin::kConst:
      return node.args[0]->value;
    case Builtin::kAdd:
    case Builtin::kMul:
    case Builtin::kMin: {
      Value acc;
      for (const auto& arg : node.args) {
        const Value v = eval_node(*arg, x);
        if (!v) return std::nullopt;
        if (!acc) {
          acc = v;
        } else if (node.op == Builtin::kAdd) {
          if (__builtin_add_overflow(*acc, *v, &*acc)) return std::nullopt;
        } else if (node.op == Builtin::kMul) {
          if (__builtin_mul_overflow(*acc, *v, &*acc)) return std::nullopt;
        } else {
          acc = std::min(*acc, *v);
        }
      }
      return acc;
    }
    case Builtin::kCompose: {
      Value v = x;
      for (auto it = node.args.rbegin(); it != node.args.rend(); ++it) {
        v = eval_node(**it, *v);
        if (!v) return std::nullopt;
      }
      return v;
    }
    default: {
      const Value inner = eval_node(*node.args[0], x);
      if (!inner) return std::nullopt;
      return apply_unary(node.op, *inner);
    }
  }
}

void print_node(const Node& node, std::string& out) {
  switch (node.kind) {
    case Node::Kind::kLiteral:
      out += std::to_string(node.value);
      return;
    case Node::Kind::kName:
      out += node.name;
      return;
    case Node::Kind::kCall:
      out += node.name;
      out += '(';
      for (std::size_t i = 0; i < node.args.size(); ++i) {
        if (i > 0) out += ',';
        print_node(*node.args[i], out);
      }
      out += ')';
      return;
  }
}

bool same_tree(const Node& a, const Node& b) noexcept {
  if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.args.size() != b.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    NodePtr root = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  NodePtr parse_expr() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected an expression, found end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_integer();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_named();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr parse_integer() {
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const auto d = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (__builtin_mul_overflow(v, 10U, &v) || __builtin_add_overflow(v, d, &v)) {
        pos_ = start;
        fail("integer literal exceeds 64 bits");
      }
      ++pos_;
    }
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::kLiteral;
    node->value = v;
    return node;
  }

  NodePtr parse_named() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    const auto it = catalog().find(name);
    if (it == catalog().end()) {
      pos_ = start;
      fail("unknown builtin '" + name + "'");
    }
    const CatalogEntry& entry = it->second;
    auto node = std::make_shared<Node>();
    node->name = name;
    node->op = entry.op;
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '(') {
      if (!entry.bare_ok) {
        pos_ = start;
        fail("'" + name + "' needs arguments");
      }
      node->kind = Node::Kind::kName;
      return node;
    }
    ++pos_;
    node->kind = Node::Kind::kCall;
    node->args.push_back(parse_expr());
    skip_space();
    while (pos_ < text_.size() && text_[pos_] == ',') {
      ++pos_;
      node->args.push_back(parse_expr());
      skip_space();
    }
    if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
    ++pos_;
    if (node->args.size() < entry.min_args || node->args.size() > entry.max_args) {
      pos_ = start;
      fail("'" + name + "' takes " +
           (entry.max_args == 1 ? std::string("one argument") : std::string("one or more arguments")));
    }
    if (entry.op == Builtin::kConst && node->args[0]->kind != Node::Kind::kLiteral) {
      pos_ = start;
      fail("const takes an integer literal");
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

NodePtr make_call(const char* name, Builtin op, std::vector<NodePtr> args) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::kCall;
  node->name = name;
  node->op = op;
  node->args = std::move(args);
  return node;
}

}  // namespace

FuncSpec::FuncSpec() : FuncSpec([] {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::kName;
  node->name = "id";
  node->op = Builtin::kId;
  return node;
}()) {}

FuncSpec::FuncSpec(std::shared_ptr<const Node> root) : root_(std::move(root)) {
  print_node(*root_, text_);
}

FuncSpec FuncSpec::parse(std::string_view text) { return FuncSpec(Parser(text).parse_all()); }

FuncSpec FuncSpec::constant(std::uint64_t c) {
  auto lit = std::make_shared<Node>();
  lit->value = c;
  return FuncSpec(make_call("const", Builtin::kConst, {lit}));
}

FuncSpec FuncSpec::compose(const FuncSpec& outer, const FuncSpec& inner) {
  return FuncSpec(make_call("compose", Builtin::kCompose, {outer.root_, inner.root_}));
}

FuncSpec FuncSpec::pointwise_min(const FuncSpec& a, const FuncSpec& b) {
  return FuncSpec(make_call("min", Builtin::kMin, {a.root_, b.root_}));
}

std::uint64_t FuncSpec::operator()(std::uint64_t n) const {
  const Value v = eval_node(*root_, n);
  if (!v) throw OverflowError(text_ + " overflows 64 bits at n=" + std::to_string(n));
  return *v;
}

std::optional<std::uint64_t> FuncSpec::try_eval(std::uint64_t n) const noexcept {
  return eval_node(*root_, n);
}

bool operator==(const FuncSpec& a, const FuncSpec& b) noexcept {
  return same_tree(*a.root_, *b.root_);
}

FuncSpec parse_funcspec(std::string_view text) { return FuncSpec::parse(text); }

std::uint64_t eval_func(const FuncSpec& spec, std::uint64_t n) { return spec(n); }

std::vector<FiberReport> fiber_census(const FuncSpec& spec, std::uint64_t horizon) {
  if (horizon == 0) throw PreconditionError("fiber_census needs horizon >= 1");
  std::map<std::uint64_t, std::vector<std::uint64_t>> fibers;
  for (std::uint64_t n = 0; n < horizon; ++n) fibers[spec(n)].push_back(n);
  std::vector<FiberReport> out;
  out.reserve(fibers.size());
  for (auto& [value, members] : fibers) out.push_back({value, std::move(members), horizon});
  return out;
}

}  // namespace diamond
