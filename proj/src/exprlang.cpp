#include "curlforce/exprlang.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <type_traits>

namespace curlforce {

namespace {

struct FunctionInfo {
  std::string_view name;
  Function function;
  int arity;
};

constexpr std::array<FunctionInfo, 8> kFunctions{{
    {"sin", Function::sin, 1},
    {"cos", Function::cos, 1},
    {"tan", Function::tan, 1},
    {"exp", Function::exp, 1},
    {"log", Function::log, 1},
    {"sqrt", Function::sqrt, 1},
    {"abs", Function::abs, 1},
    {"pow", Function::pow, 2},
}};

std::optional<FunctionInfo> find_function(std::string_view name) {
  for (const auto& info : kFunctions) {
    if (info.name == name) return info;
  }
  return std::nullopt;
}

std::string_view function_name(Function f) {
  for (const auto& info : kFunctions) {
    if (info.function == f) return info.name;
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Lexer / parser

enum class TokenKind { number, identifier, symbol, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string_view text;
  double number = 0.0;
  Span span;
};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  Parser(std::string_view source, const std::vector<std::string>& variables,
         const std::set<std::string>& constants)
      : src_(source), variables_(variables), constants_(constants) {
    advance();
  }

  Node parse_all() {
    Node root = parse_expr();
    if (tok_.kind != TokenKind::end) {
      if (tok_.kind == TokenKind::identifier || tok_.kind == TokenKind::number ||
          tok_.text == "(") {
        throw ParseError("unexpected '" + std::string(tok_.text) +
                             "' (implicit multiplication is not supported)",
                         tok_.span);
      }
      throw ParseError("unexpected '" + std::string(tok_.text) + "'", tok_.span);
    }
    return root;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                  src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) {
      tok_ = {TokenKind::end, {}, 0.0, {start, start}};
      return;
    }
    const char c = src_[pos_];
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      lex_number(start);
      return;
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && (is_ident_start(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
      tok_ = {TokenKind::identifier, src_.substr(start, pos_ - start), 0.0, {start, pos_}};
      return;
    }
    if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
      ++pos_;
      tok_ = {TokenKind::symbol, src_.substr(start, 1), 0.0, {start, pos_}};
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", {start, start + 1});
  }

  void lex_number(std::size_t start) {
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p >= src_.size() || !is_digit(src_[p])) {
        throw ParseError("malformed exponent in numeric literal", {start, p});
      }
      while (p < src_.size() && is_digit(src_[p])) ++p;
      pos_ = p;
    }
    const std::string_view text = src_.substr(start, pos_ - start);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
      throw ParseError("numeric literal out of range", {start, pos_});
    }
    tok_ = {TokenKind::number, text, value, {start, pos_}};
  }

  bool at_symbol(char c) const {
    return tok_.kind == TokenKind::symbol && tok_.text[0] == c;
  }

  void expect(char c) {
    if (!at_symbol(c)) {
      const std::string found =
          tok_.kind == TokenKind::end ? "end of input" : "'" + std::string(tok_.text) + "'";
      throw ParseError(std::string("expected '") + c + "', found " + found, tok_.span);
    }
    advance();
  }

  static Node make_binary(BinaryOp op, Node lhs, Node rhs) {
    Node n;
    n.kind = NodeKind::binary;
    n.op = op;
    n.span = {lhs.span.begin, rhs.span.end};
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return n;
  }

  Node parse_expr() {
    Node lhs = parse_term();
    while (at_symbol('+') || at_symbol('-')) {
      const BinaryOp op = at_symbol('+') ? BinaryOp::add : BinaryOp::sub;
      advance();
      lhs = make_binary(op, std::move(lhs), parse_term());
    }
    return lhs;
  }

  Node parse_term() {
    Node lhs = parse_unary();
    while (at_symbol('*') || at_symbol('/')) {
      const BinaryOp op = at_symbol('*') ? BinaryOp::mul : BinaryOp::div;
      advance();
      lhs = make_binary(op, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Node parse_unary() {
    if (at_symbol('-')) {
      const std::size_t begin = tok_.span.begin;
      advance();
      Node n;
      n.kind = NodeKind::negate;
      n.children.push_back(parse_unary());
      n.span = {begin, n.children.front().span.end};
      return n;
    }
    return parse_power();
  }

  Node parse_power() {
    Node base = parse_primary();
    if (at_symbol('^')) {
      advance();
      return make_binary(BinaryOp::pow, std::move(base), parse_unary());
    }
    return base;
  }

  Node parse_primary() {
    if (tok_.kind == TokenKind::number) {
      Node n;
      n.kind = NodeKind::number;
      n.number = tok_.number;
      n.span = tok_.span;
      advance();
      return n;
    }
    if (at_symbol('(')) {
      const std::size_t begin = tok_.span.begin;
      advance();
      Node inner = parse_expr();
      const std::size_t end = tok_.span.end;
      expect(')');
      inner.span = {begin, end};
      return inner;
    }
    if (tok_.kind == TokenKind::identifier) return parse_identifier();
    if (tok_.kind == TokenKind::end) throw ParseError("unexpected end of input", tok_.span);
    throw ParseError("unexpected '" + std::string(tok_.text) + "'", tok_.span);
  }

  Node parse_identifier() {
    const Token id = tok_;
    const std::string name(id.text);
    advance();

    if (auto fn = find_function(name)) {
      if (!at_symbol('(')) throw ParseError("function '" + name + "' requires arguments", id.span);
      advance();
      Node n;
      n.kind = NodeKind::call;
      n.function = fn->function;
      n.name = name;
      if (!at_symbol(')')) {
        n.children.push_back(parse_expr());
        while (at_symbol(',')) {
          advance();
          n.children.push_back(parse_expr());
        }
      }
      const std::size_t end = tok_.span.end;
      expect(')');
      n.span = {id.span.begin, end};
      if (static_cast<int>(n.children.size()) != fn->arity) {
        throw ParseError("function '" + name + "' expects " + std::to_string(fn->arity) +
                             " argument(s), got " + std::to_string(n.children.size()),
                         n.span);
      }
      return n;
    }

    Node n;
    n.span = id.span;
    n.name = name;
    const auto var = std::find(variables_.begin(), variables_.end(), name);
    if (var != variables_.end()) {
      n.kind = NodeKind::variable;
      n.slot = static_cast<int>(var - variables_.begin());
      return n;
    }
    if (constants_.count(name) != 0) {
      n.kind = NodeKind::constant;
      return n;
    }
    if (name == "x" || name == "y" || name == "z") {
      throw ParseError("coordinate '" + name + "' is not available here (variables: " +
                           join_variables() + ")",
                       id.span);
    }
    throw ParseError("unknown identifier '" + name + "'", id.span);
  }

  std::string join_variables() const {
    std::string out;
    for (const auto& v : variables_) out += (out.empty() ? "" : ", ") + v;
    return out;
  }

  std::string_view src_;
  const std::vector<std::string>& variables_;
  const std::set<std::string>& constants_;
  std::size_t pos_ = 0;
  Token tok_;
};

// ---------------------------------------------------------------------------
// Printing

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::binary:
      switch (n.op) {
        case BinaryOp::add:
        case BinaryOp::sub:
          return 1;
        case BinaryOp::mul:
        case BinaryOp::div:
          return 2;
        case BinaryOp::pow:
          return 4;
      }
      return 0;
    case NodeKind::negate:
      return 3;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string print_node(const Node& n);

std::string wrap(const Node& child, bool parenthesize) {
  std::string s = print_node(child);
  return parenthesize ? "(" + s + ")" : s;
}

std::string print_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::number:
      return format_number(n.number);
    case NodeKind::variable:
    case NodeKind::constant:
      return n.name;
    case NodeKind::negate:
      return "-" + wrap(n.children[0], precedence(n.children[0]) < 3);
    case NodeKind::call: {
      std::string s = std::string(function_name(n.function)) + "(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i > 0) s += ", ";
        s += print_node(n.children[i]);
      }
      return s + ")";
    }
    case NodeKind::binary: {
      const Node& l = n.children[0];
      const Node& r = n.children[1];
      if (n.op == BinaryOp::pow) {
        return wrap(l, precedence(l) <= 4) + "^" + wrap(r, precedence(r) < 3);
      }
      const int p = precedence(n);
      const char* op = n.op == BinaryOp::add   ? " + "
                       : n.op == BinaryOp::sub ? " - "
                       : n.op == BinaryOp::mul ? "*"
                                               : "/";
      return wrap(l, precedence(l) < p) + op + wrap(r, precedence(r) <= p);
    }
  }
  return {};
}

std::string sexpr_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::number:
      return format_number(n.number);
    case NodeKind::variable:
    case NodeKind::constant:
      return n.name;
    case NodeKind::negate:
      return "(neg " + sexpr_node(n.children[0]) + ")";
    case NodeKind::call: {
      std::string s = "(" + std::string(function_name(n.function));
      for (const auto& c : n.children) s += " " + sexpr_node(c);
      return s + ")";
    }
    case NodeKind::binary:
      return std::string("(") + static_cast<char>(n.op) + " " + sexpr_node(n.children[0]) + " " +
             sexpr_node(n.children[1]) + ")";
  }
  return {};
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case NodeKind::number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::variable:
    case NodeKind::constant:
      if (a.name != b.name) return false;
      break;
    case NodeKind::binary:
      if (a.op != b.op) return false;
      break;
    case NodeKind::call:
      if (a.function != b.function) return false;
      break;
    case NodeKind::negate:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!nodes_equal(a.children[i], b.children[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Evaluation, templated on the number type (double or DualValue).

template <typename T>
struct Arith;

template <>
struct Arith<double> {
  Eigen::Index n = 0;
  double constant(double v) const { return v; }
  double variable(double v, int) const { return v; }
  static double value(double t) { return t; }
  static bool varying(double) { return false; }
  static bool finite(double t) { return std::isfinite(t); }
};

template <>
struct Arith<DualValue> {
  Eigen::Index n = 0;
  DualValue constant(double v) const { return DualValue::constant(v, n); }
  DualValue variable(double v, int i) const { return DualValue::variable(v, i, n); }
  static double value(const DualValue& t) { return t.value; }
  static bool varying(const DualValue& t) { return !t.has_zero_partials(); }
  static bool finite(const DualValue& t) {
    return std::isfinite(t.value) && t.partials.allFinite();
  }
};

template <typename T>
class Evaluator {
 public:
  Evaluator(Arith<T> arith, std::span<const double> coords, std::span<const double> constants)
      : ar_(arith), coords_(coords), constants_(constants) {}

  T eval(const Node& n) const {
    T out = eval_unchecked(n);
    if (!Arith<T>::finite(out)) throw EvalError("non-finite result", n.span);
    return out;
  }

 private:
  T eval_unchecked(const Node& n) const {
    using std::abs, std::cos, std::exp, std::log, std::pow, std::sin, std::sqrt, std::tan;
    switch (n.kind) {
      case NodeKind::number:
        return ar_.constant(n.number);
      case NodeKind::variable:
        return ar_.variable(coords_[n.slot], n.slot);
      case NodeKind::constant:
        return ar_.constant(constants_[n.slot]);
      case NodeKind::negate:
        return -eval(n.children[0]);
      case NodeKind::binary: {
        const T l = eval(n.children[0]);
        const T r = eval(n.children[1]);
        switch (n.op) {
          case BinaryOp::add:
            return l + r;
          case BinaryOp::sub:
            return l - r;
          case BinaryOp::mul:
            return l * r;
          case BinaryOp::div:
            if (Arith<T>::value(r) == 0.0) throw EvalError("division by zero", n.span);
            return l / r;
          case BinaryOp::pow:
            return power(l, r, n.span);
        }
        break;
      }
      case NodeKind::call: {
        const T a = eval(n.children[0]);
        const double av = Arith<T>::value(a);
        switch (n.function) {
          case Function::sin:
            return sin(a);
          case Function::cos:
            return cos(a);
          case Function::tan:
            return tan(a);
          case Function::exp:
            return exp(a);
          case Function::log:
            if (av <= 0.0) throw EvalError("log of non-positive argument", n.span);
            return log(a);
          case Function::sqrt:
            if (av < 0.0) throw EvalError("sqrt of negative argument", n.span);
            return sqrt(a);
          case Function::abs:
            return abs(a);
          case Function::pow:
            return power(a, eval(n.children[1]), n.span);
        }
        break;
      }
    }
    throw EvalError("malformed node", n.span);
  }

  T power(const T& base, const T& exponent, Span span) const {
    using std::pow;
    const double b = Arith<T>::value(base);
    const double e = Arith<T>::value(exponent);
    if (b == 0.0 && e < 0.0) throw EvalError("division by zero in power", span);
    if (b < 0.0 && std::floor(e) != e) {
      throw EvalError("negative base with non-integer exponent", span);
    }
    if (b <= 0.0 && Arith<T>::varying(exponent)) {
      throw EvalError("power with varying exponent needs a positive base", span);
    }
    return pow(base, exponent);
  }

  Arith<T> ar_;
  std::span<const double> coords_;
  std::span<const double> constants_;
};

void check_arity(const SyntaxTree& tree, Eigen::Index n) {
  if (n != tree.dimension()) {
    throw InputError("expected " + std::to_string(tree.dimension()) + " coordinates, got " +
                     std::to_string(n));
  }
}

template <typename T>
T eval_with(const SyntaxTree& tree, const Eigen::Ref<const Eigen::VectorXd>& coords,
            const std::vector<double>& constants) {
  check_arity(tree, coords.size());
  const std::span<const double> cs(coords.data(), static_cast<std::size_t>(coords.size()));
  Evaluator<T> ev(Arith<T>{coords.size()}, cs, constants);
  return ev.eval(tree.root());
}

void assign_slots(Node& n, std::vector<std::string>& constants, std::size_t nvars) {
  if (n.kind == NodeKind::constant) {
    const auto it = std::find(constants.begin(), constants.end(), n.name);
    n.slot = static_cast<int>(it - constants.begin());
    if (it == constants.end()) constants.push_back(n.name);
  } else if (n.kind == NodeKind::variable) {
    if (n.slot < 0 || static_cast<std::size_t>(n.slot) >= nvars) {
      throw InputError("variable '" + n.name + "' has no coordinate slot");
    }
  }
  for (auto& c : n.children) assign_slots(c, constants, nvars);
}

const Node* find_constant(const Node& n, const std::string& name) {
  if (n.kind == NodeKind::constant && n.name == name) return &n;
  for (const auto& c : n.children) {
    if (const Node* hit = find_constant(c, name)) return hit;
  }
  return nullptr;
}

std::vector<double> resolve(const SyntaxTree& tree, const ConstantTable& table) {
  std::vector<double> values;
  values.reserve(tree.constants().size());
  for (const auto& name : tree.constants()) {
    const auto it = table.find(name);
    if (it == table.end()) {
      const Node* site = find_constant(tree.root(), name);
      throw ParseError("unbound constant '" + name + "'", site ? site->span : Span{});
    }
    values.push_back(it->second);
  }
  return values;
}

// ---------------------------------------------------------------------------
// Symbolic helpers

Node num(double v) {
  Node n;
  n.kind = NodeKind::number;
  n.number = v;
  return n;
}

bool is_number(const Node& n, double v) { return n.kind == NodeKind::number && n.number == v; }

Node bin(BinaryOp op, Node a, Node b) {
  Node n;
  n.kind = NodeKind::binary;
  n.op = op;
  n.children.push_back(std::move(a));
  n.children.push_back(std::move(b));
  return n;
}

Node neg(Node a) {
  if (is_number(a, 0.0)) return a;
  Node n;
  n.kind = NodeKind::negate;
  n.children.push_back(std::move(a));
  return n;
}

Node call(Function f, Node a) {
  Node n;
  n.kind = NodeKind::call;
  n.function = f;
  n.name = std::string(function_name(f));
  n.children.push_back(std::move(a));
  return n;
}

Node add(Node a, Node b) {
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  return bin(BinaryOp::add, std::move(a), std::move(b));
}

Node sub(Node a, Node b) {
  if (is_number(b, 0.0)) return a;
  if (is_number(a, 0.0)) return neg(std::move(b));
  return bin(BinaryOp::sub, std::move(a), std::move(b));
}

Node mul(Node a, Node b) {
  if (is_number(a, 0.0) || is_number(b, 0.0)) return num(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  return bin(BinaryOp::mul, std::move(a), std::move(b));
}

Node div(Node a, Node b) {
  if (is_number(a, 0.0)) return num(0.0);
  if (is_number(b, 1.0)) return a;
  return bin(BinaryOp::div, std::move(a), std::move(b));
}

bool depends_on(const Node& n, int var) {
  if (n.kind == NodeKind::variable) return n.slot == var;
  return std::any_of(n.children.begin(), n.children.end(),
                     [var](const Node& c) { return depends_on(c, var); });
}

Node derive_power(const Node& base, const Node& exponent, int var);

Node derive(const Node& n, int var) {
  switch (n.kind) {
    case NodeKind::number:
    case NodeKind::constant:
      return num(0.0);
    case NodeKind::variable:
      return num(n.slot == var ? 1.0 : 0.0);
    case NodeKind::negate:
      return neg(derive(n.children[0], var));
    case NodeKind::binary: {
      const Node& a = n.children[0];
      const Node& b = n.children[1];
      switch (n.op) {
        case BinaryOp::add:
          return add(derive(a, var), derive(b, var));
        case BinaryOp::sub:
          return sub(derive(a, var), derive(b, var));
        case BinaryOp::mul:
          return add(mul(derive(a, var), b), mul(a, derive(b, var)));
        case BinaryOp::div:
          return div(sub(mul(derive(a, var), b), mul(a, derive(b, var))),
                     bin(BinaryOp::pow, b, num(2.0)));
        case BinaryOp::pow:
          return derive_power(a, b, var);
      }
      break;
    }
    case NodeKind::call: {
      const Node& a = n.children[0];
      Node da = derive(a, var);
      if (is_number(da, 0.0) && n.function != Function::pow) return num(0.0);
      switch (n.function) {
        case Function::sin:
          return mul(call(Function::cos, a), std::move(da));
        case Function::cos:
          return neg(mul(call(Function::sin, a), std::move(da)));
        case Function::tan:
          return div(std::move(da), bin(BinaryOp::pow, call(Function::cos, a), num(2.0)));
        case Function::exp:
          return mul(n, std::move(da));
        case Function::log:
          return div(std::move(da), a);
        case Function::sqrt:
          return div(std::move(da), mul(num(2.0), n));
        case Function::abs:
          return mul(std::move(da), div(a, n));
        case Function::pow:
          return derive_power(a, n.children[1], var);
      }
      break;
    }
  }
  return num(0.0);
}

Node derive_power(const Node& base, const Node& exponent, int var) {
  if (!depends_on(exponent, var)) {
    if (!depends_on(base, var)) return num(0.0);
    Node reduced = exponent.kind == NodeKind::number
                       ? num(exponent.number - 1.0)
                       : bin(BinaryOp::sub, exponent, num(1.0));
    return mul(mul(exponent, bin(BinaryOp::pow, base, std::move(reduced))), derive(base, var));
  }
  Node whole = bin(BinaryOp::pow, base, exponent);
  return mul(std::move(whole), add(mul(derive(exponent, var), call(Function::log, base)),
                                   mul(exponent, div(derive(base, var), base))));
}

Node substitute(const Node& n, const Node& replacement) {
  if (n.kind == NodeKind::variable) return replacement;
  Node out = n;
  for (auto& c : out.children) c = substitute(c, replacement);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

SyntaxTree::SyntaxTree(Node root, std::vector<std::string> variables)
    : root_(std::move(root)), variables_(std::move(variables)) {
  assign_slots(root_, constants_, variables_.size());
}

std::vector<std::string> coordinate_names(int dimension) {
  if (dimension == 2) return {"x", "y"};
  if (dimension == 3) return {"x", "y", "z"};
  throw InputError("dimension must be 2 or 3, got " + std::to_string(dimension));
}

SyntaxTree parse(std::string_view source, const std::vector<std::string>& variables,
                 const std::set<std::string>& constants) {
  Parser parser(source, variables, constants);
  return SyntaxTree(parser.parse_all(), variables);
}

SyntaxTree parse(std::string_view source, int dimension, const std::set<std::string>& constants) {
  return parse(source, coordinate_names(dimension), constants);
}

std::string print(const SyntaxTree& tree) { return print_node(tree.root()); }

std::string to_sexpr(const SyntaxTree& tree) { return sexpr_node(tree.root()); }

bool structurally_equal(const SyntaxTree& a, const SyntaxTree& b) {
  return a.variables() == b.variables() && nodes_equal(a.root(), b.root());
}

double evaluate(const SyntaxTree& tree, const Bindings& bindings) {
  return eval_with<double>(tree, bindings.coordinates, resolve(tree, bindings.constants));
}

DualValue evaluate_with_gradient(const SyntaxTree& tree, const Bindings& bindings) {
  return eval_with<DualValue>(tree, bindings.coordinates, resolve(tree, bindings.constants));
}

SyntaxTree differentiate(const SyntaxTree& tree, int variable) {
  if (variable < 0 || variable >= tree.dimension()) {
    throw InputError("differentiation variable out of range");
  }
  return SyntaxTree(derive(tree.root(), variable), tree.variables());
}

SyntaxTree compose(const SyntaxTree& outer, const SyntaxTree& inner) {
  if (outer.dimension() != 1) {
    throw InputError("compose: outer expression must have exactly one variable");
  }
  return SyntaxTree(substitute(outer.root(), inner.root()), inner.variables());
}

SyntaxTree combine(BinaryOp op, const SyntaxTree& lhs, const SyntaxTree& rhs) {
  if (lhs.variables() != rhs.variables()) {
    throw InputError("combine: operands have different variables");
  }
  return SyntaxTree(bin(op, lhs.root(), rhs.root()), lhs.variables());
}

BoundExpression::BoundExpression(SyntaxTree tree, const ConstantTable& constants)
    : tree_(std::move(tree)), values_(resolve(tree_, constants)) {}

double BoundExpression::value(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const {
  return eval_with<double>(tree_, coordinates, values_);
}

DualValue BoundExpression::value_and_gradient(
    const Eigen::Ref<const Eigen::VectorXd>& coordinates) const {
  return eval_with<DualValue>(tree_, coordinates, values_);
}

}  // namespace curlforce
