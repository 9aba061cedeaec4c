#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "curlforce/dual.hpp"
#include "curlforce/errors.hpp"

namespace curlforce {

using ConstantTable = std::map<std::string, double>;

enum class NodeKind { number, variable, constant, negate, binary, call };

enum class BinaryOp : char { add = '+', sub = '-', mul = '*', div = '/', pow = '^' };

enum class Function { sin, cos, tan, exp, log, sqrt, abs, pow };

struct Node {
  NodeKind kind = NodeKind::number;
  double number = 0.0;
  int slot = -1;  // variable index, or constant slot within the owning tree
  std::string name;
  BinaryOp op = BinaryOp::add;
  Function function = Function::sin;
  std::vector<Node> children;
  Span span;
};

/// Immutable parsed expression over an ordered set of variable names.
///
/// Constant references are kept by name; each distinct name is assigned a
/// slot so that bound evaluation can use a flat value vector.
class SyntaxTree {
 public:
  SyntaxTree(Node root, std::vector<std::string> variables);

  const Node& root() const { return root_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<std::string>& constants() const { return constants_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(variables_.size()); }

 private:
  Node root_;
  std::vector<std::string> variables_;
  std::vector<std::string> constants_;
};

struct Bindings {
  Eigen::VectorXd coordinates;
  ConstantTable constants;
};

/// Coordinate names for a spatial dimension: {x, y} or {x, y, z}.
std::vector<std::string> coordinate_names(int dimension);

SyntaxTree parse(std::string_view source, const std::vector<std::string>& variables,
                 const std::set<std::string>& constants);
SyntaxTree parse(std::string_view source, int dimension, const std::set<std::string>& constants);

/// Minimal-parenthesis infix form; re-parses to a structurally equal tree.
std::string print(const SyntaxTree& tree);
/// Prefix form, e.g. "(* (neg x) (^ y 2))". Used for golden tests and reports.
std::string to_sexpr(const SyntaxTree& tree);

/// Equality of node kinds, operators, literals and names; spans are ignored.
bool structurally_equal(const SyntaxTree& a, const SyntaxTree& b);

double evaluate(const SyntaxTree& tree, const Bindings& bindings);
DualValue evaluate_with_gradient(const SyntaxTree& tree, const Bindings& bindings);

/// Symbolic derivative with respect to one variable (trivial zero/one folding only).
SyntaxTree differentiate(const SyntaxTree& tree, int variable);

/// Substitutes `inner` for the single variable of `outer`; the result lives on
/// inner's variables.
SyntaxTree compose(const SyntaxTree& outer, const SyntaxTree& inner);

/// Joins two trees over the same variables with a binary operator.
SyntaxTree combine(BinaryOp op, const SyntaxTree& lhs, const SyntaxTree& rhs);

/// A tree with its constants resolved to values, ready for repeated evaluation.
class BoundExpression {
 public:
  BoundExpression(SyntaxTree tree, const ConstantTable& constants);

  const SyntaxTree& tree() const { return tree_; }
  const std::vector<double>& constant_values() const { return values_; }

  double value(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const;
  DualValue value_and_gradient(const Eigen::Ref<const Eigen::VectorXd>& coordinates) const;

 private:
  SyntaxTree tree_;
  std::vector<double> values_;
};

}  // namespace curlforce
