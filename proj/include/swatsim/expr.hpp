#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swatsim/tag.hpp"

namespace swatsim {

/// Values an expression can reference. Each lookup returns nullopt when the
/// value is unavailable in the current view.
class EvalContext {
 public:
  virtual ~EvalContext() = default;
  virtual std::optional<double> tag(std::string_view name) const = 0;
  virtual std::optional<double> setpoint(std::string_view name) const = 0;
  virtual std::optional<double> memory(std::string_view) const { return 0.0; }
};

class ExprParseError : public Error {
 public:
  ExprParseError(const std::string& msg, std::size_t column)
      : Error(msg + " at column " + std::to_string(column + 1)), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Small arithmetic/boolean expression over tags, setpoints and PLC memory bits.
///
/// Identifiers resolve as: position keywords (Open, Closed, Opening, Closing,
/// On, Off) to their register codes; registered tag names to tags; dotted
/// names such as `T101.L` to setpoints; anything else to a PLC memory bit.
/// Booleans are 1/0. Supported: `|| && ! == != < <= > >= + - * /`, `abs(x)`,
/// `min(a,b)`, `max(a,b)`, parentheses.
class Expr {
 public:
  struct Node;

  Expr() = default;
  static Expr parse(std::string_view text);
  static Expr constant(double v);

  /// nullopt if any referenced value is unavailable.
  std::optional<double> eval(const EvalContext& ctx) const;
  std::optional<bool> test(const EvalContext& ctx) const;

  const std::string& text() const { return text_; }
  const std::vector<std::string>& tags() const { return tags_; }
  const std::vector<std::string>& setpoints() const { return setpoints_; }
  const std::vector<std::string>& memory() const { return memory_; }
  bool empty() const { return !root_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  std::vector<std::string> tags_;
  std::vector<std::string> setpoints_;
  std::vector<std::string> memory_;
};

}  // namespace swatsim
