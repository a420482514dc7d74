#pragma once

#include <set>
#include <string>
#include <vector>

#include "cmml/random.hpp"

namespace cmml::test {

// Emits random constraint documents straight from the grammar, so every output
// is syntactically valid but shapes (nesting, parentheses, layout) vary freely.
class DocGenerator {
 public:
  explicit DocGenerator(std::uint64_t seed, bool comments = true) : rng_(seed), comments_(comments) {}

  std::string document(std::size_t statements) {
    std::string out;
    std::set<std::string> used;
    for (std::size_t i = 0; i < statements; ++i) {
      if (comments_ && rng_.below(4) == 0) out += "# note " + std::to_string(i) + "\n";
      out += statement(i, used);
      out += comments_ && rng_.below(5) == 0 ? "  # trailing\n" : "\n";
      if (rng_.below(3) == 0) out += "\n";
    }
    return out;
  }

 private:
  static constexpr const char* kFeatures[] = {"Glucose", "Age", "BMI", "x_1", "f2", "Outcome"};
  static constexpr const char* kOps[] = {">", ">=", "<", "<=", "==", "!="};
  static constexpr const char* kAggs[] = {"mean", "std", "min", "max", "count", "frac_missing"};

  std::string feature() { return kFeatures[rng_.below(std::size(kFeatures))]; }
  std::string op() { return kOps[rng_.below(std::size(kOps))]; }
  std::string space() { return rng_.below(4) == 0 ? "  " : " "; }

  std::string number() {
    switch (rng_.below(5)) {
      case 0: return std::to_string(rng_.below(300));
      case 1: return "-" + std::to_string(rng_.below(50));
      case 2: return std::to_string(rng_.below(100)) + "." + std::to_string(rng_.below(1000));
      case 3: return "0.125";
      default: return std::to_string(1 + rng_.below(9)) + "e-" + std::to_string(rng_.below(4));
    }
  }

  std::string operand() { return rng_.below(3) == 0 ? number() : feature(); }

  std::string unary(int depth) {
    const std::size_t choice = depth <= 0 ? 2 + rng_.below(2) : rng_.below(5);
    switch (choice) {
      case 0: return "not" + space() + unary(depth - 1);
      case 1: return "(" + expr(depth - 1) + ")";
      case 3: return "missing(" + feature() + ")";
      default: return operand() + space() + op() + space() + operand();
    }
  }

  std::string andterm(int depth) {
    std::string s = unary(depth);
    const std::size_t extra = depth > 0 ? rng_.below(3) : 0;
    for (std::size_t i = 0; i < extra; ++i) s += " and" + space() + unary(depth - 1);
    return s;
  }

  std::string orterm(int depth) {
    std::string s = andterm(depth);
    const std::size_t extra = depth > 0 ? rng_.below(3) : 0;
    for (std::size_t i = 0; i < extra; ++i) s += " or" + space() + andterm(depth - 1);
    return s;
  }

  std::string expr(int depth) {
    std::string s = orterm(depth);
    if (depth > 0 && rng_.below(3) == 0) s += (rng_.below(2) ? "\n    implies " : " implies ") + orterm(depth - 1);
    return s;
  }

  std::string statement(std::size_t index, std::set<std::string>& used) {
    std::size_t kind = rng_.below(4);
    if (kind == 0) {
      // Range names are feature names; fall back to a rule once all are taken.
      std::string f = feature();
      if (used.insert(f).second) {
        std::string s = "range " + f + ":";
        const std::size_t n = 1 + rng_.below(3);
        for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + space() + op() + " " + number();
        return s;
      }
      kind = 1;
    }
    const std::string name = "s" + std::to_string(index);
    used.insert(name);
    switch (kind) {
      case 1: return "rule " + name + ":" + space() + expr(3);
      case 2: return "derive " + name + ": " + expr(2);
      default: {
        std::string agg = rng_.below(4) == 0 ? "frac(" + expr(2) + ")"
                                            : std::string(kAggs[rng_.below(std::size(kAggs))]) + "(" +
                                                  feature() + ")";
        return "invariant " + name + ": " + agg + space() + op() + " " + number();
      }
    }
  }

  Rng rng_;
  bool comments_;
};

}  // namespace cmml::test
