// Copyright 2026 The recdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "recdp/expr.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace recdp {

struct Expr::Node {
  Kind kind;
  ParticipantId name;  // kVar only
  std::shared_ptr<const Node> left, right;
};

bool is_valid_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto head = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  auto tail = [&head](char c) {
    return head(c) || (c >= '0' && c <= '9') || c == '.' || c == '-';
  };
  if (!head(text.front())) return false;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (!tail(text[i])) return false;
  }
  return text != "true" && text != "false";
}

Expr::Expr() { *this = constant(false); }

Expr Expr::constant(bool value) {
  static const auto true_node =
      std::make_shared<const Node>(Node{Kind::kTrue, {}, nullptr, nullptr});
  static const auto false_node =
      std::make_shared<const Node>(Node{Kind::kFalse, {}, nullptr, nullptr});
  return Expr(value ? true_node : false_node);
}

Expr Expr::var(ParticipantId name) {
  if (!is_valid_identifier(name)) {
    throw DataError("invalid participant identifier '" + name + "'");
  }
  return Expr(std::make_shared<const Node>(Node{Kind::kVar, std::move(name), nullptr, nullptr}));
}

Expr Expr::make_and(Expr left, Expr right) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::kAnd, {}, std::move(left.node_), std::move(right.node_)}));
}

Expr Expr::make_or(Expr left, Expr right) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::kOr, {}, std::move(left.node_), std::move(right.node_)}));
}

Expr::Kind Expr::kind() const { return node_->kind; }

const ParticipantId& Expr::var_name() const { return node_->name; }

Expr Expr::left() const { return Expr(node_->left); }

Expr Expr::right() const { return Expr(node_->right); }

std::size_t Expr::size() const {
  switch (kind()) {
    case Kind::kTrue:
    case Kind::kFalse:
    case Kind::kVar:
      return 1;
    case Kind::kAnd:
    case Kind::kOr:
      return 1 + left().size() + right().size();
  }
  return 1;
}

bool Expr::structurally_equal(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::kTrue:
    case Kind::kFalse:
      return true;
    case Kind::kVar:
      return var_name() == other.var_name();
    case Kind::kAnd:
    case Kind::kOr:
      return left().structurally_equal(other.left()) &&
             right().structurally_equal(other.right());
  }
  return false;
}

int evaluate(const Expr& k, const BoolAssignment& f) {
  switch (k.kind()) {
    case Expr::Kind::kTrue:
      return 1;
    case Expr::Kind::kFalse:
      return 0;
    case Expr::Kind::kVar: {
      auto it = f.find(k.var_name());
      if (it == f.end()) throw DataError("unbound variable '" + k.var_name() + "'");
      return it->second ? 1 : 0;
    }
    case Expr::Kind::kAnd:
      return evaluate(k.left(), f) & evaluate(k.right(), f);
    case Expr::Kind::kOr:
      return evaluate(k.left(), f) | evaluate(k.right(), f);
  }
  return 0;
}

Expr substitute_const(const Expr& k, const ParticipantId& p, bool value) {
  switch (k.kind()) {
    case Expr::Kind::kTrue:
    case Expr::Kind::kFalse:
      return k;
    case Expr::Kind::kVar:
      return k.var_name() == p ? Expr::constant(value) : k;
    case Expr::Kind::kAnd:
      return Expr::make_and(substitute_const(k.left(), p, value),
                            substitute_const(k.right(), p, value));
    case Expr::Kind::kOr:
      return Expr::make_or(substitute_const(k.left(), p, value),
                           substitute_const(k.right(), p, value));
  }
  return k;
}

Expr fold_constants(const Expr& k) {
  switch (k.kind()) {
    case Expr::Kind::kTrue:
    case Expr::Kind::kFalse:
    case Expr::Kind::kVar:
      return k;
    case Expr::Kind::kAnd: {
      Expr l = fold_constants(k.left());
      Expr r = fold_constants(k.right());
      if (l.kind() == Expr::Kind::kFalse || r.kind() == Expr::Kind::kFalse) {
        return Expr::constant(false);
      }
      if (l.kind() == Expr::Kind::kTrue) return r;
      if (r.kind() == Expr::Kind::kTrue) return l;
      return Expr::make_and(std::move(l), std::move(r));
    }
    case Expr::Kind::kOr: {
      Expr l = fold_constants(k.left());
      Expr r = fold_constants(k.right());
      if (l.kind() == Expr::Kind::kTrue || r.kind() == Expr::Kind::kTrue) {
        return Expr::constant(true);
      }
      if (l.kind() == Expr::Kind::kFalse) return r;
      if (r.kind() == Expr::Kind::kFalse) return l;
      return Expr::make_or(std::move(l), std::move(r));
    }
  }
  return k;
}

namespace {

using Clause = std::vector<ParticipantId>;

void dnf_clauses(const Expr& k, std::size_t max_clauses, std::vector<Clause>* out) {
  switch (k.kind()) {
    case Expr::Kind::kVar:
      out->push_back({k.var_name()});
      return;
    case Expr::Kind::kOr:
      dnf_clauses(k.left(), max_clauses, out);
      dnf_clauses(k.right(), max_clauses, out);
      return;
    case Expr::Kind::kAnd: {
      std::vector<Clause> ls, rs;
      dnf_clauses(k.left(), max_clauses, &ls);
      dnf_clauses(k.right(), max_clauses, &rs);
      if (ls.size() * rs.size() > max_clauses) {
        throw CapacityError("DNF expansion exceeds clause limit of " +
                            std::to_string(max_clauses));
      }
      out->reserve(out->size() + ls.size() * rs.size());
      for (const Clause& cl : ls) {
        for (const Clause& cr : rs) {
          Clause merged = cl;
          merged.insert(merged.end(), cr.begin(), cr.end());
          out->push_back(std::move(merged));
        }
      }
      return;
    }
    default:
      throw DataError("to_dnf requires a constant-free expression; fold first");
  }
}

Expr clause_to_expr(const Clause& clause) {
  Expr acc = Expr::var(clause.front());
  for (std::size_t i = 1; i < clause.size(); ++i) {
    acc = Expr::make_and(std::move(acc), Expr::var(clause[i]));
  }
  return acc;
}

}  // namespace

Expr to_dnf(const Expr& k, std::size_t max_clauses) {
  Expr folded = fold_constants(k);
  if (folded.is_constant()) return folded;
  std::vector<Clause> clauses;
  dnf_clauses(folded, max_clauses, &clauses);
  if (clauses.size() > max_clauses) {
    throw CapacityError("DNF expansion exceeds clause limit of " + std::to_string(max_clauses));
  }
  Expr acc = clause_to_expr(clauses.front());
  for (std::size_t i = 1; i < clauses.size(); ++i) {
    acc = Expr::make_or(std::move(acc), clause_to_expr(clauses[i]));
  }
  return acc;
}

double phi_eval(const Expr& k, const RealAssignment& f) {
  switch (k.kind()) {
    case Expr::Kind::kTrue:
      return 1.0;
    case Expr::Kind::kFalse:
      return 0.0;
    case Expr::Kind::kVar: {
      auto it = f.find(k.var_name());
      if (it == f.end()) throw DataError("unbound variable '" + k.var_name() + "'");
      return it->second;
    }
    case Expr::Kind::kAnd:
      return std::max(0.0, phi_eval(k.left(), f) + phi_eval(k.right(), f) - 1.0);
    case Expr::Kind::kOr:
      return std::max(phi_eval(k.left(), f), phi_eval(k.right(), f));
  }
  return 0.0;
}

double phi_star_eval(const Expr& k, const RealAssignment& f, double scale) {
  if (scale < 1.0) throw DataError("phi_star_eval requires scale >= 1");
  RealAssignment complement;
  for (const auto& [p, v] : f) {
    complement[p] = 1.0 - std::min(1.0, scale * v);
  }
  return 1.0 - phi_eval(k, complement);
}

int phi_sensitivity(const Expr& k, const ParticipantId& p) {
  switch (k.kind()) {
    case Expr::Kind::kTrue:
    case Expr::Kind::kFalse:
      return 0;
    case Expr::Kind::kVar:
      return k.var_name() == p ? 1 : 0;
    case Expr::Kind::kAnd:
      return phi_sensitivity(k.left(), p) + phi_sensitivity(k.right(), p);
    case Expr::Kind::kOr:
      return std::max(phi_sensitivity(k.left(), p), phi_sensitivity(k.right(), p));
  }
  return 0;
}

namespace {

void merge_sensitivities(const Expr& k, std::map<ParticipantId, int>* acc) {
  switch (k.kind()) {
    case Expr::Kind::kTrue:
    case Expr::Kind::kFalse:
      return;
    case Expr::Kind::kVar:
      (*acc)[k.var_name()] += 1;
      return;
    case Expr::Kind::kAnd:
      merge_sensitivities(k.left(), acc);
      merge_sensitivities(k.right(), acc);
      return;
    case Expr::Kind::kOr: {
      std::map<ParticipantId, int> l, r;
      merge_sensitivities(k.left(), &l);
      merge_sensitivities(k.right(), &r);
      for (const auto& [p, s] : r) {
        auto it = l.find(p);
        if (it == l.end() || it->second < s) l[p] = s;
      }
      for (const auto& [p, s] : l) (*acc)[p] += s;
      return;
    }
  }
}

}  // namespace

std::map<ParticipantId, int> phi_sensitivities(const Expr& k) {
  std::map<ParticipantId, int> acc;
  merge_sensitivities(k, &acc);
  return acc;
}

std::set<ParticipantId> variables(const Expr& k) {
  std::set<ParticipantId> vars;
  std::vector<Expr> stack = {k};
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    switch (e.kind()) {
      case Expr::Kind::kVar:
        vars.insert(e.var_name());
        break;
      case Expr::Kind::kAnd:
      case Expr::Kind::kOr:
        stack.push_back(e.left());
        stack.push_back(e.right());
        break;
      default:
        break;
    }
  }
  return vars;
}

bool truth_equivalent(const Expr& k1, const Expr& k2, std::size_t max_vars) {
  std::set<ParticipantId> vars = variables(k1);
  std::set<ParticipantId> v2 = variables(k2);
  vars.insert(v2.begin(), v2.end());
  if (vars.size() > max_vars) {
    throw CapacityError("truth_equivalent limited to " + std::to_string(max_vars) +
                        " variables, got " + std::to_string(vars.size()));
  }
  std::vector<ParticipantId> order(vars.begin(), vars.end());
  const std::size_t n = order.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    BoolAssignment f;
    for (std::size_t i = 0; i < n; ++i) f[order[i]] = (mask >> i) & 1;
    if (evaluate(k1, f) != evaluate(k2, f)) return false;
  }
  return true;
}

namespace {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = parse_or();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError("unexpected trailing input in expression", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
            text_[pos_] == '\n')) {
      ++pos_;
    }
  }

  Expr parse_or() {
    Expr acc = parse_and();
    for (;;) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '|') {
        ++pos_;
        acc = Expr::make_or(std::move(acc), parse_and());
      } else {
        return acc;
      }
    }
  }

  Expr parse_and() {
    Expr acc = parse_factor();
    for (;;) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '&') {
        ++pos_;
        acc = Expr::make_and(std::move(acc), parse_factor());
      } else {
        return acc;
      }
    }
  }

  Expr parse_factor() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("expected expression factor", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_or();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') {
        throw ParseError("expected ')'", pos_);
      }
      ++pos_;
      return e;
    }
    std::size_t start = pos_;
    auto head = [](char ch) {
      return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || ch == '_';
    };
    auto tail = [&head](char ch) {
      return head(ch) || (ch >= '0' && ch <= '9') || ch == '.' || ch == '-';
    };
    if (!head(c)) throw ParseError("expected identifier, constant, or '('", pos_);
    ++pos_;
    while (pos_ < text_.size() && tail(text_[pos_])) ++pos_;
    std::string_view word = text_.substr(start, pos_ - start);
    if (word == "true") return Expr::constant(true);
    if (word == "false") return Expr::constant(false);
    return Expr::var(std::string(word));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_or(const Expr& k, std::string* out);

void print_factor(const Expr& k, std::string* out) {
  switch (k.kind()) {
    case Expr::Kind::kTrue:
      out->append("true");
      return;
    case Expr::Kind::kFalse:
      out->append("false");
      return;
    case Expr::Kind::kVar:
      out->append(k.var_name());
      return;
    case Expr::Kind::kOr:
      out->push_back('(');
      print_or(k, out);
      out->push_back(')');
      return;
    case Expr::Kind::kAnd:
      // An AND under an AND needs no parentheses.
      print_or(k, out);
      return;
  }
}

void print_and(const Expr& k, std::string* out) {
  if (k.kind() == Expr::Kind::kAnd) {
    print_and(k.left(), out);
    out->push_back('&');
    print_and(k.right(), out);
  } else {
    print_factor(k, out);
  }
}

void print_or(const Expr& k, std::string* out) {
  if (k.kind() == Expr::Kind::kOr) {
    print_or(k.left(), out);
    out->push_back('|');
    print_or(k.right(), out);
  } else {
    print_and(k, out);
  }
}

}  // namespace

Expr parse_expr(std::string_view text) { return ExprParser(text).parse(); }

std::string to_string(const Expr& k) {
  std::string out;
  print_or(k, &out);
  return out;
}

}  // namespace recdp
