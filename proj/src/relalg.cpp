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

#include "recdp/relalg.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

namespace recdp {

namespace {

class RelalgParser {
 public:
  explicit RelalgParser(const std::string& text) : text_(text) {}

  RelalgQuery parse() {
    RelalgQuery query;
    query.root = parse_query();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input in query", pos_);
    return query;
  }

 private:
  using Node = RelalgQuery::Node;
  using Op = RelalgQuery::Op;

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  std::string parse_ident() {
    skip_ws();
    std::size_t start = pos_;
    auto head = [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto tail = [&head](char c) {
      return head(c) || (c >= '0' && c <= '9') || c == '.' || c == '-';
    };
    if (pos_ >= text_.size() || !head(text_[pos_])) {
      throw ParseError("expected identifier", pos_);
    }
    ++pos_;
    while (pos_ < text_.size() && tail(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  bool lookahead_keyword(const std::string& word) {
    skip_ws();
    if (text_.compare(pos_, word.size(), word) != 0) return false;
    std::size_t end = pos_ + word.size();
    if (end < text_.size()) {
      char c = text_[end];
      if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
          c == '_' || c == '.' || c == '-') {
        return false;
      }
    }
    pos_ = end;
    return true;
  }

  std::shared_ptr<const Node> parse_query() {
    skip_ws();
    if (lookahead_keyword("UNION")) return parse_pair(Op::kUnion);
    if (lookahead_keyword("JOIN")) return parse_pair(Op::kJoin);
    if (lookahead_keyword("PROJECT")) return parse_project();
    if (lookahead_keyword("SELECT")) return parse_select();
    if (lookahead_keyword("RENAME")) return parse_rename();
    auto node = std::make_shared<Node>();
    node->op = Op::kTable;
    node->table = parse_ident();
    return node;
  }

  std::shared_ptr<const Node> parse_pair(Op op) {
    auto node = std::make_shared<Node>();
    node->op = op;
    expect('(');
    node->child1 = parse_query();
    expect(',');
    node->child2 = parse_query();
    expect(')');
    return node;
  }

  std::shared_ptr<const Node> parse_project() {
    auto node = std::make_shared<Node>();
    node->op = Op::kProject;
    expect('[');
    node->attrs.push_back(parse_ident());
    while (eat(',')) node->attrs.push_back(parse_ident());
    expect(']');
    expect('(');
    node->child1 = parse_query();
    expect(')');
    return node;
  }

  RelalgQuery::Atom parse_atom() {
    RelalgQuery::Atom atom;
    atom.lhs = parse_ident();
    expect('=');
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("expected atom right-hand side", pos_);
    char c = text_[pos_];
    if (c == '"') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
      if (pos_ >= text_.size()) throw ParseError("unterminated string literal", start);
      atom.rhs = text_.substr(start, pos_ - start);
      ++pos_;
      atom.rhs_is_attr = false;
    } else if (c >= '0' && c <= '9') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      atom.rhs = text_.substr(start, pos_ - start);
      atom.rhs_is_attr = false;
    } else {
      atom.rhs = parse_ident();
      atom.rhs_is_attr = true;
    }
    return atom;
  }

  std::shared_ptr<const Node> parse_select() {
    auto node = std::make_shared<Node>();
    node->op = Op::kSelect;
    expect('[');
    node->atoms.push_back(parse_atom());
    while (lookahead_keyword("AND")) node->atoms.push_back(parse_atom());
    expect(']');
    expect('(');
    node->child1 = parse_query();
    expect(')');
    return node;
  }

  std::shared_ptr<const Node> parse_rename() {
    auto node = std::make_shared<Node>();
    node->op = Op::kRename;
    expect('[');
    for (;;) {
      std::string from = parse_ident();
      skip_ws();
      if (text_.compare(pos_, 2, "->") != 0) throw ParseError("expected '->'", pos_);
      pos_ += 2;
      node->renames.emplace_back(std::move(from), parse_ident());
      if (!eat(',')) break;
    }
    expect(']');
    expect('(');
    node->child1 = parse_query();
    expect(')');
    return node;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

Schema check_node(const RelalgQuery::Node& node, const TableSet& tables) {
  using Op = RelalgQuery::Op;
  switch (node.op) {
    case Op::kTable: {
      auto it = tables.find(node.table);
      if (it == tables.end()) throw DataError("unknown table '" + node.table + "'");
      return it->second.schema();
    }
    case Op::kUnion: {
      Schema s1 = check_node(*node.child1, tables);
      Schema s2 = check_node(*node.child2, tables);
      if (s1 != s2) throw SchemaError("UNION requires identical schemas");
      return s1;
    }
    case Op::kJoin: {
      Schema s1 = check_node(*node.child1, tables);
      Schema s2 = check_node(*node.child2, tables);
      std::set<std::string> present(s1.begin(), s1.end());
      for (const std::string& a : s2) {
        if (!present.count(a)) s1.push_back(a);
      }
      return s1;
    }
    case Op::kProject: {
      Schema inner = check_node(*node.child1, tables);
      std::set<std::string> present(inner.begin(), inner.end());
      std::set<std::string> chosen;
      for (const std::string& a : node.attrs) {
        if (!present.count(a)) {
          throw SchemaError("PROJECT attribute '" + a + "' is not in the schema");
        }
        if (!chosen.insert(a).second) {
          throw SchemaError("PROJECT attribute '" + a + "' listed twice");
        }
      }
      return Schema(node.attrs.begin(), node.attrs.end());
    }
    case Op::kSelect: {
      Schema inner = check_node(*node.child1, tables);
      std::set<std::string> present(inner.begin(), inner.end());
      for (const auto& atom : node.atoms) {
        if (!present.count(atom.lhs)) {
          throw SchemaError("SELECT attribute '" + atom.lhs + "' is not in the schema");
        }
        if (atom.rhs_is_attr && !present.count(atom.rhs)) {
          throw SchemaError("SELECT attribute '" + atom.rhs + "' is not in the schema");
        }
      }
      return inner;
    }
    case Op::kRename: {
      Schema inner = check_node(*node.child1, tables);
      std::map<std::string, std::string> mapping;
      std::set<std::string> present(inner.begin(), inner.end());
      for (const auto& [from, to] : node.renames) {
        if (!present.count(from)) {
          throw SchemaError("RENAME attribute '" + from + "' is not in the schema");
        }
        if (!mapping.emplace(from, to).second) {
          throw SchemaError("RENAME lists attribute '" + from + "' twice");
        }
      }
      for (const std::string& a : inner) mapping.emplace(a, a);
      Schema out;
      std::set<std::string> targets;
      for (const std::string& a : inner) {
        const std::string& to = mapping.at(a);
        if (!targets.insert(to).second) {
          throw SchemaError("RENAME target '" + to + "' is not unique");
        }
        out.push_back(to);
      }
      return out;
    }
  }
  throw Error("unreachable query op");
}

AnnotatedRelation execute_node(const RelalgQuery::Node& node, const TableSet& tables) {
  using Op = RelalgQuery::Op;
  switch (node.op) {
    case Op::kTable:
      return tables.at(node.table);
    case Op::kUnion:
      return union_relations(execute_node(*node.child1, tables),
                             execute_node(*node.child2, tables));
    case Op::kJoin:
      return natural_join(execute_node(*node.child1, tables),
                          execute_node(*node.child2, tables));
    case Op::kProject:
      return project(execute_node(*node.child1, tables), node.attrs);
    case Op::kSelect: {
      AnnotatedRelation inner = execute_node(*node.child1, tables);
      struct Test {
        int lhs;
        int rhs_attr;  // -1 for literal
        std::string literal;
      };
      std::vector<Test> tests;
      for (const auto& atom : node.atoms) {
        Test t;
        t.lhs = inner.attribute_index(atom.lhs);
        t.rhs_attr = atom.rhs_is_attr ? inner.attribute_index(atom.rhs) : -1;
        t.literal = atom.rhs;
        tests.push_back(std::move(t));
      }
      return select(inner, [&tests](const Tuple& t) {
        for (const Test& test : tests) {
          const std::string& lhs = t.values[test.lhs];
          const std::string& rhs =
              test.rhs_attr >= 0 ? t.values[test.rhs_attr] : test.literal;
          if (lhs != rhs) return false;
        }
        return true;
      });
    }
    case Op::kRename: {
      AnnotatedRelation inner = execute_node(*node.child1, tables);
      std::map<std::string, std::string> mapping;
      for (const auto& [from, to] : node.renames) mapping.emplace(from, to);
      for (const std::string& a : inner.schema()) mapping.emplace(a, a);
      return rename(inner, mapping);
    }
  }
  throw Error("unreachable query op");
}

}  // namespace

RelalgQuery parse_relalg(const std::string& text) { return RelalgParser(text).parse(); }

Schema check_schema(const RelalgQuery& query, const TableSet& tables) {
  if (!query.root) throw DataError("empty query");
  return check_node(*query.root, tables);
}

AnnotatedRelation execute(const RelalgQuery& query, const TableSet& tables) {
  check_schema(query, tables);
  return execute_node(*query.root, tables);
}

TableSet load_tables_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("'" + dir + "' is not a directory");
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tbl") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  TableSet tables;
  for (const fs::path& p : paths) {
    tables.emplace(p.stem().string(), load_annotated_table(p.string()));
  }
  return tables;
}

}  // namespace recdp
