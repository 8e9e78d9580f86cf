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

#ifndef RECDP_RELALG_HPP_
#define RECDP_RELALG_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "recdp/krelation.hpp"

namespace recdp {

// Positive relational algebra query tree. Grammar:
//   query := 'UNION' '(' query ',' query ')'
//          | 'JOIN' '(' query ',' query ')'
//          | 'PROJECT' '[' attr (',' attr)* ']' '(' query ')'
//          | 'SELECT' '[' atom ('AND' atom)* ']' '(' query ')'
//          | 'RENAME' '[' attr '->' attr (',' attr '->' attr)* ']' '(' query ')'
//          | IDENT
// An atom is `attr = attr` or `attr = literal`; literals are bare integers
// or double-quoted strings, compared as exact strings. Keywords are
// case-sensitive.
struct RelalgQuery {
  enum class Op { kTable, kUnion, kJoin, kProject, kSelect, kRename };

  struct Atom {
    std::string lhs;
    bool rhs_is_attr = false;
    std::string rhs;
  };

  struct Node {
    Op op = Op::kTable;
    std::string table;                                    // kTable
    std::vector<std::string> attrs;                       // kProject
    std::vector<Atom> atoms;                              // kSelect
    std::vector<std::pair<std::string, std::string>> renames;  // kRename
    std::shared_ptr<const Node> child1, child2;
  };

  std::shared_ptr<const Node> root;
};

RelalgQuery parse_relalg(const std::string& text);

using TableSet = std::map<std::string, AnnotatedRelation>;

// Binds table names and type-checks schemas; returns the output schema.
// Throws DataError for unknown tables, SchemaError for schema violations.
Schema check_schema(const RelalgQuery& query, const TableSet& tables);

// Executes with provenance propagation. Checks schemas first.
AnnotatedRelation execute(const RelalgQuery& query, const TableSet& tables);

// Loads every *.tbl file in the directory; the table name is the file stem.
TableSet load_tables_dir(const std::string& dir);

}  // namespace recdp

#endif  // RECDP_RELALG_HPP_
