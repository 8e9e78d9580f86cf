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

#include "recdp/krelation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

namespace recdp {

namespace {

void check_schema_valid(const Schema& schema) {
  std::set<std::string> seen;
  for (const std::string& attr : schema) {
    if (attr.empty()) throw SchemaError("empty attribute name");
    if (!seen.insert(attr).second) {
      throw SchemaError("duplicate attribute '" + attr + "' in schema");
    }
  }
}

}  // namespace

AnnotatedRelation::AnnotatedRelation(Schema schema) : schema_(std::move(schema)) {
  check_schema_valid(schema_);
}

void AnnotatedRelation::add_row(Tuple tuple, Expr annotation) {
  if (tuple.values.size() != schema_.size()) {
    throw SchemaError("tuple arity " + std::to_string(tuple.values.size()) +
                      " does not match schema arity " + std::to_string(schema_.size()));
  }
  auto it = rows_.find(tuple);
  if (it != rows_.end()) {
    annotation = Expr::make_or(it->second, std::move(annotation));
  }
  Expr folded = fold_constants(annotation);
  if (folded.kind() == Expr::Kind::kFalse) {
    if (it != rows_.end()) rows_.erase(it);
    return;
  }
  for (const ParticipantId& p : variables(folded)) participants_.insert(p);
  rows_.insert_or_assign(std::move(tuple), std::move(folded));
}

void AnnotatedRelation::add_participant(ParticipantId p) {
  if (!is_valid_identifier(p)) throw DataError("invalid participant identifier '" + p + "'");
  participants_.insert(std::move(p));
}

void AnnotatedRelation::set_participants(std::set<ParticipantId> participants) {
  participants_ = std::move(participants);
  for (const auto& [t, ann] : rows_) {
    for (const ParticipantId& p : variables(ann)) {
      if (!participants_.count(p)) {
        throw DataError("participant set lacks annotation variable '" + p + "'");
      }
    }
  }
}

int AnnotatedRelation::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t AnnotatedRelation::total_annotation_size() const {
  std::size_t total = 0;
  for (const auto& [t, ann] : rows_) total += ann.size();
  return total;
}

LinearQuery LinearQuery::count() {
  return LinearQuery{[](const Schema&, const Tuple&) { return 1.0; }};
}

LinearQuery LinearQuery::column(std::string attribute) {
  return LinearQuery{[attribute = std::move(attribute)](const Schema& schema,
                                                        const Tuple& t) -> double {
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema[i] == attribute) {
        const std::string& raw = t.values[i];
        std::size_t consumed = 0;
        double value = 0;
        try {
          value = std::stod(raw, &consumed);
        } catch (const std::exception&) {
          throw DataError("weight column '" + attribute + "' has non-numeric value '" + raw + "'");
        }
        if (consumed != raw.size()) {
          throw DataError("weight column '" + attribute + "' has non-numeric value '" + raw + "'");
        }
        if (value < 0) {
          throw DataError("weight column '" + attribute + "' has negative value '" + raw + "'");
        }
        return value;
      }
    }
    throw SchemaError("weight column '" + attribute + "' is not in the schema");
  }};
}

AnnotatedRelation union_relations(const AnnotatedRelation& r1, const AnnotatedRelation& r2) {
  if (r1.schema() != r2.schema()) {
    throw SchemaError("union requires identical schemas");
  }
  AnnotatedRelation out(r1.schema());
  for (const auto& [t, ann] : r1.rows()) out.add_row(t, ann);
  for (const auto& [t, ann] : r2.rows()) out.add_row(t, ann);
  std::set<ParticipantId> participants = r1.participants();
  participants.insert(r2.participants().begin(), r2.participants().end());
  out.set_participants(std::move(participants));
  return out;
}

AnnotatedRelation project(const AnnotatedRelation& r, const std::vector<std::string>& attrs) {
  std::vector<int> indexes;
  indexes.reserve(attrs.size());
  for (const std::string& a : attrs) {
    int idx = r.attribute_index(a);
    if (idx < 0) throw SchemaError("projection attribute '" + a + "' is not in the schema");
    indexes.push_back(idx);
  }
  AnnotatedRelation out(Schema(attrs.begin(), attrs.end()));
  // rows() iterates in sorted tuple order, so group annotations fold
  // left-to-right deterministically.
  for (const auto& [t, ann] : r.rows()) {
    Tuple projected;
    projected.values.reserve(indexes.size());
    for (int idx : indexes) projected.values.push_back(t.values[idx]);
    out.add_row(std::move(projected), ann);
  }
  out.set_participants(r.participants());
  return out;
}

AnnotatedRelation select(const AnnotatedRelation& r,
                         const std::function<bool(const Tuple&)>& pred) {
  AnnotatedRelation out(r.schema());
  for (const auto& [t, ann] : r.rows()) {
    if (pred(t)) out.add_row(t, ann);
  }
  out.set_participants(r.participants());
  return out;
}

AnnotatedRelation natural_join(const AnnotatedRelation& r1, const AnnotatedRelation& r2) {
  const Schema& s1 = r1.schema();
  const Schema& s2 = r2.schema();
  std::vector<int> shared1, shared2;     // indexes of shared attributes
  std::vector<int> extra2;               // r2-only attribute indexes
  for (std::size_t j = 0; j < s2.size(); ++j) {
    int idx = r1.attribute_index(s2[j]);
    if (idx >= 0) {
      shared1.push_back(idx);
      shared2.push_back(static_cast<int>(j));
    } else {
      extra2.push_back(static_cast<int>(j));
    }
  }
  Schema out_schema = s1;
  for (int j : extra2) out_schema.push_back(s2[j]);
  AnnotatedRelation out(std::move(out_schema));

  std::map<std::vector<std::string>, std::vector<const std::pair<const Tuple, Expr>*>> buckets;
  for (const auto& row2 : r2.rows()) {
    std::vector<std::string> key;
    key.reserve(shared2.size());
    for (int j : shared2) key.push_back(row2.first.values[j]);
    buckets[std::move(key)].push_back(&row2);
  }
  for (const auto& [t1, ann1] : r1.rows()) {
    std::vector<std::string> key;
    key.reserve(shared1.size());
    for (int idx : shared1) key.push_back(t1.values[idx]);
    auto it = buckets.find(key);
    if (it == buckets.end()) continue;
    for (const auto* row2 : it->second) {
      Tuple combined = t1;
      for (int j : extra2) combined.values.push_back(row2->first.values[j]);
      out.add_row(std::move(combined), Expr::make_and(ann1, row2->second));
    }
  }
  std::set<ParticipantId> participants = r1.participants();
  participants.insert(r2.participants().begin(), r2.participants().end());
  out.set_participants(std::move(participants));
  return out;
}

AnnotatedRelation rename(const AnnotatedRelation& r,
                         const std::map<std::string, std::string>& mapping) {
  const Schema& schema = r.schema();
  if (mapping.size() != schema.size()) {
    throw SchemaError("rename mapping must cover the schema exactly");
  }
  Schema out_schema;
  out_schema.reserve(schema.size());
  std::set<std::string> targets;
  for (const std::string& attr : schema) {
    auto it = mapping.find(attr);
    if (it == mapping.end()) {
      throw SchemaError("rename mapping lacks attribute '" + attr + "'");
    }
    if (!targets.insert(it->second).second) {
      throw SchemaError("rename mapping is not a bijection: duplicate target '" + it->second +
                        "'");
    }
    out_schema.push_back(it->second);
  }
  AnnotatedRelation out(std::move(out_schema));
  for (const auto& [t, ann] : r.rows()) out.add_row(t, ann);
  out.set_participants(r.participants());
  return out;
}

AnnotatedRelation remove_participant(const AnnotatedRelation& r, const ParticipantId& p) {
  if (!r.participants().count(p)) {
    throw DataError("unknown participant '" + p + "'");
  }
  AnnotatedRelation out(r.schema());
  for (const auto& [t, ann] : r.rows()) {
    out.add_row(t, substitute_const(ann, p, false));
  }
  std::set<ParticipantId> participants = r.participants();
  participants.erase(p);
  out.set_participants(std::move(participants));
  return out;
}

std::set<Tuple> impact(const AnnotatedRelation& r, const ParticipantId& p) {
  std::set<Tuple> out;
  for (const auto& [t, ann] : r.rows()) {
    if (variables(ann).count(p)) out.insert(t);
  }
  return out;
}

std::pair<std::map<ParticipantId, double>, double> universal_empirical_sensitivity(
    const AnnotatedRelation& r, const LinearQuery& q) {
  std::map<ParticipantId, double> per_participant;
  for (const ParticipantId& p : r.participants()) per_participant[p] = 0.0;
  for (const auto& [t, ann] : r.rows()) {
    double w = q(r.schema(), t);
    if (w < 0) throw DataError("linear query weights must be nonnegative");
    for (const ParticipantId& p : variables(ann)) per_participant[p] += w;
  }
  double max_value = 0.0;
  for (const auto& [p, v] : per_participant) max_value = std::max(max_value, v);
  return {std::move(per_participant), max_value};
}

double query_true_answer(const AnnotatedRelation& r, const LinearQuery& q) {
  double total = 0.0;
  for (const auto& [t, ann] : r.rows()) {
    double w = q(r.schema(), t);
    if (w < 0) throw DataError("linear query weights must be nonnegative");
    total += w;
  }
  return total;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

AnnotatedRelation parse_annotated_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&](std::string* out) {
    while (std::getline(in, *out)) {
      ++line_no;
      if (!out->empty() && out->back() == '\r') out->pop_back();
      return true;
    }
    return false;
  };

  if (!next_line(&line) || line.rfind("#schema\t", 0) != 0) {
    throw ParseError("annotated table must start with a '#schema' line", line_no);
  }
  std::vector<std::string> header = split(line, '\t');
  if (header.size() < 2 || header.back() != "@annotation") {
    throw ParseError("'#schema' line must end with '@annotation'", line_no);
  }
  Schema schema(header.begin() + 1, header.end() - 1);
  AnnotatedRelation out{schema};

  bool explicit_participants = false;
  std::set<ParticipantId> participants;
  while (next_line(&line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#participants\t", 0) == 0) {
        explicit_participants = true;
        std::vector<std::string> fields = split(line, '\t');
        if (fields.size() != 2) {
          throw ParseError("'#participants' line must carry one tab-separated field", line_no);
        }
        for (const std::string& p : split(fields[1], ',')) {
          if (p.empty()) continue;
          if (!is_valid_identifier(p)) {
            throw ParseError("invalid participant id '" + p + "' on line " +
                             std::to_string(line_no));
          }
          participants.insert(p);
        }
      }
      continue;  // comment
    }
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != schema.size() + 1) {
      throw ParseError("line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(schema.size() + 1));
    }
    Tuple tuple;
    tuple.values.assign(fields.begin(), fields.end() - 1);
    Expr annotation;
    try {
      annotation = parse_expr(fields.back());
    } catch (const ParseError& e) {
      throw ParseError(std::string("bad annotation on line ") + std::to_string(line_no) + ": " +
                       e.what());
    }
    out.add_row(std::move(tuple), std::move(annotation));
  }
  if (explicit_participants) {
    out.set_participants(std::move(participants));
  }
  return out;
}

AnnotatedRelation load_annotated_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open table file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_annotated_table(buffer.str());
}

std::string format_annotated_table(const AnnotatedRelation& r) {
  std::string out = "#schema";
  for (const std::string& attr : r.schema()) {
    out += '\t';
    out += attr;
  }
  out += "\t@annotation\n#participants\t";
  bool first = true;
  for (const ParticipantId& p : r.participants()) {
    if (!first) out += ',';
    out += p;
    first = false;
  }
  out += '\n';
  for (const auto& [t, ann] : r.rows()) {
    for (const std::string& v : t.values) {
      out += v;
      out += '\t';
    }
    out += to_string(ann);
    out += '\n';
  }
  return out;
}

}  // namespace recdp
