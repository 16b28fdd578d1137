// Copyright 2026 The gemkit Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "gemkit/ingest.hpp"

#include <fstream>
#include <sstream>

#include "gemkit/csv.hpp"
#include "gemkit/error.hpp"
#include "json.hpp"

namespace gemkit {

using ojson = nlohmann::ordered_json;

TableFormat parse_table_format(std::string_view name) {
  if (name == "relational-csv") return TableFormat::kRelationalCsv;
  if (name == "semi-jsonl") return TableFormat::kSemiJsonl;
  if (name == "text-lines") return TableFormat::kTextLines;
  throw_invalid("unknown table format '" + std::string(name) + "'");
}

std::string_view to_string(TableFormat format) {
  switch (format) {
    case TableFormat::kRelationalCsv: return "relational-csv";
    case TableFormat::kSemiJsonl: return "semi-jsonl";
    case TableFormat::kTextLines: return "text-lines";
  }
  return "?";
}

namespace {

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_invalid("cannot write " + path.string());
  return out;
}

std::vector<Entity> load_relational(const TableDescriptor& desc) {
  const auto rows = csv::read_file(desc.path);
  if (rows.empty()) throw_invalid(desc.path.string() + ": missing header row");
  const auto& header = rows.front().fields;
  std::size_t id_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == desc.id_field) id_col = c;
  }
  if (id_col == header.size()) {
    throw_invalid(desc.path.string() + ": header lacks id field '" + desc.id_field + "'");
  }
  std::vector<Entity> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != header.size()) {
      throw_invalid(desc.path.string() + ": line " + std::to_string(rows[r].line) + " has " +
                    std::to_string(f.size()) + " fields, header has " +
                    std::to_string(header.size()));
    }
    StructuredBody attrs;
    attrs.reserve(header.size() - 1);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != id_col) attrs.push_back({header[c], f[c]});
    }
    out.push_back(Entity{f[id_col], std::move(attrs)});
  }
  return out;
}

std::string scalar_text(const ojson& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return "";
  // Numbers use the shortest decimal that round-trips; booleans print as words.
  return j.dump();
}

SemiValue to_semi(const ojson& j) {
  if (j.is_array()) {
    SemiValue::List items;
    items.reserve(j.size());
    for (const auto& item : j) items.push_back(to_semi(item));
    return SemiValue::list(std::move(items));
  }
  if (j.is_object()) {
    SemiValue::Object fields;
    for (const auto& [k, v] : j.items()) fields.push_back({k, to_semi(v)});
    return SemiValue::object(std::move(fields));
  }
  return SemiValue::scalar(scalar_text(j));
}

ojson from_semi(const SemiValue& v) {
  if (const auto* s = std::get_if<std::string>(&v.node)) return ojson(*s);
  if (const auto* list = std::get_if<SemiValue::List>(&v.node)) {
    ojson arr = ojson::array();
    for (const auto& item : *list) arr.push_back(from_semi(item));
    return arr;
  }
  ojson obj = ojson::object();
  for (const auto& f : std::get<SemiValue::Object>(v.node)) obj[f.name] = from_semi(f.value);
  return obj;
}

std::vector<Entity> load_semi(const TableDescriptor& desc) {
  const std::string text = read_all(desc.path);
  std::vector<Entity> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw_invalid(desc.path.string() + ": line " + std::to_string(line_no) +
                    ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) {
      throw_invalid(desc.path.string() + ": line " + std::to_string(line_no) +
                    ": record is not a JSON object");
    }
    auto id_it = j.find(desc.id_field);
    if (id_it == j.end()) {
      throw_invalid(desc.path.string() + ": record " + std::to_string(record) +
                    " lacks id field '" + desc.id_field + "'");
    }
    Entity e;
    e.id = scalar_text(*id_it);
    SemiBody fields;
    for (const auto& [k, v] : j.items()) {
      if (k == desc.id_field) continue;
      fields.push_back({k, to_semi(v)});
    }
    e.body = std::move(fields);
    out.push_back(std::move(e));
    ++record;
  }
  return out;
}

std::vector<Entity> load_text(const TableDescriptor& desc) {
  const std::string text = read_all(desc.path);
  std::vector<Entity> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw_invalid(desc.path.string() + ": line " + std::to_string(line_no) +
                    ": expected id<TAB>text");
    }
    out.push_back(Entity{line.substr(0, tab), TextBody{line.substr(tab + 1)}});
  }
  return out;
}

}  // namespace

std::vector<Entity> load_table(const TableDescriptor& desc) {
  switch (desc.format) {
    case TableFormat::kRelationalCsv: return load_relational(desc);
    case TableFormat::kSemiJsonl: return load_semi(desc);
    case TableFormat::kTextLines: return load_text(desc);
  }
  throw_internal("unreachable table format");
}

void write_table(const TableDescriptor& desc, const std::vector<Entity>& entities) {
  auto out = open_out(desc.path);
  switch (desc.format) {
    case TableFormat::kRelationalCsv: {
      std::vector<std::string> header{desc.id_field};
      if (!entities.empty()) {
        for (const auto& a : std::get<StructuredBody>(entities.front().body)) {
          header.push_back(a.name);
        }
      }
      csv::write_row(out, header);
      for (const auto& e : entities) {
        const auto* attrs = std::get_if<StructuredBody>(&e.body);
        if (attrs == nullptr || attrs->size() + 1 != header.size()) {
          throw_invalid("write_table: entity " + e.id + " does not fit the relational header");
        }
        std::vector<std::string> row{e.id};
        for (const auto& a : *attrs) row.push_back(a.value);
        csv::write_row(out, row);
      }
      break;
    }
    case TableFormat::kSemiJsonl: {
      for (const auto& e : entities) {
        const auto* fields = std::get_if<SemiBody>(&e.body);
        if (fields == nullptr) throw_invalid("write_table: entity " + e.id + " is not semi-structured");
        ojson obj = ojson::object();
        obj[desc.id_field] = e.id;
        for (const auto& f : *fields) obj[f.name] = from_semi(f.value);
        out << obj.dump() << '\n';
      }
      break;
    }
    case TableFormat::kTextLines: {
      for (const auto& e : entities) {
        const auto* t = std::get_if<TextBody>(&e.body);
        if (t == nullptr) throw_invalid("write_table: entity " + e.id + " is not textual");
        if (t->text.find('\n') != std::string::npos) {
          throw_invalid("write_table: entity " + e.id + " text contains a newline");
        }
        out << e.id << '\t' << t->text << '\n';
      }
      break;
    }
  }
}

DatasetSplit load_pairs(const std::filesystem::path& path, const EntityTable& left,
                        const EntityTable& right, SplitKind kind) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw_invalid(path.string() + ": missing header row");
  const auto& header = rows.front().fields;
  if (header.size() < 2 || header.size() > 3 || header[0] != "ltable_id" ||
      header[1] != "rtable_id" || (header.size() == 3 && header[2] != "label")) {
    throw_invalid(path.string() + ": expected header ltable_id,rtable_id[,label]");
  }
  const bool labeled = header.size() == 3;
  DatasetSplit split;
  split.kind = kind;
  split.pairs.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = path.string() + ": line " + std::to_string(rows[r].line);
    if (f.size() != header.size()) throw_invalid(where + ": wrong field count");
    if (!left.contains(f[0])) throw_invalid(where + ": dangling id " + f[0]);
    if (!right.contains(f[1])) throw_invalid(where + ": dangling id " + f[1]);
    CandidatePair p{f[0], f[1], std::nullopt, false};
    if (labeled) {
      if (f[2] == "0") {
        p.label = MatchLabel::kMismatch;
      } else if (f[2] == "1") {
        p.label = MatchLabel::kMatch;
      } else {
        throw_invalid(where + ": label outside {0,1}: '" + f[2] + "'");
      }
    }
    split.pairs.push_back(std::move(p));
  }
  return split;
}

void write_pairs(const std::filesystem::path& path, const std::vector<CandidatePair>& pairs,
                 bool with_labels) {
  auto out = open_out(path);
  if (with_labels) {
    csv::write_row(out, {"ltable_id", "rtable_id", "label"});
  } else {
    csv::write_row(out, {"ltable_id", "rtable_id"});
  }
  for (const auto& p : pairs) {
    if (with_labels) {
      if (!p.label) throw_invalid("write_pairs: unlabeled pair " + p.left_id + "," + p.right_id);
      csv::write_row(out, {p.left_id, p.right_id, std::to_string(to_int(*p.label))});
    } else {
      csv::write_row(out, {p.left_id, p.right_id});
    }
  }
}

}  // namespace gemkit
