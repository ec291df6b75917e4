// wfst/wfst.cc

// Copyright 2026  Dynprec Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "wfst/wfst.h"

#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "util/errors.h"

namespace dynprec {
namespace wfst {

namespace {

[[noreturn]] void ParseFail(int line, const std::string &msg) {
  std::ostringstream os;
  os << "wfst parse error at line " << line << ": " << msg;
  throw ValidationError(os.str());
}

}  // namespace

void Wfst::Validate() const {
  if (start < 0 || start >= NumStates()) {
    throw ValidationError("wfst: missing or invalid start state");
  }
  bool any_final = false;
  for (std::int32_t s = 0; s < NumStates(); ++s) {
    if (IsFinal(s)) {
      any_final = true;
      if (!(final_cost[s] >= 0.0) || !std::isfinite(final_cost[s])) {
        throw ValidationError("wfst: final cost must be finite and >= 0");
      }
    } else if (arcs[s].empty()) {
      throw ValidationError("wfst: dangling state " + std::to_string(s) +
                            " (no outgoing arcs and not final)");
    }
    for (const Arc &a : arcs[s]) {
      if (a.dst < 0 || a.dst >= NumStates()) {
        throw ValidationError("wfst: arc from state " + std::to_string(s) +
                              " has invalid destination");
      }
      if (!(a.cost >= 0.0) || !std::isfinite(a.cost)) {
        throw ValidationError("wfst: arc cost must be finite and >= 0");
      }
      if (a.ilabel < 0 || a.olabel < 0) {
        throw ValidationError("wfst: negative label");
      }
    }
  }
  if (!any_final) throw ValidationError("wfst: no final states");

  // A final state must be reachable from the start.
  std::vector<char> seen(NumStates(), 0);
  std::deque<std::int32_t> queue = {start};
  seen[start] = 1;
  bool final_reachable = false;
  while (!queue.empty() && !final_reachable) {
    const std::int32_t s = queue.front();
    queue.pop_front();
    if (IsFinal(s)) final_reachable = true;
    for (const Arc &a : arcs[s]) {
      if (!seen[a.dst]) {
        seen[a.dst] = 1;
        queue.push_back(a.dst);
      }
    }
  }
  if (!final_reachable) {
    throw ValidationError("wfst: no final state reachable from start");
  }
}

Wfst ParseWfstText(std::istream &is) {
  struct RawArc {
    std::int32_t src, dst, ilabel, olabel;
    double cost;
  };
  std::vector<RawArc> raw_arcs;
  std::vector<std::pair<std::int32_t, double>> finals;
  std::int32_t start = -1;
  std::int32_t max_state = -1;

  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ls >> tok) fields.push_back(tok);
    if (fields.empty()) continue;

    auto to_i32 = [&](const std::string &s) -> std::int32_t {
      try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return static_cast<std::int32_t>(v);
      } catch (const std::exception &) {
        ParseFail(line_no, "expected integer, got '" + s + "'");
      }
    };
    auto to_f64 = [&](const std::string &s) -> double {
      try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception &) {
        ParseFail(line_no, "expected number, got '" + s + "'");
      }
    };

    if (fields.size() == 5) {
      RawArc a{to_i32(fields[0]), to_i32(fields[1]), to_i32(fields[2]),
               to_i32(fields[3]), to_f64(fields[4])};
      if (a.src < 0 || a.dst < 0) ParseFail(line_no, "negative state id");
      raw_arcs.push_back(a);
      max_state = std::max({max_state, a.src, a.dst});
      if (start < 0) start = a.src;
    } else if (fields.size() == 2) {
      const std::int32_t s = to_i32(fields[0]);
      if (s < 0) ParseFail(line_no, "negative state id");
      finals.emplace_back(s, to_f64(fields[1]));
      max_state = std::max(max_state, s);
      if (start < 0) start = s;
    } else {
      ParseFail(line_no, "expected 5 fields (arc) or 2 fields (final)");
    }
  }

  if (max_state < 0) throw ValidationError("wfst: empty graph description");

  Wfst g;
  g.start = start;
  g.arcs.resize(max_state + 1);
  g.final_cost.assign(max_state + 1, kInfCost);
  for (const auto &a : raw_arcs) {
    g.arcs[a.src].push_back(Arc{a.dst, a.ilabel, a.olabel, a.cost});
    g.max_ilabel = std::max(g.max_ilabel, a.ilabel);
  }
  for (const auto &[s, c] : finals) {
    g.final_cost[s] = std::min(g.final_cost[s], c);
  }
  g.Validate();
  return g;
}

Wfst ParseWfstText(const std::string &text) {
  std::istringstream is(text);
  return ParseWfstText(is);
}

Wfst LoadWfst(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open wfst file: " + path);
  return ParseWfstText(is);
}

void SerializeWfstText(const Wfst &g, std::ostream &os) {
  os << std::setprecision(17);
  // The start state's records go first; that is what marks it as the start.
  auto emit_state = [&](std::int32_t s) {
    for (const Arc &a : g.arcs[s]) {
      os << s << ' ' << a.dst << ' ' << a.ilabel << ' ' << a.olabel << ' '
         << a.cost << '\n';
    }
    if (g.IsFinal(s)) os << s << ' ' << g.final_cost[s] << '\n';
  };
  emit_state(g.start);
  for (std::int32_t s = 0; s < g.NumStates(); ++s) {
    if (s != g.start) emit_state(s);
  }
}

void SaveWfst(const Wfst &g, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open wfst file for writing: " + path);
  SerializeWfstText(g, os);
  if (!os) throw IoError("write failure on wfst file: " + path);
}

const std::string &SymbolTable::Name(std::int32_t id) const {
  if (id < 0 || id >= static_cast<std::int32_t>(symbols.size())) {
    throw ValidationError("symbol table: id out of range: " + std::to_string(id));
  }
  return symbols[id];
}

void SymbolTable::Save(const std::string &path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open symbol table for writing: " + path);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    os << symbols[i] << ' ' << i << '\n';
  }
  if (!os) throw IoError("write failure on symbol table: " + path);
}

SymbolTable SymbolTable::Load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open symbol table: " + path);
  SymbolTable table;
  std::string sym;
  long long id;
  while (is >> sym >> id) {
    if (id < 0) throw ValidationError("symbol table: negative id");
    if (static_cast<std::size_t>(id) >= table.symbols.size()) {
      table.symbols.resize(id + 1);
    }
    table.symbols[id] = sym;
  }
  return table;
}

}  // namespace wfst
}  // namespace dynprec
