// wfst/wfst.h

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

// Decoding graph over the tropical semiring. Text format, one record per
// line, `#` comments:
//   src dst ilabel olabel cost     (arc; ilabel/olabel 0 means epsilon)
//   state final_cost               (final state)
// The state on the first record is the start state.

#ifndef DYNPREC_WFST_WFST_H_
#define DYNPREC_WFST_WFST_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace dynprec {
namespace wfst {

inline constexpr std::int32_t kEpsilon = 0;
inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

struct Arc {
  std::int32_t dst = 0;
  std::int32_t ilabel = kEpsilon;  // senone id, 1-based; 0 = epsilon
  std::int32_t olabel = kEpsilon;  // word id, 1-based; 0 = epsilon
  double cost = 0.0;               // negative log probability, >= 0
};

struct Wfst {
  std::int32_t start = -1;
  std::vector<std::vector<Arc>> arcs;  // indexed by source state
  std::vector<double> final_cost;      // kInfCost where not final
  std::int32_t max_ilabel = 0;         // senone alphabet size

  std::int32_t NumStates() const { return static_cast<std::int32_t>(arcs.size()); }
  bool IsFinal(std::int32_t s) const { return final_cost[s] < kInfCost; }

  // Rejects dangling (non-final, arc-less) states, negative or non-finite
  // costs, a missing start, and graphs with no final state reachable from
  // the start.
  void Validate() const;
};

// Parse errors carry the offending line number; validation errors name the
// violated invariant.
Wfst ParseWfstText(std::istream &is);
Wfst ParseWfstText(const std::string &text);
Wfst LoadWfst(const std::string &path);

void SerializeWfstText(const Wfst &g, std::ostream &os);
void SaveWfst(const Wfst &g, const std::string &path);

// Word symbol sidecar, one `symbol id` per line; id 0 is reserved for
// epsilon.
struct SymbolTable {
  std::vector<std::string> symbols;  // indexed by id

  const std::string &Name(std::int32_t id) const;
  void Save(const std::string &path) const;
  static SymbolTable Load(const std::string &path);
};

}  // namespace wfst
}  // namespace dynprec

#endif  // DYNPREC_WFST_WFST_H_
