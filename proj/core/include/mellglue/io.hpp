#pragma once

#include <string>

#include "mellglue/net.hpp"
#include "mellglue/sched.hpp"

namespace mellglue {

// JSON net document:
//   formulas: interned formula strings
//   cells: [{id, kind, inputs: [flagid], outputs: [flagid]}]
//   flags: [{id, type: formula index, pair: flagid|null}]   (pair null = tail)
//   conclusion_order: [flagid]
//   components: [{box_tree: {vertices, edges: [{child, parent}], root},
//                 box_map: {cells: {cellid: vertex}, flags: {flagid: door}}}]
// The flag half of the box map is derived data; it is emitted for
// inspection and checked, not required, on input.
std::string encode_net(const QuasiProofStructure& q);
// `check` false skips the semantic validation pass (the validate
// subcommand reports it separately).
QuasiProofStructure decode_net(const std::string& json_text, bool check = true);

// A set of nets: {"type": "...", "nets": [net, ...]}; the type may be
// omitted when the set is nonempty.
std::string encode_net_set(const NetSet& s);
NetSet decode_net_set(const std::string& json_text);

struct DotOptions {
  bool show_boxes = true;
  bool show_box_tree = false;
};
std::string to_dot(const QuasiProofStructure& q, const DotOptions& opt = {});

}  // namespace mellglue
