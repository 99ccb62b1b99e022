#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pcfg/program.hpp"
#include "pcfg/stmtir.hpp"

namespace pcfg {

/// Type of every variable bound in a function: parameters, let binders and
/// pattern variables.
std::map<std::string, TypePtr> variable_types(const Function& f);

struct DefUse {
  std::map<std::string, std::uint32_t> def_block;
  std::map<std::string, std::set<std::uint32_t>> use_blocks;
};

/// Definitions and uses of the function's own variables, per block. A call
/// or checkpoint destination counts as defined in the block that ends with
/// it.
DefUse def_use(const Decomposition& d, const LoweredFunction& f, const std::set<std::string>& params);

/// Locals defined in one block and used in another. Parameters are not
/// included (they always live in the frame).
std::set<std::string> cross_block_locals(const Decomposition& d, const LoweredFunction& f,
                                         const std::set<std::string>& params);

struct FrameSlot {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct FrameLayout {
  std::string function;
  std::size_t ra_slot = 0;
  std::size_t ret_val_loc_slot = 1;
  std::vector<FrameSlot> params;
  std::vector<FrameSlot> locals;
  std::optional<FrameSlot> scratch;  // destination of discarded call results
  std::size_t frame_size = 2;

  const FrameSlot* find(const std::string& name) const;
};

/// [ra, retValLoc, params..., cross-block locals in binding order...] followed by a scratch
/// area when some call result is discarded. Zero-size values take no slot.
FrameLayout compute_layout(const Function& f, const Decomposition& d, const LoweredFunction& lowered,
                           const DataEnv& data);

/// Destinations of calls whose result is never read.
std::set<std::uint32_t> discarded_calls(const LoweredFunction& f, const DefUse& du);

std::string dump_layout(const FrameLayout& layout);

}  // namespace pcfg
