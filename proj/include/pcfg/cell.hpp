#pragma once

#include <bit>
#include <cstdint>

namespace pcfg {

/// One stack word. Floats, integers, booleans, block indices and relative
/// addresses all fit in a cell; larger values take contiguous runs.
using Cell = std::uint64_t;

inline Cell from_int(std::int64_t v) { return std::bit_cast<Cell>(v); }
inline Cell from_float(double v) { return std::bit_cast<Cell>(v); }
inline Cell from_bool(bool v) { return v ? 1 : 0; }
inline std::int64_t as_int(Cell c) { return std::bit_cast<std::int64_t>(c); }
inline double as_float(Cell c) { return std::bit_cast<double>(c); }
inline bool as_bool(Cell c) { return c != 0; }

}  // namespace pcfg
