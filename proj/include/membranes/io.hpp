#pragma once

#include <string>
#include <utility>

#include "membranes/grid.hpp"

namespace membranes {

/// Writes the stack as a flat CSV (x, y, class, u_1..u_N) with
/// 17-significant-digit decimals, one row per grid node.
void write_stack_csv(const std::string &path, const MembraneStack &stack);

/// Writes the companion JSON header (n, R, h, N, shape, forcing constants,
/// theta).
void write_stack_header(const std::string &path, const MembraneStack &stack,
                        const Forcing &forcing);

/// Rebuilds (stack, forcing) from header + CSV; the grid is reconstructed
/// from (n, R, shape) and checked against the CSV class column.
std::pair<MembraneStack, Forcing> read_stack(const std::string &header_path,
                                             const std::string &csv_path);

}  // namespace membranes
