#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "janossy/kernels.hpp"
#include "janossy/models.hpp"

namespace janossy {

using Json = nlohmann::json;

/// Version tag written in the first column of every CSV header row.
inline constexpr const char* kKernelSchema = "jk-kernel-1";
inline constexpr const char* kCsvSchema = "jk-csv-1";

/// A number, or [re, im].
Complex complex_from_json(const Json& j);
Json complex_to_json(Complex z);

/// {"kind": "discrete", "points": [...], "masses": [...]} or
/// {"kind": "quadrature", "interval": [a, b], "order": N, "breakpoints": [...]}.
SpaceSpec space_spec_from_json(const Json& j);
Json to_json(const SpaceSpec& spec);

/// {"type": "unitary" | "coupled-chain" | "karlin-mcgregor" | "random" | "explicit", ...}.
/// Unknown types are rejected with the list of known ones.
ChainModelSpec model_spec_from_json(const Json& j);
Json to_json(const ChainModelSpec& spec);

/// "empty", "full", {"intervals": [[a, b], ...]}, {"at_or_above": s},
/// {"nodes": [i, ...]} or {"mask": [0, 1, ...]}.
Window window_from_json(const DiscretizedSpace& space, const Json& j);
/// An array with one window per floor, or a single window used on every floor.
WindowFamily window_family_from_json(const DiscretizedSpace& space, int floors, const Json& j);
Json to_json(const Window& window);
Json to_json(const WindowFamily& windows);

/// Rows (kind, l, x_index, x, m, y_index, y, re, im) with 1-based floors,
/// restricted to window sites when windows are given.
std::string kernel_csv(const BlockKernel& kernel, const std::optional<WindowFamily>& windows = {});

/// {"schema": "jk-kernel-1", kind, floors, nodes, weights, blocks}, one entry
/// per (l, m) block holding "re" and "im" row arrays over all nodes.
Json kernel_json(const BlockKernel& kernel);

/// Shortest round-trip decimal form; identical across runs and thread counts.
std::string format_double(double x);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace janossy
