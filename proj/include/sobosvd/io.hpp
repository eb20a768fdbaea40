#pragma once

#include <filesystem>
#include <string_view>

#include "sobosvd/discretization.hpp"
#include "sobosvd/tensor.hpp"

namespace sobosvd {

// Raw little-endian float64 samples, first index fastest, with a sidecar
// "<path>.meta.json" holding {"shape": [...], "lower": [...], "upper": [...]}.
GridFunction load_samples(const std::filesystem::path& path);

// Without a sidecar the axes default to [0,1]; with one, its shape must agree.
GridFunction load_samples(const std::filesystem::path& path, const Shape& shape);

void save_samples(const std::filesystem::path& path, const GridFunction& f);

std::filesystem::path meta_path(const std::filesystem::path& path);

// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace sobosvd
