#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tvpdr/model.hpp"

namespace tvpdr {

/// UTF-8 `key=value` lines, written in key order.
using Manifest = std::map<std::string, std::string>;

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

/// Flat little-endian float64 arrays.
void write_f64(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f64(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

inline constexpr const char* kFormatVersion = "1";

/// Writes a posterior directory:
///   manifest, grid.tsv, design.f64 (T x d transformed design),
///   beta_<j>.f64 (kept x T x d) and sigma2_<j>.f64 (kept x d) for j = 1..K,
/// plus any `extra_files` (name -> contents). The manifest receives `entries`,
/// shape metadata, and a sha256 for every file.
void write_posterior_dir(const std::filesystem::path& dir, const PosteriorDraws& draws,
                         Manifest entries,
                         const std::map<std::string, std::string>& extra_files = {});

struct PosteriorDirectory {
  PosteriorDraws draws;
  Manifest manifest;
};

/// Reads and verifies a posterior directory; any file whose hash differs from
/// the manifest raises IntegrityError.
PosteriorDirectory read_posterior_dir(const std::filesystem::path& dir);

/// Re-checks every `file.<name>` hash recorded in the manifest.
void verify_posterior_dir(const std::filesystem::path& dir, const Manifest& manifest);

}  // namespace tvpdr
