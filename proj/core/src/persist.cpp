#include "tvpdr/persist.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "tvpdr/error.hpp"
#include "tvpdr/format.hpp"

namespace tvpdr {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw std::runtime_error("sha256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

void write_manifest(const fs::path& path, const Manifest& manifest) {
  std::string text;
  for (const auto& [k, v] : manifest) {
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos ||
        v.find('\n') != std::string::npos) {
      throw std::invalid_argument("manifest entry '" + k + "' cannot be serialized");
    }
    text += k + "=" + v + "\n";
  }
  write_text(path, text);
}

Manifest read_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw IntegrityError("missing manifest " + path.string());
  std::istringstream in(read_text(path));
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IntegrityError("malformed manifest line: " + line);
    m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

void write_f64(const fs::path& path, std::span<const double> values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
  }
  write_text(path, bytes);
}

std::vector<double> read_f64(const fs::path& path) {
  const std::string bytes = read_text(path);
  if (bytes.size() % 8 != 0) throw IntegrityError(path.string() + " is not a float64 array");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= std::uint64_t(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

namespace {

std::string grid_tsv(const ThresholdGrid& grid) {
  std::string text = "j\ty\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    text += std::to_string(j + 1) + "\t" + format_number(grid[j]) + "\n";
  }
  return text;
}

ThresholdGrid parse_grid_tsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<double> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, '\t');
    if (cells.size() != 2) throw IntegrityError("grid.tsv: malformed line " + line);
    points.push_back(parse_number(cells[1]));
  }
  return ThresholdGrid::from_points(std::move(points));
}

std::size_t to_size(const Manifest& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw IntegrityError("manifest lacks '" + key + "'");
  return static_cast<std::size_t>(std::stoull(it->second));
}

}  // namespace

void write_posterior_dir(const fs::path& dir, const PosteriorDraws& draws, Manifest entries,
                         const std::map<std::string, std::string>& extra_files) {
  fs::create_directories(dir);
  std::map<std::string, fs::path> files;
  auto record = [&](const std::string& name) {
    files[name] = dir / name;
  };

  write_text(dir / "grid.tsv", grid_tsv(draws.grid));
  record("grid.tsv");
  write_f64(dir / "design.f64", draws.design);
  record("design.f64");
  for (std::size_t j = 0; j < draws.thresholds(); ++j) {
    const std::string b = "beta_" + std::to_string(j + 1) + ".f64";
    const std::string s = "sigma2_" + std::to_string(j + 1) + ".f64";
    write_f64(dir / b, draws.beta[j]);
    write_f64(dir / s, draws.sigma2[j]);
    record(b);
    record(s);
  }
  for (const auto& [name, contents] : extra_files) {
    write_text(dir / name, contents);
    record(name);
  }

  entries["format_version"] = kFormatVersion;
  entries["kept"] = std::to_string(draws.kept);
  entries["periods"] = std::to_string(draws.periods);
  entries["coefficients"] = std::to_string(draws.coefficients);
  entries["thresholds"] = std::to_string(draws.thresholds());
  entries["transform"] = draws.transform.name();
  entries["monotone"] = draws.monotone ? "on" : "off";
  entries["seed"] = std::to_string(draws.seed);
  entries["layout"] = "iteration-major,time-major,coefficient-minor;little-endian float64";
  for (const auto& [name, path] : files) entries["file." + name] = sha256_file(path);
  write_manifest(dir / "manifest", entries);
}

void verify_posterior_dir(const fs::path& dir, const Manifest& manifest) {
  for (const auto& [key, hash] : manifest) {
    if (key.rfind("file.", 0) != 0) continue;
    const std::string name = key.substr(5);
    const fs::path path = dir / name;
    if (!fs::exists(path)) throw IntegrityError("estimate directory is missing " + name);
    if (sha256_file(path) != hash) {
      throw IntegrityError("hash mismatch for " + name +
                           ": the estimate directory was modified after it was written");
    }
  }
}

PosteriorDirectory read_posterior_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IntegrityError("estimate directory " + dir.string() + " not found");
  PosteriorDirectory out;
  out.manifest = read_manifest(dir / "manifest");
  const Manifest& m = out.manifest;
  if (m.count("format_version") == 0 || m.at("format_version") != kFormatVersion) {
    throw IntegrityError("unsupported estimate directory format");
  }
  verify_posterior_dir(dir, m);

  PosteriorDraws& d = out.draws;
  d.kept = to_size(m, "kept");
  d.periods = to_size(m, "periods");
  d.coefficients = to_size(m, "coefficients");
  const std::size_t kcount = to_size(m, "thresholds");
  d.transform = DesignTransform::parse(m.at("transform"));
  d.monotone = m.at("monotone") == "on";
  d.seed = std::stoull(m.at("seed"));
  d.grid = parse_grid_tsv(read_text(dir / "grid.tsv"));
  if (d.grid.size() != kcount) throw IntegrityError("grid.tsv does not match the manifest");
  d.design = read_f64(dir / "design.f64");
  if (d.design.size() != d.periods * d.coefficients) {
    throw IntegrityError("design.f64 has the wrong size");
  }
  for (std::size_t j = 0; j < kcount; ++j) {
    auto b = read_f64(dir / ("beta_" + std::to_string(j + 1) + ".f64"));
    auto s = read_f64(dir / ("sigma2_" + std::to_string(j + 1) + ".f64"));
    if (b.size() != d.kept * d.periods * d.coefficients || s.size() != d.kept * d.coefficients) {
      throw IntegrityError("draw files for threshold " + std::to_string(j + 1) + " have the wrong size");
    }
    d.beta.push_back(std::move(b));
    d.sigma2.push_back(std::move(s));
  }
  return out;
}

}  // namespace tvpdr
