#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace strips {

// CSV with a header row, 12 significant digits per value.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string format_g12(double v);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// FNV-1a 64-bit of the canonical parameter serialization; recorded in the
// run manifest so outputs are traceable to their exact configuration.
std::uint64_t fnv1a64(const std::string& data);
std::string content_hash(const std::map<std::string, std::string>& params);

// manifest.json: every parameter, mesh sizes, solver tolerances, hash.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::map<std::string, std::string>& params,
                    const std::map<std::string, std::string>& extra = {});

}  // namespace strips
