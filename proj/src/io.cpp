#include "strips/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace strips {

std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  for (size_t i = 0; i < table.header.size(); ++i)
    os << (i ? "," : "") << table.header[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_g12(row[i]);
    os << "\n";
  }
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string content_hash(const std::map<std::string, std::string>& params) {
  std::string canon;
  for (const auto& [k, v] : params) canon += k + "=" + v + ";";
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::map<std::string, std::string>& params,
                    const std::map<std::string, std::string>& extra) {
  nlohmann::json j;
  j["command"] = command;
  j["parameters"] = params;
  for (const auto& [k, v] : extra) j["run"][k] = v;
  j["config_hash"] = content_hash(params);
  std::ofstream os(dir / "manifest.json");
  if (!os) throw std::runtime_error("cannot open manifest in " + dir.string());
  os << j.dump(2) << "\n";
}

}  // namespace strips
