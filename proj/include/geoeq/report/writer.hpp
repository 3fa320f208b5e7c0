#pragma once

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "geoeq/errors.hpp"
#include "geoeq/report/commands.hpp"
#include "geoeq/report/svg.hpp"
#include "geoeq/report/table.hpp"

namespace geoeq::report {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), std::strerror(errno));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError(path.string(), "write failed");
}

/// Writes each requested format into `dir` (created if missing) and returns
/// the paths written, in order. Tables become <name>.csv, the JSON document
/// <stem>.json and the plot <stem>.svg.
inline std::vector<std::filesystem::path> write_artifacts(const Artifacts& a,
                                                          const std::filesystem::path& dir,
                                                          const std::vector<std::string>& formats) {
  auto wants = [&](const char* f) {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());

  std::vector<std::filesystem::path> written;
  if (wants("csv")) {
    for (const auto& t : a.tables) {
      written.push_back(dir / (t.name + ".csv"));
      write_text(written.back(), to_csv(t));
    }
  }
  if (wants("json")) {
    written.push_back(dir / (a.stem + ".json"));
    write_text(written.back(), a.json.dump(2) + "\n");
  }
  if (wants("svg") && a.plot) {
    written.push_back(dir / (a.stem + ".svg"));
    write_text(written.back(), render_svg(*a.plot));
  }
  return written;
}

}  // namespace geoeq::report
