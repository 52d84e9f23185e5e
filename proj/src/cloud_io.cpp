#include "pclab/cloud_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>

#include "pclab/common.hpp"
#include "pclab/geometry.hpp"

namespace pclab {

namespace fs = std::filesystem;

void write_cloud(const PointCloud& cloud, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  char line[160];
  for (long i = 0; i < cloud.points.rows(); ++i) {
    std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %.9g %.9g %.9g\n",
                  cloud.points(i, 0), cloud.points(i, 1), cloud.points(i, 2),
                  cloud.normals(i, 0), cloud.normals(i, 1), cloud.normals(i, 2));
    out << line;
  }
  if (!out) throw DataError("write failed: " + path.string());
}

LoadedCloud read_cloud(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());

  std::vector<std::array<float, 6>> rows;
  int columns = 0;  // fixed by the first data line
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);

    std::array<float, 6> vals{};
    int got = 0;
    const char* p = line.c_str();
    for (;;) {
      char* end = nullptr;
      const float v = std::strtof(p, &end);
      if (end == p) break;
      if (got == 6)
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": too many columns");
      vals[static_cast<size_t>(got++)] = v;
      p = end;
    }
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (*p != '\0')
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": unparsable token");
    if (got == 0) continue;  // blank or comment-only line
    if (got != 3 && got != 6)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 3 or 6 values, got " + std::to_string(got));
    if (columns == 0) columns = got;
    if (got != columns)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": inconsistent column count");
    for (int c = 0; c < got; ++c)
      if (!std::isfinite(vals[static_cast<size_t>(c)]))
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": non-finite value");
    rows.push_back(vals);
  }

  if (static_cast<long>(rows.size()) < kMinCloudPoints)
    throw DataError(path.string() + ": fewer than " +
                    std::to_string(kMinCloudPoints) + " points");

  LoadedCloud result;
  const long n = static_cast<long>(rows.size());
  result.cloud.points.resize(n, 3);
  for (long i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c)
      result.cloud.points(i, c) = rows[static_cast<size_t>(i)][static_cast<size_t>(c)];

  if (columns == 6) {
    result.cloud.normals.resize(n, 3);
    for (long i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c)
        result.cloud.normals(i, c) =
            rows[static_cast<size_t>(i)][static_cast<size_t>(c + 3)];
  } else {
    result.cloud.normals = estimate_normals(result.cloud.points);
    result.normals_estimated = true;
  }
  result.cloud.validate();
  return result;
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir / "clouds");
  std::ofstream manifest(dir / "manifest.csv");
  if (!manifest) throw DataError("cannot write manifest in " + dir.string());
  manifest << "path,label,split\n";

  std::map<std::string, int> counters;
  auto emit = [&](const std::vector<LabeledCloud>& split, const char* name) {
    for (const auto& s : split) {
      const int idx = counters[s.class_name + name]++;
      const std::string rel = "clouds/" + s.class_name + "_" + name + "_" +
                              std::to_string(idx) + ".xyzn";
      write_cloud(s.cloud, dir / rel);
      manifest << rel << "," << s.class_name << "," << name << "\n";
    }
  };
  emit(ds.train, "train");
  emit(ds.test, "test");
  if (!manifest) throw DataError("manifest write failed in " + dir.string());
}

Dataset load_dataset(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest: " + manifest_path.string());
  const fs::path base = manifest_path.parent_path();

  std::string line;
  if (!std::getline(in, line) ||
      line.find("path,label,split") == std::string::npos)
    throw DataError(manifest_path.string() + ": missing 'path,label,split' header");

  Dataset ds;
  std::map<std::string, int> class_index;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw DataError(manifest_path.string() + ":" + std::to_string(line_no) +
                      ": expected 'path,label,split'");
    const std::string rel = line.substr(0, c1);
    const std::string label = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string split = line.substr(c2 + 1);

    auto [it, inserted] =
        class_index.try_emplace(label, static_cast<int>(ds.classes.size()));
    if (inserted) ds.classes.push_back(label);

    LabeledCloud s;
    s.label = it->second;
    s.class_name = label;
    s.cloud = read_cloud(base / rel).cloud;
    if (split == "train")
      ds.train.push_back(std::move(s));
    else if (split == "test")
      ds.test.push_back(std::move(s));
    else
      throw DataError(manifest_path.string() + ":" + std::to_string(line_no) +
                      ": split must be train or test");
  }
  ds.validate();
  return ds;
}

std::string dataset_hash(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& c : ds.classes) mix(c.data(), c.size() + 1);
  for (const auto& s : ds.train) {
    mix(&s.label, sizeof(s.label));
    mix(s.cloud.points.data(),
        static_cast<size_t>(s.cloud.points.size()) * sizeof(float));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pclab
