#include "gdplan/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "gdplan/util/hash.hpp"

namespace gdplan::nn {

namespace {
constexpr const char* kMagic = "gdck1";

static_assert(sizeof(double) == 8, "checkpoint format assumes 8-byte doubles");
}  // namespace

void save_checkpoint(const std::string& path, const ParamRefs& params) {
  nlohmann::ordered_json manifest;
  manifest["version"] = kMagic;
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  for (const ParamRef& p : params) {
    nlohmann::ordered_json t;
    t["name"] = p.name;
    t["shape"] = p.tensor->shape();
    tensors.push_back(std::move(t));
  }
  manifest["tensors"] = std::move(tensors);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open checkpoint for writing: " + path);
  out << kMagic << "\n" << manifest.dump() << "\n";
  for (const ParamRef& p : params) {
    const auto& v = p.tensor->values();
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw ParseError("checkpoint write failed: " + path);
}

void load_checkpoint(const std::string& path, const ParamRefs& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint: " + path);
  std::string magic, manifest_line;
  std::getline(in, magic);
  if (magic != kMagic)
    throw ParseError("checkpoint " + path + ": bad magic '" + magic + "', expected gdck1");
  std::getline(in, manifest_line);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint " + path + ": manifest parse error: " + e.what());
  }

  struct Entry {
    Shape shape;
    std::vector<double> values;
  };
  std::map<std::string, Entry> loaded;
  for (const auto& t : manifest.at("tensors")) {
    Entry e;
    e.shape = t.at("shape").get<Shape>();
    e.values.resize(static_cast<std::size_t>(shape_numel(e.shape)));
    in.read(reinterpret_cast<char*>(e.values.data()),
            static_cast<std::streamsize>(e.values.size() * sizeof(double)));
    if (!in) throw ParseError("checkpoint " + path + ": truncated payload");
    loaded.emplace(t.at("name").get<std::string>(), std::move(e));
  }

  for (const ParamRef& p : params) {
    auto it = loaded.find(p.name);
    if (it == loaded.end())
      throw ParseError("checkpoint " + path + ": missing tensor '" + p.name + "'");
    if (it->second.shape != p.tensor->shape())
      throw ShapeError("checkpoint tensor '" + p.name + "' has shape " +
                       shape_str(it->second.shape) + ", expected " +
                       shape_str(p.tensor->shape()));
    p.tensor->values() = std::move(it->second.values);
    loaded.erase(it);
  }
  if (!loaded.empty())
    throw ParseError("checkpoint " + path + ": unexpected tensor '" + loaded.begin()->first + "'");
}

uint64_t params_hash(const ParamRefs& params) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const ParamRef& p : params) {
    h = fnv1a64(p.name, h);
    for (int d : p.tensor->shape()) h = fnv1a64(&d, sizeof(d), h);
    const auto& v = p.tensor->values();
    h = fnv1a64(v.data(), v.size() * sizeof(double), h);
  }
  return h;
}

}  // namespace gdplan::nn
