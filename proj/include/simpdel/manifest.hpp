#pragma once

// Run manifests: every CLI output file gets a sibling <out>.manifest.json
// recording the subcommand, resolved flags, content digests of the inputs,
// and the seed. Identical manifests imply bit-identical outputs.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "simpdel/error.hpp"
#include "simpdel/version.hpp"

namespace simpdel {

inline uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("digest: cannot open ", path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> flags;    // resolved flag values
  std::map<std::string, std::string> inputs;   // path -> content digest
  std::vector<std::string> outputs;
  uint64_t seed = 0;

  void add_input(const std::string& path) { inputs[path] = file_digest(path); }

  nlohmann::json to_json() const {
    return {{"subcommand", subcommand}, {"flags", flags},  {"inputs", inputs},
            {"outputs", outputs},       {"seed", seed},    {"version", kVersion}};
  }

  // One manifest copy next to each output file.
  void write() const {
    const std::string body = to_json().dump(2) + "\n";
    for (const auto& out_path : outputs) {
      std::ofstream out(out_path + ".manifest.json");
      if (!out) fail_io("manifest: cannot write ", out_path, ".manifest.json");
      out << body;
    }
  }
};

}  // namespace simpdel
