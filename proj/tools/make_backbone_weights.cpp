// Copyright 2026 The IrisStyle Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Writes a deterministic randomly-initialized backbone parameter file. For
// converting actual pre-trained weights, see scripts/export_vgg19.py.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "iristyle/backbone/weights.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a deterministic He-initialized backbone weights file"};
  std::string out = "backbone.isbw";
  std::string topology = "vgg19";
  std::uint64_t seed = 42;
  app.add_option("--out", out, "Output path")->capture_default_str();
  app.add_option("--topology", topology, "vgg19 or smallgaze")
      ->check(CLI::IsMember({"vgg19", "smallgaze"}))
      ->capture_default_str();
  app.add_option("--seed", seed, "Seed for the parameter stream")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto defs =
        topology == "vgg19" ? iristyle::vgg19_topology() : iristyle::small_gaze_topology();
    const auto weights = iristyle::make_random_weights(defs, seed);
    weights.save(out);
    std::printf("wrote %s (checksum %s)\n", out.c_str(), weights.checksum().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
