// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

// Regenerates presets/m1.json, m2.json and m3.json from their recipes.
//
//   gen_model_presets <out_dir>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "recshard/json_io.h"
#include "recshard/model.h"

int main(int argc, char** argv) {
  if (argc != 2 || argv[1][0] == '-') {
    std::cerr << "usage: gen_model_presets <out_dir>\n";
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  for (const auto& recipe : recshard::ProductionRecipes()) {
    recshard::Json j = {{"name", recipe.name}};
    j.update(recshard::ModelToJson(recshard::BuildProductionModel(recipe)));
    std::string file = recipe.name + ".json";
    for (char& c : file) c = static_cast<char>(std::tolower(c));
    std::ofstream out(dir / file, std::ios::binary);
    out << recshard::DumpJson(j);
    if (!out) {
      std::cerr << "failed writing " << (dir / file) << "\n";
      return 3;
    }
  }
  return 0;
}
