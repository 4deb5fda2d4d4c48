// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_PRESETS_H_
#define RECSHARD_PRESETS_H_

#include <string>
#include <string_view>
#include <vector>

namespace recshard {

// Files under presets/, compiled into the library. Names are file names such
// as "m1.json".
std::vector<std::string> EmbeddedPresetFiles();

// Throws ConfigError for an unknown file.
std::string_view EmbeddedPreset(std::string_view file);

}  // namespace recshard

#endif  // RECSHARD_PRESETS_H_
