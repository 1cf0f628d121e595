#pragma once

#include <string>

#include "model.hpp"

namespace pressflow {

// Versioned JSON checkpoint. The writer is canonical (fixed key order, fixed
// number formatting with 17 significant digits), so save -> load -> save is
// byte-identical. load validates shapes, finiteness, the schema version, and
// the fingerprint format, and throws DataError mentioning "corrupt
// checkpoint" for anything mangled or truncated.
std::string checkpoint_to_string(const ModelCheckpoint& ckpt);
void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

} // namespace pressflow
