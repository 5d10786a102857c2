#pragma once

#include <filesystem>
#include <optional>

#include "sdgcl/encoder.hpp"

namespace sdgcl {

/// Text checkpoint: a versioned header, the model dimensions, then one
/// "tensor <name> <size>" line followed by its values (shortest round-trip form).
void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params);

/// Throws InputError on a malformed file or, when given, a dimension mismatch.
EncoderParams load_checkpoint(const std::filesystem::path& path,
                              const std::optional<ModelDims>& expected = std::nullopt);

}  // namespace sdgcl
