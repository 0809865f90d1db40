#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "gaic/model.hpp"

namespace gaic::nn {

inline constexpr char kCheckpointMagic[] = "GAIC-CKPT v1";

// Parameter blob: a text header of "<name> <ndim> <extents...>" lines
// followed by a DATA marker and raw little-endian 32-bit floats in header
// order. Byte-exact round-trip.
void save_parameters(std::ostream& out, std::span<const TensorPtr> params,
                     std::span<const std::string> names);
void load_parameters(std::istream& in, std::span<const TensorPtr> params,
                     std::span<const std::string> names,
                     const std::string& source_name);

// Model checkpoint: the magic line, a text config block (architecture plus
// MOS normalization constants), then the parameter blob.
void save_checkpoint(std::ostream& out, const CropScorer& model);
void save_checkpoint(const std::string& path, const CropScorer& model);
CropScorer load_checkpoint(std::istream& in, const std::string& source_name);
CropScorer load_checkpoint(const std::string& path);

}  // namespace gaic::nn
