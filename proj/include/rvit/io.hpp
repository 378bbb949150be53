#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rvit/image.hpp"

namespace rvit {

// 8-bit or 16-bit PNG, gray/gray+alpha/RGB/RGBA -> [0,1] doubles (alpha dropped)
ImageBuffer read_png(const std::string& path);

// c == 1 writes 8-bit grayscale, c == 3 writes 8-bit RGB; values clamped to [0,1]
void write_png(const std::string& path, const ImageBuffer& img);

// c == 1, 16-bit grayscale; values clamped to [0,1] and scaled by 65535
void write_png16(const std::string& path, const ImageBuffer& img);

struct NpyArray {
  std::vector<int64_t> shape;
  std::vector<double> data;  // converted to double regardless of stored dtype

  int64_t numel() const {
    int64_t n = 1;
    for (int64_t d : shape) n *= d;
    return n;
  }
};

// NPY v1.0, little-endian; writer emits <f8, reader accepts <f8 <f4 <u2 |u1 <i8
void write_npy(const std::string& path, const NpyArray& arr);
NpyArray read_npy(const std::string& path);

// In-memory forms used by the checkpoint container.
std::vector<uint8_t> npy_encode(const NpyArray& arr);
NpyArray npy_decode(const std::vector<uint8_t>& bytes);

struct NamedTensor {
  std::string name;
  NpyArray array;
};

// Checkpoint archive: a stored (uncompressed) zip of NPY members plus a
// manifest.json entry listing names/shapes in serialization order. Fixed
// timestamps keep the bytes deterministic.
void save_checkpoint(const std::string& path,
                     const std::vector<NamedTensor>& tensors,
                     const std::string& config_json);
std::pair<std::vector<NamedTensor>, std::string> load_checkpoint(
    const std::string& path);

}  // namespace rvit
