#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semlens/tensor.hpp"

namespace semlens {

// 8-bit RGB PNG; values clamped to [0,1] on write.
void write_rgb_png(const std::string& path, const Tensor& rgb);
Tensor read_rgb_png(const std::string& path);

// 16-bit grayscale PNG, used for superpixel label maps.
void write_gray16_png(const std::string& path, const std::vector<std::uint16_t>& data, int h, int w);
std::vector<std::uint16_t> read_gray16_png(const std::string& path, int& h, int& w);

// Nearest-neighbor resize of a C x H x W tensor.
Tensor resize_nearest(const Tensor& src, int out_h, int out_w);

}  // namespace semlens
