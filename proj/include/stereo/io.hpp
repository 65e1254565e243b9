#pragma once

#include <string>
#include <string_view>

#include "stereo/disparity_map.hpp"
#include "stereo/image.hpp"

namespace stereo {

// Binary netpbm (P5/P6, maxval 255) and PFM ("Pf", single channel).

GrayImage decode_pgm(std::string_view bytes);
RgbImage decode_ppm(std::string_view bytes);
/// Rows are returned top-to-bottom; the sign of the scale selects endianness.
FloatImage decode_pfm(std::string_view bytes);

std::string encode_pgm(const GrayImage& img);
std::string encode_ppm(const RgbImage& img);
/// Little-endian (negative scale), rows written bottom-to-top.
std::string encode_pfm(const FloatImage& img);

GrayImage load_pgm(const std::string& path);
RgbImage load_ppm(const std::string& path);
FloatImage load_pfm(const std::string& path);

void save_pgm(const GrayImage& img, const std::string& path);
void save_ppm(const RgbImage& img, const std::string& path);
void save_pfm(const FloatImage& img, const std::string& path);

/// Disparity as PFM with invalid pixels written as -1.
void save_disparity_pfm(const DisparityMap& map, const std::string& path);
/// Reads a disparity PFM; negative and non-finite values become invalid.
DisparityMap load_disparity_pfm(const std::string& path, int d_min, int d_max);
/// 8-bit visualization (255 / d_max scale, invalid = 0).
void save_disparity_pgm(const DisparityMap& map, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace stereo
