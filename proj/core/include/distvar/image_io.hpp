#pragma once

#include <string>
#include <vector>

#include "distvar/field.hpp"

namespace distvar {

/// Decoded image: one (grayscale) or three (RGB) planes in [0,1].
struct Image {
    std::vector<ScalarField> planes;

    bool rgb() const { return planes.size() == 3; }
    int width() const { return planes.empty() ? 0 : planes[0].width; }
    int height() const { return planes.empty() ? 0 : planes[0].height; }
};

/// Rec.601 luminance; grayscale images pass through.
ScalarField luminance(const Image& img);

/// Reads 8/16-bit grayscale or RGB PNG, or binary PGM (P5). Palette images
/// expand to RGB; alpha channels are stripped. Samples are scaled into [0,1].
Image read_image(const std::string& path);

/// Writes 16-bit PNG: one plane -> grayscale, three -> RGB. Values are
/// clamped to [0,1] and scaled to the full 16-bit range.
void write_image_png16(const Image& img, const std::string& path);
void write_image_png16(const ScalarField& field, const std::string& path);

/// Reads a depth map in meters. PFM (grayscale "Pf") is used as stored;
/// integer formats are scaled by depth_scale (meters per unit step of the
/// normalized [0,1] sample times the format's max value).
ScalarField read_depth(const std::string& path, double depth_scale, double pixel_pitch);

/// Writes a grayscale PFM (little-endian).
void write_pfm(const ScalarField& field, const std::string& path);

bool has_suffix(const std::string& path, const std::string& suffix);

}  // namespace distvar
