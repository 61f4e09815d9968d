// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "irschest/cdrn.hpp"
#include "irschest/linalg.hpp"

namespace irschest {

/// Row-major grayscale image with pixel values in [0, 1].
struct GrayImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels;
};

/// Entry magnitudes of x, min-max normalized; a constant matrix maps to all zeros.
GrayImage magnitude_image(const CMatrix& x);

/// Writes an 8-bit binary portable graymap.
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// The input A_0 and every block output A_1..A_D, in the unscaled channel domain.
std::vector<CMatrix> denoising_stages(const CdrnModel& model, const CMatrix& x_ls);

/// Writes stage_0.pgm .. stage_D.pgm into out_dir (created if needed) and returns the images.
std::vector<GrayImage> visualize_denoising(const CdrnModel& model, const CMatrix& x_ls,
                                           const std::filesystem::path& out_dir);

}  // namespace irschest
