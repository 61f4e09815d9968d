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

#include "irschest/visualize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "irschest/errors.hpp"
#include "irschest/tensor.hpp"

namespace irschest {

GrayImage magnitude_image(const CMatrix& x) {
    GrayImage img{x.rows(), x.cols(), std::vector<double>(x.size())};
    for (std::size_t i = 0; i < x.size(); ++i) img.pixels[i] = std::abs(x.data()[i]);
    if (img.pixels.empty()) return img;
    const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double a = *lo, span = *hi - *lo;
    for (double& p : img.pixels) p = span > 0.0 ? std::clamp((p - a) / span, 0.0, 1.0) : 0.0;
    return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    for (double p : img.pixels) out.put(static_cast<char>(static_cast<unsigned char>(std::lround(p * 255.0))));
    if (!out) throw Error("write failed for " + path.string());
}

std::vector<CMatrix> denoising_stages(const CdrnModel& model, const CMatrix& x_ls) {
    if (x_ls.rows() != model.height || x_ls.cols() != model.width)
        throw ShapeError("denoising_stages: input shape does not match the model");
    Tensor4 t = to_real_input(x_ls);
    for (double& v : t.data) v *= model.input_scale;
    const ForwardResult r = cdrn_forward(t, model);
    std::vector<CMatrix> stages;
    for (const Tensor4& s : r.stages) {
        CMatrix m = from_real_output(s);
        m *= 1.0 / model.input_scale;
        stages.push_back(std::move(m));
    }
    return stages;
}

std::vector<GrayImage> visualize_denoising(const CdrnModel& model, const CMatrix& x_ls,
                                           const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());
    std::vector<GrayImage> images;
    const auto stages = denoising_stages(model, x_ls);
    for (std::size_t d = 0; d < stages.size(); ++d) {
        images.push_back(magnitude_image(stages[d]));
        write_pgm(images.back(), out_dir / ("stage_" + std::to_string(d) + ".pgm"));
    }
    return images;
}

}  // namespace irschest
