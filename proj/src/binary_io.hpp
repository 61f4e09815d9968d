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

// Little-endian readers and writers for the model and dataset files.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "irschest/errors.hpp"

namespace irschest::detail {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class ByteWriter {
public:
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes_.insert(bytes_.end(), b, b + n);
    }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void f32(float v) { raw(&v, sizeof v); }
    void f32_array(std::span<const double> v) {
        for (double x : v) f32(static_cast<float>(x));
    }
    void string(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    std::vector<std::uint8_t>& bytes() { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void raw(void* p, std::size_t n, const char* what) {
        if (bytes_.size() - pos_ < n) throw FormatError(std::string("truncated file while reading ") + what, pos_);
        std::memcpy(p, bytes_.data() + pos_, n);
        pos_ += n;
    }
    std::uint32_t u32(const char* what) {
        std::uint32_t v;
        raw(&v, sizeof v, what);
        return v;
    }
    std::uint64_t u64(const char* what) {
        std::uint64_t v;
        raw(&v, sizeof v, what);
        return v;
    }
    double f64(const char* what) {
        double v;
        raw(&v, sizeof v, what);
        return v;
    }
    void f32_array(std::span<double> out, const char* what) {
        if ((bytes_.size() - pos_) / sizeof(float) < out.size())
            throw FormatError(std::string("truncated file while reading ") + what, pos_);
        for (double& x : out) {
            float f;
            raw(&f, sizeof f, what);
            x = f;
        }
    }
    std::string string(const char* what) {
        const std::uint32_t n = u32(what);
        if (bytes_.size() - pos_ < n) throw FormatError(std::string("truncated file while reading ") + what, pos_);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void expect_magic(const char (&magic)[5]) {
        char m[4];
        raw(m, 4, "magic");
        if (std::memcmp(m, magic, 4) != 0) throw FormatError(std::string("bad magic, expected ") + magic, 0);
    }
    void expect_end() const {
        if (pos_ != bytes_.size()) throw FormatError("trailing bytes after payload", pos_);
    }
    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace irschest::detail
