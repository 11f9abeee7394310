// Copyright 2026 The advpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "advpriv/errors.hpp"

namespace advpriv::detail {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'A', 'D', 'V', 'P', 'R', 'I', 'V', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    T value;
    std::memcpy(&value, take(sizeof(T)).data(), sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError("checkpoint is truncated");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string pack_container(std::string_view format, nlohmann::json meta,
                           const std::vector<NamedArray>& arrays) {
  meta["format"] = format;
  auto& index = meta["arrays"] = nlohmann::json::array();
  for (const auto& a : arrays) {
    index.push_back({{"name", a.name}, {"rows", a.shape.rows},
                     {"cols", a.shape.cols}});
  }
  const std::string header = meta.dump();

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, header.size());
  out += header;
  for (const auto& a : arrays) {
    out.append(reinterpret_cast<const char*>(a.data.data()),
               a.data.size() * sizeof(double));
  }
  return out;
}

const NamedArray& Unpacked::find(std::string_view name, Shape shape) const {
  for (const auto& a : arrays) {
    if (a.name != name) continue;
    if (a.shape.rows != shape.rows || a.shape.cols != shape.cols) {
      throw ParseError("checkpoint array " + a.name + " has shape " +
                       to_string(a.shape) + ", expected " + to_string(shape));
    }
    return a;
  }
  throw ParseError("checkpoint has no array named " + std::string(name));
}

Unpacked unpack_container(std::string_view bytes, std::string_view format) {
  Reader in(bytes);
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(in.take(sizeof(kMagic)).data(), kMagic, sizeof(kMagic)) !=
          0) {
    throw ParseError("not an advpriv checkpoint");
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kVersion) {
    throw ParseError("unsupported checkpoint version " +
                     std::to_string(version));
  }
  const auto header_size = in.get<std::uint64_t>();
  Unpacked out;
  try {
    out.meta = nlohmann::json::parse(in.take(header_size));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint metadata: ") + e.what());
  }
  if (out.meta.value("format", "") != format) {
    throw ParseError("checkpoint format is not " + std::string(format));
  }
  try {
    for (const auto& entry : out.meta.at("arrays")) {
      NamedArray a;
      a.name = entry.at("name").get<std::string>();
      a.shape = Shape{entry.at("rows").get<int>(), entry.at("cols").get<int>()};
      if (a.shape.rows <= 0 || a.shape.cols <= 0) {
        throw ParseError("checkpoint array " + a.name + " has a bad shape");
      }
      a.data.resize(a.shape.size());
      const auto raw = in.take(a.data.size() * sizeof(double));
      std::memcpy(a.data.data(), raw.data(), raw.size());
      out.arrays.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint metadata: ") + e.what());
  }
  if (!in.done()) throw ParseError("checkpoint has trailing bytes");
  return out;
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void store(std::vector<NamedArray>& out, const Parameter& p) {
  out.push_back({p.name, p.shape(), p.value.data});
}

void restore(const Unpacked& in, Parameter& p) {
  p.value.data = in.find(p.name, p.shape()).data;
  p.zero_grad();
}

}  // namespace advpriv::detail
