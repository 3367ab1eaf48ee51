#include "flicker/video/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "flicker/binary_io.hpp"
#include "flicker/error.hpp"

namespace flicker {

void ByteWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ByteReader ByteReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ByteReader(std::move(bytes));
}

void ByteReader::expect_magic(std::string_view tag) {
  require(tag.size());
  for (std::size_t i = 0; i < tag.size(); ++i) {
    if (bytes_[pos_ + i] != static_cast<std::uint8_t>(tag[i]))
      throw FormatError("bad magic, expected \"" + std::string(tag) + "\"", pos_);
  }
  pos_ += tag.size();
}

void ByteReader::require(std::size_t count) const {
  if (bytes_.size() - pos_ < count)
    throw FormatError("truncated: need " + std::to_string(count) + " bytes, have " +
                          std::to_string(bytes_.size() - pos_),
                      pos_);
}

void ByteReader::expect_end() const {
  if (pos_ != bytes_.size())
    throw FormatError(std::to_string(bytes_.size() - pos_) + " unexpected trailing bytes", pos_);
}

std::uint64_t ByteReader::get(int n) {
  require(static_cast<std::size_t>(n));
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  pos_ += static_cast<std::size_t>(n);
  return v;
}

}  // namespace flicker

namespace flicker::video {
namespace {

void write_header(ByteWriter& w, std::string_view magic, std::uint32_t version, const Dims& d) {
  w.magic(magic);
  w.u32(version);
  w.u32(static_cast<std::uint32_t>(d.frames));
  w.u32(static_cast<std::uint32_t>(d.height));
  w.u32(static_cast<std::uint32_t>(d.width));
  w.u32(static_cast<std::uint32_t>(d.channels));
  w.f64(d.v_min);
  w.f64(d.v_max);
}

Dims read_header(ByteReader& r, std::string_view magic, std::uint32_t version) {
  r.expect_magic(magic);
  const std::size_t version_at = r.offset();
  if (const auto v = r.u32(); v != version)
    throw FormatError("unsupported version " + std::to_string(v), version_at);
  Dims d;
  d.frames = r.u32();
  d.height = r.u32();
  d.width = r.u32();
  d.channels = r.u32();
  d.v_min = r.f64();
  d.v_max = r.f64();
  d.validate();
  return d;
}

std::vector<double> read_floats(ByteReader& r, std::size_t count) {
  r.require(count * 4);
  std::vector<double> out(count);
  for (double& v : out) v = static_cast<double>(r.f32());
  r.expect_end();
  return out;
}

}  // namespace

void save_video(const std::filesystem::path& path, const VideoTensor& v) {
  ByteWriter w;
  write_header(w, "FLKV", kVideoFormatVersion, v.dims());
  for (double x : v.data()) w.f32(static_cast<float>(x));
  w.write_file(path);
}

VideoTensor load_video(const std::filesystem::path& path) {
  ByteReader r = ByteReader::from_file(path);
  const Dims d = read_header(r, "FLKV", kVideoFormatVersion);
  return VideoTensor(d, read_floats(r, d.volume()));
}

std::filesystem::path sidecar_path(const std::filesystem::path& perturbation_path) {
  auto p = perturbation_path;
  p += ".txt";
  return p;
}

void save_perturbation(const std::filesystem::path& path, const Perturbation& p) {
  ByteWriter w;
  write_header(w, "FLKP", kPerturbationFormatVersion, p.dims());
  for (double x : p.trace()) w.f32(static_cast<float>(x));
  w.write_file(path);

  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) throw std::runtime_error("cannot write sidecar for " + path.string());
  char line[96];
  for (std::size_t t = 0; t < p.frames(); ++t) {
    std::snprintf(line, sizeof line, "%.9g %.9g %.9g\n", static_cast<double>(static_cast<float>(p(t, 0))),
                  static_cast<double>(static_cast<float>(p(t, 1))),
                  static_cast<double>(static_cast<float>(p(t, 2))));
    side << line;
  }
}

Perturbation load_perturbation(const std::filesystem::path& path) {
  ByteReader r = ByteReader::from_file(path);
  const std::size_t dims_at = r.offset() + 8;
  const Dims d = read_header(r, "FLKP", kPerturbationFormatVersion);
  if (d.height != 1 || d.width != 1) throw FormatError("perturbation must have 1x1 spatial extent", dims_at);
  return Perturbation(d, read_floats(r, d.frames * d.channels));
}

}  // namespace flicker::video
