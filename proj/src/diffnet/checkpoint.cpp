#include "flicker/diffnet/checkpoint.hpp"

#include "flicker/binary_io.hpp"
#include "flicker/error.hpp"

namespace flicker::diffnet {
namespace {

constexpr std::uint32_t kConvRecord = 1;
constexpr std::uint32_t kDenseRecord = 2;

void write_values(ByteWriter& w, const std::vector<double>& v) {
  w.u64(v.size());
  for (double x : v) w.f64(x);
}

std::vector<double> read_values(ByteReader& r, std::size_t expected) {
  const std::size_t at = r.offset();
  const std::uint64_t n = r.u64();
  if (n != expected)
    throw FormatError("record holds " + std::to_string(n) + " values, expected " + std::to_string(expected), at);
  r.require(n * 8);
  std::vector<double> v(n);
  for (double& x : v) x = r.f64();
  return v;
}

void write_conv(ByteWriter& w, const ConvLayer& l) {
  w.u32(kConvRecord);
  w.u32(static_cast<std::uint32_t>(l.shape.in_channels));
  w.u32(static_cast<std::uint32_t>(l.shape.out_channels));
  for (auto a : {l.shape.kernel, l.shape.stride, l.shape.padding})
    for (std::size_t x : a) w.u32(static_cast<std::uint32_t>(x));
  write_values(w, l.weight);
  write_values(w, l.bias);
}

void read_conv(ByteReader& r, ConvLayer& l) {
  const std::size_t at = r.offset();
  if (r.u32() != kConvRecord) throw FormatError("expected a conv3d record", at);
  Conv3dShape s;
  s.in_channels = r.u32();
  s.out_channels = r.u32();
  for (auto* a : {&s.kernel, &s.stride, &s.padding})
    for (std::size_t& x : *a) x = r.u32();
  if (!(s == l.shape)) throw ArchitectureMismatch("conv3d record shape does not match the architecture", at);
  l.weight = read_values(r, s.weight_count());
  l.bias = read_values(r, s.out_channels);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& p) {
  p.validate();
  ByteWriter w;
  w.magic("FLKM");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(p.arch));
  w.u32(static_cast<std::uint32_t>(p.dims.frames));
  w.u32(static_cast<std::uint32_t>(p.dims.height));
  w.u32(static_cast<std::uint32_t>(p.dims.width));
  w.u32(static_cast<std::uint32_t>(p.dims.channels));
  w.f64(p.dims.v_min);
  w.f64(p.dims.v_max);
  w.u32(static_cast<std::uint32_t>(p.num_classes));
  w.u32(3);
  write_conv(w, p.conv1);
  write_conv(w, p.conv2);
  w.u32(kDenseRecord);
  w.u32(static_cast<std::uint32_t>(p.head.in));
  w.u32(static_cast<std::uint32_t>(p.head.out));
  write_values(w, p.head.weight);
  write_values(w, p.head.bias);
  w.write_file(path);
}

ModelParams load_checkpoint(const std::filesystem::path& path, std::optional<Architecture> expected) {
  ByteReader r = ByteReader::from_file(path);
  r.expect_magic("FLKM");
  std::size_t at = r.offset();
  if (const auto v = r.u32(); v != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(v), at);
  at = r.offset();
  const std::uint32_t arch_id = r.u32();
  if (arch_id != 1 && arch_id != 2) throw FormatError("unknown architecture id " + std::to_string(arch_id), at);
  const auto arch = static_cast<Architecture>(arch_id);
  if (expected && *expected != arch)
    throw ArchitectureMismatch(std::string("checkpoint holds architecture ") + architecture_name(arch) +
                                   ", expected " + architecture_name(*expected),
                               at);
  video::Dims d;
  d.frames = r.u32();
  d.height = r.u32();
  d.width = r.u32();
  d.channels = r.u32();
  d.v_min = r.f64();
  d.v_max = r.f64();
  const std::size_t k = r.u32();
  d.validate();

  // The template fixes every layer shape; the records must agree with it.
  ModelParams p = init_params(arch, d, k, 0);
  at = r.offset();
  if (r.u32() != 3) throw FormatError("expected 3 layer records", at);
  read_conv(r, p.conv1);
  read_conv(r, p.conv2);
  at = r.offset();
  if (r.u32() != kDenseRecord) throw FormatError("expected a dense record", at);
  if (r.u32() != p.head.in || r.u32() != p.head.out)
    throw ArchitectureMismatch("dense record shape does not match the architecture", at);
  p.head.weight = read_values(r, p.head.in * p.head.out);
  p.head.bias = read_values(r, p.head.out);
  r.expect_end();
  p.validate();
  return p;
}

}  // namespace flicker::diffnet
