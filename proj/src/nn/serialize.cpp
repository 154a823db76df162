#include "mstep/nn/serialize.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mstep::nn {

namespace {

constexpr std::array<char, 4> kMagic{'M', 'S', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("load_mlp: truncated checkpoint");
  return value;
}

}  // namespace

void save_mlp(const Mlp& net, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int s : net.layer_sizes()) write_pod<std::int32_t>(out, s);
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(net.activations().hidden));
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(net.activations().output));
  for (double p : net.parameters()) write_pod<double>(out, p);
  if (!out) throw std::runtime_error("save_mlp: write failed");
}

Mlp load_mlp(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("load_mlp: bad magic");
  if (read_pod<std::uint32_t>(in) != kVersion) {
    throw std::runtime_error("load_mlp: unsupported version");
  }
  const auto count = read_pod<std::uint32_t>(in);
  if (count < 2 || count > 64) throw std::runtime_error("load_mlp: bad layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) sizes.push_back(read_pod<std::int32_t>(in));
  const auto hidden = read_pod<std::uint8_t>(in);
  const auto output = read_pod<std::uint8_t>(in);
  if (hidden > 1 || output > 1) throw std::runtime_error("load_mlp: bad activation tag");
  Activations acts{static_cast<HiddenActivation>(hidden), static_cast<OutputActivation>(output)};

  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (sizes[l] <= 0 || sizes[l + 1] <= 0) throw std::runtime_error("load_mlp: bad layer size");
    n += static_cast<std::size_t>(sizes[l + 1]) * (sizes[l] + 1);
  }
  std::vector<double> params(n);
  for (double& p : params) p = read_pod<double>(in);
  return load_mlp_parameters(std::move(sizes), acts, params);
}

void save_mlps(const std::vector<const Mlp*>& nets, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_mlps: cannot open " + path.string());
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(nets.size()));
  for (const Mlp* net : nets) save_mlp(*net, out);
}

std::vector<Mlp> load_mlps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_mlps: cannot open " + path.string());
  const auto count = read_pod<std::uint32_t>(in);
  std::vector<Mlp> nets;
  for (std::uint32_t i = 0; i < count; ++i) nets.push_back(load_mlp(in));
  return nets;
}

}  // namespace mstep::nn
