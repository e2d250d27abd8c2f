#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/spectral_grid.hpp"

namespace ehrenfest {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  out.write(bytes, 8);
}

template <typename T>
T get(std::istream& in) {
  char bytes[8];
  if (!in.read(bytes, 8)) throw IoError("truncated field snapshot");
  std::uint64_t bits;
  std::memcpy(&bits, bytes, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_field_binary(std::ostream& out, const WaveField& f) {
  const Grid& g = f.grid();
  const int d = g.dimension();
  put<std::int64_t>(out, d);
  for (int i = 0; i < d; ++i) put<std::int64_t>(out, static_cast<std::int64_t>(g.axis(i).points));
  for (int i = 0; i < d; ++i) put<double>(out, g.axis(i).left);
  for (int i = 0; i < d; ++i) put<double>(out, g.axis(i).right());
  put<double>(out, f.epsilon());
  for (const auto& v : f.values()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  if (!out) throw IoError("failed writing field snapshot");
}

WaveField read_field_binary(std::istream& in) {
  const auto d = get<std::int64_t>(in);
  if (d < 1 || d > kMaxDim) throw IoError("snapshot dimension must be 1 or 2");
  std::array<Axis, kMaxDim> axes{};
  for (int i = 0; i < d; ++i) {
    const auto n = get<std::int64_t>(in);
    if (n < 16 || n > (std::int64_t{1} << 30)) throw IoError("snapshot point count out of range");
    axes[i].points = static_cast<std::size_t>(n);
  }
  for (int i = 0; i < d; ++i) axes[i].left = get<double>(in);
  for (int i = 0; i < d; ++i) axes[i].length = get<double>(in) - axes[i].left;
  const double eps = get<double>(in);
  Grid g(std::span<const Axis>(axes.data(), static_cast<std::size_t>(d)));
  std::vector<complex> values(g.size());
  for (auto& v : values) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    v = {re, im};
  }
  return WaveField(std::move(g), std::move(values), eps);
}

void write_field_csv(std::ostream& out, const WaveField& f) {
  if (f.grid().dimension() != 1) throw ConfigError("CSV field export is 1-d only");
  out << "x,re,im,abs\n";
  char buf[128];
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e,%.12e\n", f.grid().point(i)[0],
                  f[i].real(), f[i].imag(), std::abs(f[i]));
    out << buf;
  }
}

}  // namespace ehrenfest
