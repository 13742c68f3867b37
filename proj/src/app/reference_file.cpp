#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rok/app/reference_file.hpp"
#include "rok/errors.hpp"

namespace rok::app {

namespace {

constexpr std::array<char, 7> kMagic = {'R', 'O', 'K', 'R', 'E', 'F', '1'};

template <typename T>
void put_le(std::ostream& out, T v) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(std::istream& in, const std::string& what) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == EOF) throw ConfigError("reference file truncated while reading " + what);
    v |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void write_reference(const std::filesystem::path& path, const ReferenceState& ref) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write reference file '" + path.string() + "'");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(ref.y.size()));
  for (Eigen::Index i = 0; i < ref.y.size(); ++i) put_le(out, std::bit_cast<std::uint64_t>(ref.y(i)));
  std::string trailer;
  for (const auto& [k, v] : ref.metadata) trailer += k + "=" + v + "\n";
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(trailer.size()));
  out.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
  if (!out) throw ConfigError("failed writing reference file '" + path.string() + "'");
}

ReferenceState read_reference(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open reference file '" + path.string() + "'");
  std::array<char, 7> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("'" + path.string() + "' is not a reference file");
  const auto n = get_le<std::uint64_t>(in, "dimension");
  ReferenceState ref;
  ref.y.resize(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i)
    ref.y(static_cast<Eigen::Index>(i)) = std::bit_cast<double>(get_le<std::uint64_t>(in, "state"));
  const auto len = get_le<std::uint32_t>(in, "metadata length");
  std::string trailer(len, '\0');
  in.read(trailer.data(), len);
  if (static_cast<std::uint32_t>(in.gcount()) != len) throw ConfigError("reference file truncated in metadata");
  std::istringstream ss(trailer);
  for (std::string line; std::getline(ss, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) ref.metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return ref;
}

}  // namespace rok::app
