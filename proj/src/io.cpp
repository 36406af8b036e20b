#include "ecall/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace ecall {

static_assert(std::endian::native == std::endian::little,
              "tensor files are little-endian; big-endian hosts are unsupported");

namespace {

constexpr char kMagic[12] = {'E', 'C', 'A', 'L', 'L', '.', 'T', 'E', 'N', 'S', 'O', 'R'};
constexpr std::uint32_t kVersion = 1;

void write_tensor(const std::string& path, const std::string& dtype, int c, int h, int w,
                  const void* payload, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write tensor file: " + path);
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  nlohmann::ordered_json meta;
  meta["dtype"] = dtype;
  meta["shape"] = {c, h, w};
  const std::string line = meta.dump();
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.put('\n');
  out.write(static_cast<const char*>(payload), static_cast<std::streamsize>(bytes));
  if (!out) throw DataError("short write on tensor file: " + path);
}

struct TensorData {
  std::string dtype;
  int channels = 0, height = 0, width = 0;
  std::vector<char> payload;
};

TensorData read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read tensor file: " + path);
  char magic[12];
  std::uint32_t version = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not an ECALL tensor file: " + path);
  }
  if (version != kVersion) throw DataError("unsupported tensor version in " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing tensor metadata in " + path);
  TensorData t;
  try {
    nlohmann::json meta = nlohmann::json::parse(line);
    t.dtype = meta.at("dtype").get<std::string>();
    const auto shape = meta.at("shape");
    if (shape.size() != 3) throw DataError("tensor shape must be [c,h,w] in " + path);
    t.channels = shape[0].get<int>();
    t.height = shape[1].get<int>();
    t.width = shape[2].get<int>();
  } catch (const nlohmann::json::exception&) {
    throw DataError("malformed tensor metadata in " + path);
  }
  const std::size_t count =
      static_cast<std::size_t>(t.channels) * t.height * t.width * (t.dtype == "c128" ? 2 : 1);
  t.payload.resize(count * sizeof(double));
  in.read(t.payload.data(), static_cast<std::streamsize>(t.payload.size()));
  if (!in) throw DataError("truncated tensor payload in " + path);
  return t;
}

}  // namespace

void save_image(const Image& img, const std::string& path) {
  write_tensor(path, "f64", img.channels(), img.height(), img.width(), img.data().data(),
               img.size() * sizeof(double));
}

Image load_image(const std::string& path) {
  TensorData t = read_tensor(path);
  if (t.dtype != "f64") throw DataError("expected f64 tensor in " + path);
  std::vector<double> values(static_cast<std::size_t>(t.channels) * t.height * t.width);
  std::memcpy(values.data(), t.payload.data(), t.payload.size());
  return Image(t.channels, t.height, t.width, std::move(values));
}

void save_kernel(const Kernel& k, const std::string& path) {
  write_tensor(path, "f64", 1, k.size(), k.size(), k.weights().data(),
               k.weights().size() * sizeof(double));
}

Kernel load_kernel(const std::string& path) {
  TensorData t = read_tensor(path);
  if (t.dtype != "f64" || t.channels != 1 || t.height != t.width) {
    throw DataError("expected a [1,s,s] f64 kernel tensor in " + path);
  }
  std::vector<double> values(static_cast<std::size_t>(t.height) * t.width);
  std::memcpy(values.data(), t.payload.data(), t.payload.size());
  return Kernel(t.height, std::move(values));
}

void save_spectrum(const Spectrum& s, const std::string& path) {
  write_tensor(path, "c128", s.channels(), s.height(), s.width(), s.data().data(),
               s.size() * sizeof(complexd));
}

Spectrum load_spectrum(const std::string& path) {
  TensorData t = read_tensor(path);
  if (t.dtype != "c128") throw DataError("expected c128 tensor in " + path);
  std::vector<complexd> values(static_cast<std::size_t>(t.channels) * t.height * t.width);
  std::memcpy(values.data(), t.payload.data(), t.payload.size());
  return Spectrum(t.channels, t.height, t.width, std::move(values));
}

void save_filter(const SpectralFilter& f, const std::string& path) {
  write_tensor(path, "c128", 1, f.height, f.width, f.gains.data(),
               f.gains.size() * sizeof(complexd));
}

SpectralFilter load_filter(const std::string& path) {
  TensorData t = read_tensor(path);
  if (t.dtype != "c128" || t.channels != 1) {
    throw DataError("expected a [1,h,w] c128 filter tensor in " + path);
  }
  SpectralFilter f(t.height, t.width);
  std::memcpy(f.gains.data(), t.payload.data(), t.payload.size());
  return f;
}

void save_pnm(const Image& img, const std::string& path) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw DataError("PNM supports 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write image file: " + path);
  out << (img.channels() == 1 ? "P5" : "P6") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.width()) * img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        const double v = std::clamp(img.at(c, y, x), 0.0, 1.0);
        row[static_cast<std::size_t>(x) * img.channels() + c] =
            static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw DataError("short write on image file: " + path);
}

namespace {

int read_pnm_token(std::istream& in) {
  // skips whitespace and '#' comments
  while (true) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  in >> value;
  return value;
}

}  // namespace

Image load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read image file: " + path);
  std::string tag;
  in >> tag;
  int channels = 0;
  if (tag == "P5") {
    channels = 1;
  } else if (tag == "P6") {
    channels = 3;
  } else {
    throw DataError("unsupported PNM type in " + path);
  }
  const int width = read_pnm_token(in);
  const int height = read_pnm_token(in);
  const int maxval = read_pnm_token(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw DataError("unsupported PNM geometry in " + path);
  }
  in.get();  // single whitespace after maxval
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw DataError("truncated PNM payload in " + path);
  Image img(channels, height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        img.at(c, y, x) =
            raw[(static_cast<std::size_t>(y) * width + x) * channels + c] / static_cast<double>(maxval);
      }
    }
  }
  return img;
}

namespace {

bool has_pnm_extension(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return false;
  const std::string ext = path.substr(dot);
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

}  // namespace

void save_image_auto(const Image& img, const std::string& path) {
  if (has_pnm_extension(path)) {
    save_pnm(img, path);
  } else {
    save_image(img, path);
  }
}

Image load_image_auto(const std::string& path) {
  return has_pnm_extension(path) ? load_pnm(path) : load_image(path);
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot hash file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex);
}

}  // namespace ecall
