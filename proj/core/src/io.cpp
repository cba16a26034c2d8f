#include "lumigeo/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <zlib.h>

namespace lumigeo::io {
namespace {

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
  fail(ErrorCode::kIo, path.string() + ": " + what);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) io_fail(path, "write failed");
}

template <typename T>
T byteswap_value(T v) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

template <typename T>
void put_le(std::ostream& out, T v) {
  if constexpr (std::endian::native == std::endian::big) v = byteswap_value(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, bool little_endian, const fs::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) io_fail(path, "unexpected end of file");
  if ((std::endian::native == std::endian::little) != little_endian) v = byteswap_value(v);
  return v;
}

// Whitespace-separated header token (PNM family), skipping '#' comments.
std::string next_token(std::istream& in, const fs::path& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) io_fail(path, "truncated header");
  return tok;
}

int parse_int(const std::string& s, const fs::path& path) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    io_fail(path, "expected an integer, got '" + s + "'");
  }
}

// ---- PNG ------------------------------------------------------------------

void png_chunk(std::ostream& out, const char* type, const std::vector<unsigned char>& payload) {
  auto put_be32 = [&](std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  put_be32(static_cast<std::uint32_t>(payload.size()));
  out.write(type, 4);
  if (!payload.empty()) out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(type), 4);
  if (!payload.empty()) crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
  put_be32(static_cast<std::uint32_t>(crc));
}

// ---- RGBE -----------------------------------------------------------------

std::array<unsigned char, 4> to_rgbe(float r, float g, float b) {
  const float v = std::max({r, g, b});
  if (v < 1e-32f) return {0, 0, 0, 0};
  int e = 0;
  const float m = std::frexp(v, &e) * 256.0f / v;
  return {static_cast<unsigned char>(r * m), static_cast<unsigned char>(g * m), static_cast<unsigned char>(b * m),
          static_cast<unsigned char>(e + 128)};
}

void from_rgbe(const unsigned char* rgbe, float* rgb) {
  if (rgbe[3] == 0) {
    rgb[0] = rgb[1] = rgb[2] = 0.0f;
    return;
  }
  const float f = std::ldexp(1.0f, static_cast<int>(rgbe[3]) - (128 + 8));
  for (int c = 0; c < 3; ++c) rgb[c] = rgbe[c] * f;
}

void write_rle_component(std::ostream& out, const unsigned char* data, int n) {
  constexpr int kMinRun = 4;
  int cur = 0;
  while (cur < n) {
    int beg_run = cur;
    int run = 0;
    while (run < kMinRun && beg_run < n) {
      beg_run += run;
      run = 1;
      while (beg_run + run < n && run < 127 && data[beg_run] == data[beg_run + run]) ++run;
    }
    if (run < kMinRun) beg_run = n;
    // Short run just before a long one.
    if (beg_run - cur > 1 && beg_run - cur < kMinRun) {
      int run2 = 1;
      while (cur + run2 < beg_run && data[cur + run2] == data[cur]) ++run2;
      if (run2 == beg_run - cur) {
        out.put(static_cast<char>(128 + run2));
        out.put(static_cast<char>(data[cur]));
        cur = beg_run;
      }
    }
    while (cur < beg_run) {
      int literal = std::min(beg_run - cur, 128);
      out.put(static_cast<char>(literal));
      out.write(reinterpret_cast<const char*>(data + cur), literal);
      cur += literal;
    }
    if (run >= kMinRun) {
      out.put(static_cast<char>(128 + run));
      out.put(static_cast<char>(data[beg_run]));
      cur += run;
    }
  }
}

// ---- JSON helpers ---------------------------------------------------------

[[noreturn]] void schema_fail(const std::string& what) { fail(ErrorCode::kInvalidInput, what); }

double number(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number()) {
    schema_fail(std::string("expected numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) schema_fail(std::string(what) + " must be an array of three numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) schema_fail(std::string(what) + " must be an array of three numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

// Latent symbols as the mode table writes them.
json modality_list(const latent::ModalitySet& set) {
  static constexpr const char* kSymbols[] = {"z^a", "z^n", "z^g", "z^s", "z^I_E"};
  json arr = json::array();
  for (auto m : latent::kAllModalities) {
    if (set[latent::ordinal(m)]) arr.push_back(kSymbols[latent::ordinal(m)]);
  }
  return arr;
}

}  // namespace

// ---- PFM ------------------------------------------------------------------

ImageF read_pfm(const fs::path& path) {
  std::ifstream in = open_in(path);
  const std::string magic = next_token(in, path);
  int channels = 0;
  if (magic == "Pf") channels = 1;
  else if (magic == "PF") channels = 3;
  else io_fail(path, "not a PFM file");
  const int w = parse_int(next_token(in, path), path);
  const int h = parse_int(next_token(in, path), path);
  double scale = 0.0;
  try {
    scale = std::stod(next_token(in, path));
  } catch (const std::exception&) {
    io_fail(path, "bad PFM scale");
  }
  if (w <= 0 || h <= 0 || scale == 0.0) io_fail(path, "bad PFM header");
  const bool little = scale < 0.0;
  ImageF image(w, h, channels);
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) image(x, y, c) = get<float>(in, little, path);
    }
  }
  return image;
}

void write_pfm(const fs::path& path, const ImageF& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    fail(ErrorCode::kInvalidInput, "PFM holds 1 or 3 channels, got " + std::to_string(image.channels()));
  }
  std::ofstream out = open_out(path);
  out << (image.channels() == 1 ? "Pf" : "PF") << '\n' << image.width() << ' ' << image.height() << "\n-1.0\n";
  for (int row = 0; row < image.height(); ++row) {
    const int y = image.height() - 1 - row;
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) put_le(out, image(x, y, c));
    }
  }
  finish(out, path);
}

// ---- PGM ------------------------------------------------------------------

Mask read_pgm_mask(const fs::path& path) {
  std::ifstream in = open_in(path);
  if (next_token(in, path) != "P5") io_fail(path, "not a binary PGM (P5)");
  const int w = parse_int(next_token(in, path), path);
  const int h = parse_int(next_token(in, path), path);
  const int maxval = parse_int(next_token(in, path), path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) io_fail(path, "unsupported PGM header");
  Mask mask(w, h);
  std::vector<char> row(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    in.read(row.data(), w);
    if (!in) io_fail(path, "unexpected end of file");
    for (int x = 0; x < w; ++x) mask(x, y) = row[x] != 0;
  }
  return mask;
}

void write_pgm_mask(const fs::path& path, const Mask& mask) {
  std::ofstream out = open_out(path);
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  for (auto v : mask.data()) out.put(v ? static_cast<char>(255) : 0);
  finish(out, path);
}

// ---- PNG ------------------------------------------------------------------

void write_png(const fs::path& path, const ImageF& image) {
  const int ch = image.channels();
  if (ch != 1 && ch != 3) fail(ErrorCode::kInvalidInput, "PNG export supports 1 or 3 channels");
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(image.height()) * (image.width() * ch + 1));
  for (int y = 0; y < image.height(); ++y) {
    raw.push_back(0);  // filter: none
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < ch; ++c) {
        const float v = std::clamp(image(x, y, c), 0.0f, 1.0f);
        raw.push_back(static_cast<unsigned char>(std::lround(v * 255.0f)));
      }
    }
  }
  uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> packed(packed_len);
  if (compress2(packed.data(), &packed_len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    io_fail(path, "zlib compression failed");
  }
  packed.resize(packed_len);

  std::vector<unsigned char> ihdr(13, 0);
  const auto w = static_cast<std::uint32_t>(image.width());
  const auto h = static_cast<std::uint32_t>(image.height());
  for (int i = 0; i < 4; ++i) {
    ihdr[i] = static_cast<unsigned char>(w >> (24 - 8 * i));
    ihdr[4 + i] = static_cast<unsigned char>(h >> (24 - 8 * i));
  }
  ihdr[8] = 8;                   // bit depth
  ihdr[9] = ch == 1 ? 0 : 2;     // gray or truecolor
  std::ofstream out = open_out(path);
  const unsigned char signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  out.write(reinterpret_cast<const char*>(signature), 8);
  png_chunk(out, "IHDR", ihdr);
  png_chunk(out, "IDAT", packed);
  png_chunk(out, "IEND", {});
  finish(out, path);
}

// ---- Radiance HDR ---------------------------------------------------------

ImageF read_hdr(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#?", 0) != 0) io_fail(path, "not a Radiance file");
  bool rgbe_format = true;
  while (std::getline(in, line) && !line.empty()) {
    if (line.rfind("FORMAT=", 0) == 0 && line != "FORMAT=32-bit_rle_rgbe") rgbe_format = false;
  }
  if (!rgbe_format) io_fail(path, "only 32-bit_rle_rgbe is supported");
  if (!std::getline(in, line)) io_fail(path, "missing resolution line");
  std::istringstream res(line);
  std::string ya, xa;
  int h = 0, w = 0;
  res >> ya >> h >> xa >> w;
  if (ya != "-Y" || xa != "+X" || w <= 0 || h <= 0) io_fail(path, "unsupported resolution line '" + line + "'");

  ImageF image(w, h, 3);
  std::vector<unsigned char> scan(static_cast<std::size_t>(w) * 4);
  auto read_bytes = [&](unsigned char* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (!in) io_fail(path, "unexpected end of pixel data");
  };
  for (int y = 0; y < h; ++y) {
    unsigned char head[4];
    read_bytes(head, 4);
    const bool rle = w >= 8 && w < 0x8000 && head[0] == 2 && head[1] == 2 && !(head[2] & 0x80);
    if (!rle) {
      std::memcpy(scan.data(), head, 4);
      if (w > 1) read_bytes(scan.data() + 4, static_cast<std::size_t>(w - 1) * 4);
    } else {
      if (((head[2] << 8) | head[3]) != w) io_fail(path, "scanline width mismatch");
      for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < w) {
          unsigned char count = 0;
          read_bytes(&count, 1);
          if (count > 128) {
            const int run = count - 128;
            unsigned char value = 0;
            read_bytes(&value, 1);
            if (x + run > w) io_fail(path, "bad RLE run");
            for (int i = 0; i < run; ++i) scan[static_cast<std::size_t>(x++) * 4 + c] = value;
          } else {
            if (count == 0 || x + count > w) io_fail(path, "bad RLE literal");
            for (int i = 0; i < count; ++i) read_bytes(&scan[static_cast<std::size_t>(x++) * 4 + c], 1);
          }
        }
      }
    }
    for (int x = 0; x < w; ++x) {
      float rgb[3];
      from_rgbe(&scan[static_cast<std::size_t>(x) * 4], rgb);
      for (int c = 0; c < 3; ++c) image(x, y, c) = rgb[c];
    }
  }
  return image;
}

void write_hdr(const fs::path& path, const ImageF& image) {
  if (image.channels() != 3) fail(ErrorCode::kInvalidInput, "Radiance HDR needs an RGB image");
  std::ofstream out = open_out(path);
  const int w = image.width();
  out << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << image.height() << " +X " << w << "\n";
  std::vector<unsigned char> comp(static_cast<std::size_t>(w) * 4);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      const auto e = to_rgbe(image(x, y, 0), image(x, y, 1), image(x, y, 2));
      for (int c = 0; c < 4; ++c) comp[static_cast<std::size_t>(c) * w + x] = e[c];
    }
    if (w < 8 || w >= 0x8000) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 4; ++c) out.put(static_cast<char>(comp[static_cast<std::size_t>(c) * w + x]));
      }
      continue;
    }
    out.put(2);
    out.put(2);
    out.put(static_cast<char>(w >> 8));
    out.put(static_cast<char>(w & 0xff));
    for (int c = 0; c < 4; ++c) write_rle_component(out, &comp[static_cast<std::size_t>(c) * w], w);
  }
  finish(out, path);
}

// ---- PLY ------------------------------------------------------------------

PointCloud read_ply(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) io_fail(path, "not a PLY file");

  struct Property {
    std::string type, name;
  };
  std::vector<Property> props;
  std::size_t vertex_count = 0;
  bool in_vertex = false, seen_vertex = false, little = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "end_header") break;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian") little = true;
      else if (fmt == "binary_big_endian") little = false;
      else io_fail(path, "only binary PLY is supported");
    } else if (key == "element") {
      std::string name;
      std::size_t n = 0;
      ls >> name >> n;
      in_vertex = name == "vertex" && !seen_vertex;
      if (in_vertex) {
        if (!props.empty() || seen_vertex) io_fail(path, "vertex must be the first element");
        vertex_count = n;
        seen_vertex = true;
      }
    } else if (key == "property" && in_vertex) {
      Property p;
      ls >> p.type >> p.name;
      if (p.type == "list") io_fail(path, "list properties on vertices are not supported");
      props.push_back(p);
    }
  }
  if (!seen_vertex) io_fail(path, "no vertex element");

  int ix = -1, iy = -1, iz = -1, iu = -1, iv = -1;
  for (int i = 0; i < static_cast<int>(props.size()); ++i) {
    const auto& n = props[i].name;
    if (n == "x") ix = i;
    if (n == "y") iy = i;
    if (n == "z") iz = i;
    if (n == "u") iu = i;
    if (n == "v") iv = i;
  }
  if (ix < 0 || iy < 0 || iz < 0) io_fail(path, "vertex element lacks x, y, z");

  auto read_scalar = [&](const std::string& type) -> double {
    if (type == "float" || type == "float32") return get<float>(in, little, path);
    if (type == "double" || type == "float64") return get<double>(in, little, path);
    if (type == "uchar" || type == "uint8") return get<std::uint8_t>(in, little, path);
    if (type == "char" || type == "int8") return get<std::int8_t>(in, little, path);
    if (type == "ushort" || type == "uint16") return get<std::uint16_t>(in, little, path);
    if (type == "short" || type == "int16") return get<std::int16_t>(in, little, path);
    if (type == "uint" || type == "uint32") return get<std::uint32_t>(in, little, path);
    if (type == "int" || type == "int32") return get<std::int32_t>(in, little, path);
    io_fail(path, "unknown PLY type '" + type + "'");
  };

  PointCloud cloud;
  cloud.points.resize(vertex_count);
  const bool has_uv = iu >= 0 && iv >= 0;
  if (has_uv) cloud.pixel_index.emplace(vertex_count);
  std::vector<double> row(props.size());
  for (std::size_t i = 0; i < vertex_count; ++i) {
    for (std::size_t p = 0; p < props.size(); ++p) row[p] = read_scalar(props[p].type);
    cloud.points[i] = Vec3(row[ix], row[iy], row[iz]);
    if (has_uv) {
      if (row[iu] < 0 || row[iv] < 0) io_fail(path, "negative pixel index");
      (*cloud.pixel_index)[i] = {static_cast<std::uint32_t>(row[iu]), static_cast<std::uint32_t>(row[iv])};
    }
  }
  return cloud;
}

void write_ply(const fs::path& path, const PointCloud& cloud) {
  validate(cloud);
  std::ofstream out = open_out(path);
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n";
  if (cloud.pixel_index) out << "property uint u\nproperty uint v\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) put_le(out, static_cast<float>(cloud.points[i][a]));
    if (cloud.pixel_index) {
      put_le(out, (*cloud.pixel_index)[i].u);
      put_le(out, (*cloud.pixel_index)[i].v);
    }
  }
  finish(out, path);
}

// ---- GRLT -----------------------------------------------------------------

Tensor read_tensor(const fs::path& path) {
  std::ifstream in = open_in(path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GRLT", 4) != 0) io_fail(path, "missing GRLT magic");
  Tensor t;
  const auto rank = get<std::uint32_t>(in, true, path);
  if (rank > 8) io_fail(path, "implausible tensor rank " + std::to_string(rank));
  for (std::uint32_t i = 0; i < rank; ++i) t.shape.push_back(get<std::uint32_t>(in, true, path));
  const std::size_t n = Tensor::element_count(t.shape);
  t.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.data[i] = get<float>(in, true, path);
  if (in.peek() != EOF) io_fail(path, "trailing bytes after tensor data");
  return t;
}

void write_tensor(const fs::path& path, const Tensor& tensor) {
  if (tensor.data.size() != Tensor::element_count(tensor.shape)) {
    fail(ErrorCode::kInvalidInput, "tensor data length does not match its shape");
  }
  std::ofstream out = open_out(path);
  out.write("GRLT", 4);
  put_le(out, static_cast<std::uint32_t>(tensor.shape.size()));
  for (auto d : tensor.shape) put_le(out, d);
  for (float v : tensor.data) put_le(out, v);
  finish(out, path);
}

// ---- JSON -----------------------------------------------------------------

json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    io_fail(path, std::string("malformed JSON: ") + e.what());
  }
}

void write_json(const fs::path& path, const json& value) {
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
  finish(out, path);
}

json to_json(const inod::IntrinsicsMatrix& k) { return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}}; }

inod::IntrinsicsMatrix intrinsics_from_json(const json& j) {
  return {number(j, "fx"), number(j, "fy"), number(j, "cx"), number(j, "cy")};
}

json to_json(const inod::NormalizationRecord& r) {
  return {{"center", {r.center.x(), r.center.y(), r.center.z()}}, {"max_edge", r.max_edge}};
}

inod::NormalizationRecord normalization_from_json(const json& j) {
  if (!j.is_object() || !j.contains("center")) schema_fail("normalization record needs 'center'");
  inod::NormalizationRecord r{vec3(j["center"], "center"), number(j, "max_edge")};
  if (!(r.max_edge > 0.0)) schema_fail("max_edge must be positive");
  return r;
}

json to_json(const inod::OrthoGrid& g) {
  return {{"origin", {g.origin_x, g.origin_y}}, {"pitch", {g.pitch_x, g.pitch_y}}};
}

inod::OrthoGrid grid_from_json(const json& j) {
  auto pair = [&](const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_array() || j[key].size() != 2 || !j[key][0].is_number() ||
        !j[key][1].is_number()) {
      schema_fail(std::string("grid needs a two-number '") + key + "'");
    }
    return std::pair{j[key][0].get<double>(), j[key][1].get<double>()};
  };
  const auto [ox, oy] = pair("origin");
  const auto [px, py] = pair("pitch");
  return {ox, oy, px, py};
}

json to_json(const envmap::LedArray& leds) {
  json arr = json::array();
  for (const auto& led : leds) {
    arr.push_back({{"position", {led.position.x(), led.position.y(), led.position.z()}}, {"intensity", led.intensity}});
  }
  return arr;
}

envmap::LedArray leds_from_json(const json& j) {
  if (!j.is_array()) schema_fail("LED file must be a JSON array");
  envmap::LedArray leds;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("position")) schema_fail("each LED needs 'position' and 'intensity'");
    leds.push_back({vec3(e["position"], "position"), number(e, "intensity")});
  }
  return leds;
}

json to_json(const latent::TrainingModeSpec& spec) {
  json global = json::array();
  if (spec.use_global_image) global.push_back("z^I");
  if (spec.use_illumination) global.push_back("z^E");
  json datasets = json::array();
  for (auto d : latent::kAllDatasets) {
    if (spec.allows(d)) datasets.push_back(std::string(latent::to_string(d)));
  }
  return {{"mode", std::string(latent::to_string(spec.mode))},
          {"clear_latent", modality_list(spec.clear_set)},
          {"noisy_latent", modality_list(spec.noisy_set)},
          {"global_condition", global},
          {"dataset", datasets}};
}

json to_json(const latent::ModalityTypeTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows()) rows.push_back({r[0], r[1], r[2]});
  return rows;
}

latent::ModalityTypeTable modality_table_from_json(const json& j) {
  if (!j.is_array() || j.size() != latent::kModalityCount) schema_fail("modality table must hold five rows");
  std::array<latent::ModalityTypeTable::Row, latent::kModalityCount> rows{};
  for (int m = 0; m < latent::kModalityCount; ++m) {
    const auto& r = j[m];
    if (!r.is_array() || r.size() != latent::kTypeChannels) schema_fail("modality table rows need three values");
    for (int c = 0; c < latent::kTypeChannels; ++c) {
      if (!r[c].is_number()) schema_fail("modality table entries must be numbers");
      rows[m][c] = r[c].get<float>();
    }
  }
  return latent::ModalityTypeTable(rows);
}

diffusion::NoiseSchedule schedule_from_json(const json& j) {
  if (!j.is_array()) schema_fail("schedule must be a JSON array of noise levels");
  std::vector<double> sigmas;
  for (const auto& v : j) {
    if (!v.is_number()) schema_fail("schedule entries must be numbers");
    sigmas.push_back(v.get<double>());
  }
  return diffusion::NoiseSchedule(std::move(sigmas));
}

inod::DepthMap read_depth(const fs::path& depth_path, const fs::path& mask_path) {
  const ImageF raw = read_pfm(depth_path);
  if (raw.channels() != 1) fail(ErrorCode::kInvalidInput, "depth PFM must be single-channel");
  Raster<double> values(raw.width(), raw.height());
  for (std::size_t i = 0; i < raw.size(); ++i) values.storage()[i] = raw.storage()[i];
  inod::DepthMap depth = inod::depth_from_values(std::move(values));
  if (!mask_path.empty()) {
    Mask mask = read_pgm_mask(mask_path);
    require_same_shape(depth.values, mask, "depth mask");
    depth.mask = std::move(mask);
  }
  return depth;
}

}  // namespace lumigeo::io
