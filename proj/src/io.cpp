#include "rvit/io.hpp"

#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace rvit {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

uint8_t to_u8(double v) {
  return uint8_t(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
}
uint16_t to_u16(double v) {
  return uint16_t(std::clamp(v, 0.0, 1.0) * 65535.0 + 0.5);
}

}  // namespace

ImageBuffer read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  require(fp != nullptr, "read_png: cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, "read_png: init failure");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail_contract("read_png: init failure");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_contract("read_png: decode error in " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // little-endian in memory
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  int channels = png_get_channels(png, info);
  bit_depth = png_get_bit_depth(png, info);
  size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<uint8_t> raw(rowbytes * h);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ImageBuffer img(int(h), int(w), channels);
  double scale = bit_depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (png_uint_32 y = 0; y < h; ++y) {
    const uint8_t* row = raw.data() + y * rowbytes;
    for (png_uint_32 x = 0; x < w; ++x) {
      for (int ch = 0; ch < channels; ++ch) {
        double v;
        if (bit_depth == 16) {
          uint16_t u;
          std::memcpy(&u, row + (x * channels + ch) * 2, 2);
          v = u * scale;
        } else {
          v = row[x * channels + ch] * scale;
        }
        img.at(int(y), int(x), ch) = v;
      }
    }
  }
  return img;
}

namespace {

void write_png_impl(const std::string& path, const ImageBuffer& img, int bit_depth) {
  require(!img.empty(), "write_png: empty image");
  require(img.c == 1 || img.c == 3, "write_png: channel count must be 1 or 3");
  require(bit_depth == 8 || (bit_depth == 16 && img.c == 1),
          "write_png: 16-bit output is grayscale only");

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  require(fp != nullptr, "write_png: cannot open " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, "write_png: init failure");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail_contract("write_png: init failure");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail_contract("write_png: encode error for " + path);
  }
  png_init_io(png, fp.get());
  int color = img.c == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, png_uint_32(img.w), png_uint_32(img.h), bit_depth, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  size_t stride = size_t(img.w) * img.c * (bit_depth / 8);
  std::vector<uint8_t> row(stride);
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      for (int ch = 0; ch < img.c; ++ch) {
        if (bit_depth == 8) {
          row[size_t(x) * img.c + ch] = to_u8(img.at(y, x, ch));
        } else {
          uint16_t v = to_u16(img.at(y, x, ch));
          row[(size_t(x) * img.c + ch) * 2] = uint8_t(v >> 8);  // network order
          row[(size_t(x) * img.c + ch) * 2 + 1] = uint8_t(v & 0xFF);
        }
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png(const std::string& path, const ImageBuffer& img) {
  write_png_impl(path, img, 8);
}

void write_png16(const std::string& path, const ImageBuffer& img) {
  write_png_impl(path, img, 16);
}

// ---------------------------------------------------------------- NPY

std::vector<uint8_t> npy_encode(const NpyArray& arr) {
  std::ostringstream shape;
  shape << "(";
  for (size_t i = 0; i < arr.shape.size(); ++i) shape << arr.shape[i] << ", ";
  shape << ")";
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': " +
                       shape.str() + ", }";
  size_t unpadded = 10 + header.size() + 1;
  size_t padded = (unpadded + 63) / 64 * 64;
  header.append(padded - unpadded, ' ');
  header.push_back('\n');

  std::vector<uint8_t> out;
  out.reserve(10 + header.size() + arr.data.size() * 8);
  const char magic[] = "\x93NUMPY";
  out.insert(out.end(), magic, magic + 6);
  out.push_back(1);
  out.push_back(0);
  uint16_t hlen = uint16_t(header.size());
  out.push_back(uint8_t(hlen & 0xFF));
  out.push_back(uint8_t(hlen >> 8));
  out.insert(out.end(), header.begin(), header.end());
  size_t base = out.size();
  out.resize(base + arr.data.size() * 8);
  std::memcpy(out.data() + base, arr.data.data(), arr.data.size() * 8);
  return out;
}

NpyArray npy_decode(const std::vector<uint8_t>& bytes) {
  require(bytes.size() >= 10 && std::memcmp(bytes.data(), "\x93NUMPY", 6) == 0,
          "npy: bad magic");
  uint16_t hlen = uint16_t(bytes[8]) | uint16_t(bytes[9]) << 8;
  require(bytes.size() >= 10u + hlen, "npy: truncated header");
  std::string header(bytes.begin() + 10, bytes.begin() + 10 + hlen);

  auto find_value = [&](const std::string& key) {
    size_t pos = header.find("'" + key + "'");
    require(pos != std::string::npos, "npy: missing key " + key);
    pos = header.find(':', pos);
    return pos + 1;
  };

  size_t dpos = find_value("descr");
  size_t q0 = header.find('\'', dpos);
  size_t q1 = header.find('\'', q0 + 1);
  std::string descr = header.substr(q0 + 1, q1 - q0 - 1);

  size_t fpos = find_value("fortran_order");
  bool fortran = header.compare(fpos, 5, " True") == 0 ||
                 header.compare(fpos, 4, "True") == 0;
  require(!fortran, "npy: fortran order unsupported");

  size_t spos = find_value("shape");
  size_t p0 = header.find('(', spos);
  size_t p1 = header.find(')', p0);
  std::string inner = header.substr(p0 + 1, p1 - p0 - 1);
  NpyArray arr;
  {
    std::istringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::string t;
      for (char ch : tok)
        if (!std::isspace(uint8_t(ch))) t.push_back(ch);
      if (!t.empty()) arr.shape.push_back(std::stoll(t));
    }
  }

  int64_t n = arr.numel();
  const uint8_t* payload = bytes.data() + 10 + hlen;
  size_t avail = bytes.size() - 10 - hlen;
  arr.data.resize(size_t(n));
  auto need = [&](size_t bytes_per) {
    require(avail >= size_t(n) * bytes_per, "npy: truncated payload");
  };
  if (descr == "<f8") {
    need(8);
    std::memcpy(arr.data.data(), payload, size_t(n) * 8);
  } else if (descr == "<f4") {
    need(4);
    for (int64_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, payload + i * 4, 4);
      arr.data[size_t(i)] = v;
    }
  } else if (descr == "<u2") {
    need(2);
    for (int64_t i = 0; i < n; ++i) {
      uint16_t v;
      std::memcpy(&v, payload + i * 2, 2);
      arr.data[size_t(i)] = v;
    }
  } else if (descr == "|u1") {
    need(1);
    for (int64_t i = 0; i < n; ++i) arr.data[size_t(i)] = payload[i];
  } else if (descr == "<i8") {
    need(8);
    for (int64_t i = 0; i < n; ++i) {
      int64_t v;
      std::memcpy(&v, payload + i * 8, 8);
      arr.data[size_t(i)] = double(v);
    }
  } else {
    fail_contract("npy: unsupported dtype " + descr);
  }
  return arr;
}

void write_npy(const std::string& path, const NpyArray& arr) {
  auto bytes = npy_encode(arr);
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "write_npy: cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  require(f.good(), "write_npy: write failure for " + path);
}

NpyArray read_npy(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "read_npy: cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return npy_decode(bytes);
}

// ------------------------------------------------- checkpoint zip (store)

namespace {

void put_u16(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(uint8_t(x & 0xFF));
  v.push_back(uint8_t(x >> 8));
}
void put_u32(std::vector<uint8_t>& v, uint32_t x) {
  for (int i = 0; i < 4; ++i) v.push_back(uint8_t((x >> (8 * i)) & 0xFF));
}
uint16_t get_u16(const uint8_t* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }
uint32_t get_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

struct ZipMember {
  std::string name;
  std::vector<uint8_t> bytes;
};

void write_zip(const std::string& path, const std::vector<ZipMember>& members) {
  std::vector<uint8_t> out;
  struct Entry {
    std::string name;
    uint32_t crc, size, offset;
  };
  std::vector<Entry> entries;
  for (const auto& m : members) {
    uint32_t crc = uint32_t(
        crc32(0, m.bytes.empty() ? Z_NULL : m.bytes.data(), uInt(m.bytes.size())));
    Entry e{m.name, crc, uint32_t(m.bytes.size()), uint32_t(out.size())};
    entries.push_back(e);
    put_u32(out, 0x04034b50);      // local file header
    put_u16(out, 20);              // version needed
    put_u16(out, 0);               // flags
    put_u16(out, 0);               // method: store
    put_u16(out, 0);               // mtime (fixed: DOS epoch)
    put_u16(out, 0x21);            // mdate 1980-01-01
    put_u32(out, crc);
    put_u32(out, e.size);
    put_u32(out, e.size);
    put_u16(out, uint16_t(m.name.size()));
    put_u16(out, 0);               // extra len
    out.insert(out.end(), m.name.begin(), m.name.end());
    out.insert(out.end(), m.bytes.begin(), m.bytes.end());
  }
  size_t cd_start = out.size();
  for (const auto& e : entries) {
    put_u32(out, 0x02014b50);  // central directory header
    put_u16(out, 20);
    put_u16(out, 20);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0x21);
    put_u32(out, e.crc);
    put_u32(out, e.size);
    put_u32(out, e.size);
    put_u16(out, uint16_t(e.name.size()));
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u32(out, 0);
    put_u32(out, e.offset);
    out.insert(out.end(), e.name.begin(), e.name.end());
  }
  size_t cd_size = out.size() - cd_start;
  put_u32(out, 0x06054b50);  // end of central directory
  put_u16(out, 0);
  put_u16(out, 0);
  put_u16(out, uint16_t(entries.size()));
  put_u16(out, uint16_t(entries.size()));
  put_u32(out, uint32_t(cd_size));
  put_u32(out, uint32_t(cd_start));
  put_u16(out, 0);

  std::ofstream f(path, std::ios::binary);
  require(f.good(), "checkpoint: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
  require(f.good(), "checkpoint: write failure for " + path);
}

std::vector<ZipMember> read_zip(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "checkpoint: cannot open " + path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
  require(buf.size() >= 22, "checkpoint: truncated archive");
  // find EOCD (no comment written by us, but scan to be safe)
  size_t eocd = std::string::npos;
  for (size_t i = buf.size() - 22 + 1; i-- > 0;) {
    if (get_u32(buf.data() + i) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  require(eocd != std::string::npos, "checkpoint: missing end-of-directory");
  uint16_t count = get_u16(buf.data() + eocd + 10);
  uint32_t cd_off = get_u32(buf.data() + eocd + 16);

  std::vector<ZipMember> members;
  size_t p = cd_off;
  for (uint16_t i = 0; i < count; ++i) {
    require(p + 46 <= buf.size() && get_u32(buf.data() + p) == 0x02014b50,
            "checkpoint: bad central directory");
    uint16_t method = get_u16(buf.data() + p + 10);
    uint32_t crc = get_u32(buf.data() + p + 16);
    uint32_t size = get_u32(buf.data() + p + 20);
    uint16_t name_len = get_u16(buf.data() + p + 28);
    uint16_t extra_len = get_u16(buf.data() + p + 30);
    uint16_t comment_len = get_u16(buf.data() + p + 32);
    uint32_t local_off = get_u32(buf.data() + p + 42);
    std::string name(buf.begin() + p + 46, buf.begin() + p + 46 + name_len);
    require(method == 0, "checkpoint: member " + name + " is compressed");

    require(local_off + 30 <= buf.size(), "checkpoint: bad member offset");
    uint16_t lname = get_u16(buf.data() + local_off + 26);
    uint16_t lextra = get_u16(buf.data() + local_off + 28);
    size_t data_off = local_off + 30 + lname + lextra;
    require(data_off + size <= buf.size(), "checkpoint: truncated member " + name);

    ZipMember m;
    m.name = name;
    m.bytes.assign(buf.begin() + data_off, buf.begin() + data_off + size);
    uint32_t actual = uint32_t(
        crc32(0, m.bytes.empty() ? Z_NULL : m.bytes.data(), uInt(m.bytes.size())));
    require(actual == crc, "checkpoint: CRC mismatch in " + name);
    members.push_back(std::move(m));
    p += 46u + name_len + extra_len + comment_len;
  }
  return members;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<NamedTensor>& tensors,
                     const std::string& config_json) {
  std::vector<ZipMember> members;
  nlohmann::ordered_json manifest;
  manifest["format"] = "rvit-checkpoint-v1";
  manifest["config"] = nlohmann::json::parse(
      config_json.empty() ? std::string("{}") : config_json);
  auto& list = manifest["tensors"] = nlohmann::ordered_json::array();
  for (const auto& t : tensors) {
    list.push_back({{"name", t.name}, {"shape", t.array.shape}});
  }
  std::string mtext = manifest.dump(2);
  members.push_back({"manifest.json", {mtext.begin(), mtext.end()}});
  for (const auto& t : tensors) {
    members.push_back({t.name + ".npy", npy_encode(t.array)});
  }
  write_zip(path, members);
}

std::pair<std::vector<NamedTensor>, std::string> load_checkpoint(
    const std::string& path) {
  auto members = read_zip(path);
  std::string config;
  std::vector<std::string> order;
  for (const auto& m : members) {
    if (m.name == "manifest.json") {
      auto j = nlohmann::json::parse(std::string(m.bytes.begin(), m.bytes.end()));
      config = j.at("config").dump();
      for (const auto& t : j.at("tensors")) order.push_back(t.at("name"));
    }
  }
  require(!order.empty() || members.size() <= 1,
          "checkpoint: missing manifest.json");
  std::vector<NamedTensor> tensors;
  for (const auto& name : order) {
    bool found = false;
    for (const auto& m : members) {
      if (m.name == name + ".npy") {
        tensors.push_back({name, npy_decode(m.bytes)});
        found = true;
        break;
      }
    }
    require(found, "checkpoint: manifest names missing member " + name);
  }
  return {std::move(tensors), config};
}

}  // namespace rvit
