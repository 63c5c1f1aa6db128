#include "v2r/frame_stream.hpp"

#include <cstring>
#include <fstream>

#include "v2r/bytes.hpp"

namespace v2r {

namespace {

constexpr char kMagic[4] = {'H', 'Y', 'F', 'R'};
constexpr uint16_t kVersion = 1;
constexpr size_t kHeaderBytes = 4 + 2 + 4 + 4 + 1 + 1 + 4 + 4 + 4;

void validate_header(const FrameStream& s) {
  if (s.width < 1 || s.height < 1) raise(Errc::invalid_argument, "frame dims must be >= 1");
  if (s.channels != 1 && s.channels != 3) raise(Errc::invalid_argument, "channels must be 1 or 3");
  uint8_t expect = s.pix_fmt == PixFmt::gray8 ? 1 : 3;
  if (s.channels != expect) raise(Errc::invalid_argument, "channels inconsistent with pix_fmt");
  if (s.fps_den < 1) raise(Errc::invalid_argument, "fps_den must be >= 1");
}

}  // namespace

FrameStream read_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) raise(Errc::io_error, "cannot open stream " + path.string());

  std::vector<uint8_t> header(kHeaderBytes);
  in.read(reinterpret_cast<char*>(header.data()), kHeaderBytes);
  if (in.gcount() < static_cast<std::streamsize>(kHeaderBytes))
    raise(Errc::truncated_stream, "stream shorter than header");
  if (std::memcmp(header.data(), kMagic, 4) != 0) raise(Errc::bad_magic, "not an HYF stream");

  ByteReader r(std::span<const uint8_t>(header).subspan(4));
  FrameStream s;
  uint16_t version = r.u16();
  if (version != kVersion)
    raise(Errc::unsupported_version, "HYF version " + std::to_string(version));
  s.width = r.u32();
  s.height = r.u32();
  s.channels = r.u8();
  uint8_t fmt = r.u8();
  if (fmt > 1) raise(Errc::invalid_argument, "unknown pix_fmt");
  s.pix_fmt = static_cast<PixFmt>(fmt);
  s.fps_num = r.u32();
  s.fps_den = r.u32();
  s.frame_count = r.u32();
  validate_header(s);

  size_t expect = s.frame_bytes() * s.frame_count;
  s.payload.resize(expect);
  in.read(reinterpret_cast<char*>(s.payload.data()), static_cast<std::streamsize>(expect));
  size_t got = static_cast<size_t>(in.gcount());
  if (got < expect) {
    size_t complete = got / s.frame_bytes();
    raise(Errc::truncated_stream,
          "payload truncated in frame " + std::to_string(complete) + " (" + std::to_string(got) +
              " of " + std::to_string(expect) + " bytes)");
  }
  return s;
}

void write_stream(const std::filesystem::path& path, const FrameStream& stream) {
  validate_header(stream);
  if (stream.payload.size() != stream.frame_bytes() * stream.frame_count)
    raise(Errc::invalid_argument, "payload size does not match frame_count");

  ByteWriter w;
  w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(kMagic), 4));
  w.u16(kVersion);
  w.u32(stream.width);
  w.u32(stream.height);
  w.u8(stream.channels);
  w.u8(static_cast<uint8_t>(stream.pix_fmt));
  w.u32(stream.fps_num);
  w.u32(stream.fps_den);
  w.u32(stream.frame_count);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) raise(Errc::io_error, "cannot write stream " + path.string());
  out.write(reinterpret_cast<const char*>(w.buffer().data()),
            static_cast<std::streamsize>(w.size()));
  out.write(reinterpret_cast<const char*>(stream.payload.data()),
            static_cast<std::streamsize>(stream.payload.size()));
  if (!out.good()) raise(Errc::io_error, "stream write failed");
}

}  // namespace v2r
