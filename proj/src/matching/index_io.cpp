// HYIX / HYFV persistence. Both are little-endian with the same per-item
// record layout (id u64, dim f32 values); HYIX carries metric and count,
// HYFV is an append-only sink whose count is derived from the file size.

#include <cstring>
#include <fstream>

#include "v2r/bytes.hpp"
#include "v2r/matching.hpp"

namespace v2r {

namespace {

constexpr char kIndexMagic[4] = {'H', 'Y', 'I', 'X'};
constexpr char kFeatureMagic[4] = {'H', 'Y', 'F', 'V'};
constexpr uint16_t kVersion = 1;
constexpr size_t kIndexHeaderBytes = 4 + 2 + 1 + 4 + 8;
constexpr size_t kFeatureHeaderBytes = 4 + 2 + 4;

std::vector<uint8_t> read_exact(std::ifstream& in, size_t n, Errc on_short, const char* what) {
  std::vector<uint8_t> buf(n);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) < n) raise(on_short, what);
  return buf;
}

}  // namespace

void FlatIndex::save(const std::filesystem::path& path) const {
  auto s = snapshot();
  ByteWriter w;
  w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(kIndexMagic), 4));
  w.u16(kVersion);
  w.u8(static_cast<uint8_t>(metric_));
  w.u32(dim_);
  w.u64(s->ids.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) raise(Errc::io_error, "cannot write index " + path.string());
  out.write(reinterpret_cast<const char*>(w.buffer().data()),
            static_cast<std::streamsize>(w.size()));
  for (size_t i = 0; i < s->ids.size(); ++i) {
    ByteWriter rec;
    rec.u64(s->ids[i]);
    for (uint32_t c = 0; c < dim_; ++c) rec.f32(s->values[i * dim_ + c]);
    out.write(reinterpret_cast<const char*>(rec.buffer().data()),
              static_cast<std::streamsize>(rec.size()));
  }
  if (!out.good()) raise(Errc::io_error, "index write failed");
}

FlatIndex FlatIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) raise(Errc::io_error, "cannot open index " + path.string());

  auto header = read_exact(in, kIndexHeaderBytes, Errc::truncated_index, "index header truncated");
  if (std::memcmp(header.data(), kIndexMagic, 4) != 0) raise(Errc::bad_magic, "not an HYIX file");
  ByteReader r(std::span<const uint8_t>(header).subspan(4));
  uint16_t version = r.u16();
  if (version != kVersion)
    raise(Errc::version_mismatch, "HYIX version " + std::to_string(version));
  uint8_t metric = r.u8();
  if (metric > 1) raise(Errc::version_mismatch, "unknown metric code");
  uint32_t dim = r.u32();
  uint64_t count = r.u64();
  if (dim < 1) raise(Errc::bad_dimensions, "index dim must be >= 1");

  FlatIndex index(dim, static_cast<Metric>(metric));
  auto store = std::make_shared<Store>();
  store->ids.reserve(count);
  store->values.reserve(count * dim);
  const size_t rec_bytes = 8 + static_cast<size_t>(dim) * 4;
  for (uint64_t i = 0; i < count; ++i) {
    auto rec = read_exact(in, rec_bytes, Errc::truncated_index,
                          ("index truncated at item " + std::to_string(i)).c_str());
    ByteReader rr(rec);
    uint64_t id = rr.u64();
    if (!store->id_set.insert(id).second) raise(Errc::duplicate_id, "duplicate id in index file");
    store->ids.push_back(id);
    for (uint32_t c = 0; c < dim; ++c) store->values.push_back(rr.f32());
  }
  index.store_ = std::move(store);
  return index;
}

FeatureFileWriter::FeatureFileWriter(std::filesystem::path path, uint32_t dim)
    : path_(std::move(path)), dim_(dim) {
  if (dim < 1) raise(Errc::bad_dimensions, "feature dim must be >= 1");
  bool exists = std::filesystem::exists(path_) && std::filesystem::file_size(path_) > 0;
  if (exists) {
    std::ifstream in(path_, std::ios::binary);
    auto header =
        read_exact(in, kFeatureHeaderBytes, Errc::truncated_index, "feature header truncated");
    if (std::memcmp(header.data(), kFeatureMagic, 4) != 0)
      raise(Errc::bad_magic, "not an HYFV file");
    ByteReader r(std::span<const uint8_t>(header).subspan(4));
    uint16_t version = r.u16();
    if (version != kVersion)
      raise(Errc::version_mismatch, "HYFV version " + std::to_string(version));
    uint32_t file_dim = r.u32();
    if (file_dim != dim)
      raise(Errc::dim_mismatch, "HYFV dim " + std::to_string(file_dim) + " vs " +
                                    std::to_string(dim));
    out_.open(path_, std::ios::binary | std::ios::app);
  } else {
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (out_.is_open()) {
      ByteWriter w;
      w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(kFeatureMagic), 4));
      w.u16(kVersion);
      w.u32(dim);
      out_.write(reinterpret_cast<const char*>(w.buffer().data()),
                 static_cast<std::streamsize>(w.size()));
    }
  }
  if (!out_.is_open() || !out_.good())
    raise(Errc::io_error, "cannot open feature file " + path_.string());
}

void FeatureFileWriter::append(const FeatureVector& f) {
  if (f.dim() != dim_) raise(Errc::dim_mismatch, "feature dim mismatch on append");
  ByteWriter w;
  w.u64(f.id);
  for (float v : f.values) w.f32(v);
  out_.write(reinterpret_cast<const char*>(w.buffer().data()),
             static_cast<std::streamsize>(w.size()));
  if (!out_.good()) raise(Errc::io_error, "feature append failed");
}

void FeatureFileWriter::flush() { out_.flush(); }

std::vector<FeatureVector> read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) raise(Errc::io_error, "cannot open feature file " + path.string());
  auto header =
      read_exact(in, kFeatureHeaderBytes, Errc::truncated_index, "feature header truncated");
  if (std::memcmp(header.data(), kFeatureMagic, 4) != 0)
    raise(Errc::bad_magic, "not an HYFV file");
  ByteReader r(std::span<const uint8_t>(header).subspan(4));
  uint16_t version = r.u16();
  if (version != kVersion) raise(Errc::version_mismatch, "HYFV version " + std::to_string(version));
  uint32_t dim = r.u32();
  if (dim < 1) raise(Errc::bad_dimensions, "feature dim must be >= 1");

  std::vector<FeatureVector> out;
  const size_t rec_bytes = 8 + static_cast<size_t>(dim) * 4;
  std::vector<uint8_t> rec(rec_bytes);
  while (true) {
    in.read(reinterpret_cast<char*>(rec.data()), static_cast<std::streamsize>(rec_bytes));
    size_t got = static_cast<size_t>(in.gcount());
    if (got == 0) break;
    if (got < rec_bytes)
      raise(Errc::truncated_index, "feature file truncated at record " + std::to_string(out.size()));
    ByteReader rr(rec);
    FeatureVector f;
    f.id = rr.u64();
    f.values.resize(dim);
    for (uint32_t c = 0; c < dim; ++c) f.values[c] = rr.f32();
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace v2r
