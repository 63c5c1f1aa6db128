#include "v2r/registry.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "v2r/clock.hpp"

namespace v2r {

using nlohmann::json;

const char* task_name(ModelTask t) {
  switch (t) {
    case ModelTask::embedding: return "embedding";
    case ModelTask::detection: return "detection";
    case ModelTask::classification: return "classification";
    case ModelTask::synthetic: return "synthetic";
  }
  return "embedding";
}

ModelTask task_from_name(const std::string& s) {
  if (s == "embedding") return ModelTask::embedding;
  if (s == "detection") return ModelTask::detection;
  if (s == "classification") return ModelTask::classification;
  if (s == "synthetic") return ModelTask::synthetic;
  raise(Errc::invalid_manifest, "unknown task: " + s);
}

bool valid_model_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string content_hash(std::span<const uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    raise(Errc::storage_failure, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out(len * 2, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xF];
  }
  return out;
}

namespace {

bool valid_hash(const std::string& h) {
  if (h.size() != 64) return false;
  for (char c : h)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

json spec_to_json(const TensorSpec& s) {
  json dims = json::array();
  for (const auto& d : s.dims) {
    if (d.is_batch)
      dims.push_back("batch");
    else
      dims.push_back(d.size);
  }
  return json{{"dtype", dtype_name(s.dtype)}, {"dims", dims}};
}

TensorSpec spec_from_json(const json& j) {
  TensorSpec s;
  s.dtype = dtype_from_name(j.at("dtype").get<std::string>());
  for (const auto& d : j.at("dims")) {
    if (d.is_string()) {
      if (d.get<std::string>() != "batch") throw json::other_error::create(501, "bad dim", &j);
      s.dims.push_back(TensorSpec::batch_dim());
    } else {
      s.dims.push_back(TensorSpec::fixed(d.get<uint32_t>()));
    }
  }
  return s;
}

json manifest_to_json(const ModelManifest& m) {
  return json{{"model_id", m.model_id},
              {"name", m.name},
              {"task", task_name(m.task)},
              {"input_spec", spec_to_json(m.input_spec)},
              {"output_spec", spec_to_json(m.output_spec)},
              {"weight_ref", m.weight_ref},
              {"version", m.version},
              {"registered_at", m.registered_at},
              {"tombstone", m.tombstone}};
}

ModelManifest manifest_from_json(const json& j) {
  ModelManifest m;
  m.model_id = j.at("model_id").get<std::string>();
  m.name = j.at("name").get<std::string>();
  m.task = task_from_name(j.at("task").get<std::string>());
  m.input_spec = spec_from_json(j.at("input_spec"));
  m.output_spec = spec_from_json(j.at("output_spec"));
  m.weight_ref = j.at("weight_ref").get<std::string>();
  m.version = j.at("version").get<uint32_t>();
  m.registered_at = j.at("registered_at").get<uint64_t>();
  m.tombstone = j.at("tombstone").get<bool>();
  return m;
}

}  // namespace

ModelRegistry::ModelRegistry(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_ / "blobs", ec);
  if (ec) raise(Errc::storage_failure, "cannot create registry root: " + ec.message());
  load_catalog();
}

void ModelRegistry::load_catalog() {
  auto path = root_ / "catalog.jsonl";
  std::ifstream in(path);
  if (!in.is_open()) return;  // fresh repository
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records_.push_back(manifest_from_json(json::parse(line)));
    } catch (const std::exception&) {
      // A torn trailing line is expected after a crash; anything else in the
      // middle of the file is worth the same warning.
      std::cerr << "registry: skipping unreadable catalog line " << lineno << "\n";
      ++skipped_;
    }
  }
}

std::filesystem::path ModelRegistry::blob_path(const std::string& hash) const {
  return root_ / "blobs" / hash.substr(0, 2) / hash;
}

void ModelRegistry::append_record(const ModelManifest& m) {
  auto path = root_ / "catalog.jsonl";
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out.is_open()) raise(Errc::storage_failure, "cannot open catalog for append");
  out << manifest_to_json(m).dump() << "\n";
  out.flush();
  if (!out.good()) raise(Errc::storage_failure, "catalog append failed");
}

ModelManifest ModelRegistry::register_model(ModelManifest manifest,
                                            std::optional<std::span<const uint8_t>> weights) {
  if (!valid_model_id(manifest.model_id))
    raise(Errc::invalid_manifest, "model_id must match [a-z0-9_-]{1,64}");
  manifest.input_spec.validate();
  manifest.output_spec.validate();
  if (manifest.tombstone) raise(Errc::invalid_manifest, "cannot register a tombstone");

  std::unique_lock lock(mu_);

  // (model_id, version) stays unique across the whole catalog, so tombstoned
  // versions still count toward the prior.
  uint32_t prior = 0;
  for (const auto& r : records_)
    if (r.model_id == manifest.model_id) prior = std::max(prior, r.version);
  if (manifest.version == 0) {
    manifest.version = prior + 1;
  } else if (manifest.version <= prior) {
    raise(Errc::duplicate_version, manifest.model_id + " version " +
                                       std::to_string(manifest.version) + " already present");
  } else if (manifest.version != prior + 1) {
    raise(Errc::invalid_manifest, "versions must be gapless; next is " + std::to_string(prior + 1));
  }

  if (weights.has_value()) {
    manifest.weight_ref = content_hash(*weights);
    auto path = blob_path(manifest.weight_ref);
    if (!std::filesystem::exists(path)) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
      if (ec) raise(Errc::storage_failure, "blob dir: " + ec.message());
      auto tmp = path;
      tmp += ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out.is_open()) raise(Errc::storage_failure, "cannot write blob");
        out.write(reinterpret_cast<const char*>(weights->data()),
                  static_cast<std::streamsize>(weights->size()));
        if (!out.good()) raise(Errc::storage_failure, "blob write failed");
      }
      std::filesystem::rename(tmp, path, ec);
      if (ec) raise(Errc::storage_failure, "blob rename: " + ec.message());
    }
  } else {
    manifest.weight_ref.clear();
  }

  manifest.registered_at = utc_now_ms();
  append_record(manifest);
  records_.push_back(manifest);
  return manifest;
}

ModelManifest ModelRegistry::get_model(const std::string& model_id,
                                       std::optional<uint32_t> version) const {
  std::shared_lock lock(mu_);
  // Replay records in order; a tombstone hides its (id, version).
  std::map<uint32_t, const ModelManifest*> live;
  for (const auto& r : records_) {
    if (r.model_id != model_id) continue;
    if (r.tombstone)
      live.erase(r.version);
    else
      live[r.version] = &r;
  }
  if (version.has_value()) {
    auto it = live.find(*version);
    if (it == live.end()) raise(Errc::not_found, "no such model version: " + model_id);
    return *it->second;
  }
  if (live.empty()) raise(Errc::not_found, "no such model: " + model_id);
  return *live.rbegin()->second;
}

std::vector<uint8_t> ModelRegistry::fetch_weights(const std::string& weight_ref) const {
  if (!valid_hash(weight_ref)) raise(Errc::invalid_argument, "weight_ref must be 64 hex chars");
  auto path = blob_path(weight_ref);
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) raise(Errc::not_found, "no blob " + weight_ref);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (content_hash(bytes) != weight_ref)
    raise(Errc::corrupt_blob, "blob " + weight_ref + " fails hash verification");
  return bytes;
}

void ModelRegistry::remove_model(const std::string& model_id, uint32_t version) {
  std::unique_lock lock(mu_);
  const ModelManifest* found = nullptr;
  for (const auto& r : records_) {
    if (r.model_id == model_id && r.version == version) found = r.tombstone ? nullptr : &r;
  }
  if (found == nullptr) raise(Errc::not_found, "no such model version");
  ModelManifest tomb = *found;
  tomb.tombstone = true;
  tomb.registered_at = utc_now_ms();
  append_record(tomb);
  records_.push_back(tomb);
}

std::vector<ModelManifest> ModelRegistry::list() const {
  std::shared_lock lock(mu_);
  std::vector<ModelManifest> out;
  for (const auto& r : records_) {
    if (r.tombstone) {
      std::erase_if(out, [&](const ModelManifest& m) {
        return m.model_id == r.model_id && m.version == r.version;
      });
    } else {
      out.push_back(r);
    }
  }
  return out;
}

size_t ModelRegistry::record_count() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

size_t ModelRegistry::skipped_lines() const {
  std::shared_lock lock(mu_);
  return skipped_;
}

}  // namespace v2r
