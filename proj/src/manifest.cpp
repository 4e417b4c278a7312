#include "emotesent/manifest.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "emotesent/error.hpp"
#include "io_util.hpp"

namespace emotesent {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialization failed");
    }
  }

  void update(const void* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_.get(), data, size) != 1) throw Error("SHA-256 update failed");
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), digest.data(), &length) != 1) {
      throw Error("SHA-256 finalization failed");
    }
    std::string out;
    out.reserve(length * 2);
    constexpr char digits[] = "0123456789abcdef";
    for (unsigned int i = 0; i < length; ++i) {
      out.push_back(digits[digest[i] >> 4]);
      out.push_back(digits[digest[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return h.hex();
}

void Manifest::add_input(const std::filesystem::path& path) {
  inputs[path.string()] = sha256_file(path);
}

void Manifest::add_output(const std::filesystem::path& dir, const std::string& name) {
  outputs[name] = sha256_file(dir / name);
}

nlohmann::json Manifest::to_json() const {
  return {{"tool", tool},     {"version", version}, {"command", command}, {"seed", seed},
          {"config", config}, {"inputs", inputs},   {"outputs", outputs}};
}

Manifest Manifest::from_json(const nlohmann::json& doc) {
  try {
    Manifest m;
    m.tool = doc.at("tool").get<std::string>();
    m.version = doc.at("version").get<std::string>();
    m.command = doc.value("command", "");
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.config = doc.value("config", nlohmann::json::object());
    m.inputs = doc.value("inputs", std::map<std::string, std::string>{});
    m.outputs = doc.value("outputs", std::map<std::string, std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << manifest.to_json().dump(2) << '\n';
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

Manifest read_manifest(const std::filesystem::path& path) {
  const auto doc = nlohmann::json::parse(detail::read_file(path), nullptr, false);
  if (doc.is_discarded()) throw FormatError("manifest '" + path.string() + "' is not JSON");
  return Manifest::from_json(doc);
}

ManifestCheck verify_manifest(const Manifest& manifest, const std::filesystem::path& output_dir) {
  ManifestCheck check;
  auto compare = [&](const std::filesystem::path& path, const std::string& expected,
                     const std::string& name) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      check.missing.push_back(name);
      return;
    }
    if (sha256_file(path) != expected) check.mismatched.push_back(name);
  };
  for (const auto& [path, hash] : manifest.inputs) compare(path, hash, path);
  for (const auto& [name, hash] : manifest.outputs) compare(output_dir / name, hash, name);
  return check;
}

}  // namespace emotesent
