// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "copygen/error.hpp"

namespace copygen::model {

using nlohmann::json;

std::string config_to_json(const ModelConfig& c) {
  json j = {{"vocab_size", c.vocab_size},         {"d_model", c.d_model},
            {"heads", c.heads},                   {"encoder_layers", c.encoder_layers},
            {"decoder_layers", c.decoder_layers}, {"ff_width", c.ff_width},
            {"max_positions", c.max_positions},   {"dropout", c.dropout},
            {"pointer", c.pointer}};
  return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    ModelConfig c;
    c.vocab_size = j.at("vocab_size").get<std::size_t>();
    c.d_model = j.at("d_model").get<std::size_t>();
    c.heads = j.at("heads").get<std::size_t>();
    c.encoder_layers = j.at("encoder_layers").get<std::size_t>();
    c.decoder_layers = j.at("decoder_layers").get<std::size_t>();
    c.ff_width = j.at("ff_width").get<std::size_t>();
    c.max_positions = j.at("max_positions").get<std::size_t>();
    c.dropout = j.value("dropout", 0.0);
    c.pointer = j.value("pointer", true);
    c.validate();
    return c;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("config_error", e.what());
  }
}

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'A', 'P', 'C', 'G'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  std::vector<char>& buffer() { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<char>& buf, std::size_t end) : buf_(buf), end_(end) {}
  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  const char* take(std::size_t n) {
    if (n > end_ - pos_) throw Error("incompatible_checkpoint", "checkpoint truncated");
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::vector<char>& buf_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot read " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

std::string hex(std::uint32_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(8) << std::setfill('0') << v;
  return os.str();
}

// Validates framing and returns the stored checksum.
std::uint32_t verify(const std::vector<char>& buf) {
  if (buf.size() < 4 + 4 + 4 || std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw Error("incompatible_checkpoint", "missing APCG magic");
  }
  std::uint32_t version;
  std::memcpy(&version, buf.data() + 4, 4);
  if (version != kCheckpointVersion) {
    throw Error("incompatible_checkpoint", "unsupported format version " + std::to_string(version));
  }
  std::uint32_t stored;
  std::memcpy(&stored, buf.data() + buf.size() - 4, 4);
  if (crc_of(buf.data(), buf.size() - 4) != stored) throw Error("incompatible_checkpoint", "checksum mismatch");
  return stored;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path, StoredPrecision precision) {
  Writer w;
  w.bytes(kMagic, 4);
  w.put<std::uint32_t>(kCheckpointVersion);
  const auto header = config_to_json(params.config());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(header.size()));
  w.bytes(header.data(), header.size());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.names().size()));
  for (std::size_t i = 0; i < params.names().size(); ++i) {
    const auto& name = params.names()[i];
    const auto& t = params.tensors()[i];
    w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.put<std::uint8_t>(static_cast<std::uint8_t>(precision));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) w.put<std::uint64_t>(e);
    for (double x : t.data()) {
      if (precision == StoredPrecision::f64)
        w.put<double>(x);
      else
        w.put<float>(static_cast<float>(x));
    }
  }
  auto& buf = w.buffer();
  const auto crc = crc_of(buf.data(), buf.size());
  w.put<std::uint32_t>(crc);

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io_error", "cannot write " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("io_error", "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ModelParams load_checkpoint(const std::filesystem::path& path, std::optional<std::size_t> expected_vocab_size) {
  const auto buf = read_file(path);
  verify(buf);
  Reader r(buf, buf.size() - 4);
  r.take(8);
  const auto header_len = r.get<std::uint32_t>();
  const char* header = r.take(header_len);
  ModelConfig config;
  try {
    config = config_from_json(std::string(header, header_len));
  } catch (const Error& e) {
    throw Error("incompatible_checkpoint", std::string("bad header: ") + e.what());
  }
  if (expected_vocab_size && *expected_vocab_size != config.vocab_size) {
    throw Error("vocab_mismatch", "checkpoint vocabulary has " + std::to_string(config.vocab_size) +
                                      " entries, current vocabulary has " + std::to_string(*expected_vocab_size));
  }
  const auto count = r.get<std::uint32_t>();
  std::vector<std::pair<std::string, Tensor>> named;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.get<std::uint32_t>();
    std::string name(r.take(name_len), name_len);
    const auto dtype = r.get<std::uint8_t>();
    if (dtype != 1 && dtype != 2) throw Error("incompatible_checkpoint", "unknown dtype tag " + std::to_string(dtype));
    const auto rank = r.get<std::uint32_t>();
    numerics::Shape shape;
    std::size_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
      n *= shape.back();
    }
    std::vector<double> values(n);
    for (auto& x : values) x = dtype == 1 ? r.get<double>() : static_cast<double>(r.get<float>());
    try {
      named.emplace_back(std::move(name), Tensor(std::move(shape), std::move(values)));
    } catch (const Error& e) {
      throw Error("incompatible_checkpoint", e.what());
    }
  }
  if (!r.done()) throw Error("incompatible_checkpoint", "trailing bytes after tensors");
  return ModelParams::from_named(config, std::move(named));
}

std::filesystem::path vocab_path_for(const std::filesystem::path& checkpoint_path) {
  auto p = checkpoint_path;
  p.replace_extension(".vocab");
  return p;
}

std::string checkpoint_version(const std::filesystem::path& path) { return hex(verify(read_file(path))); }

void save_model(const ModelParams& params, const corpus::Vocab& vocab, const std::filesystem::path& checkpoint_path) {
  if (vocab.size() != params.config().vocab_size) {
    throw Error("vocab_mismatch", "vocabulary size differs from model configuration");
  }
  vocab.save(vocab_path_for(checkpoint_path));
  save_checkpoint(params, checkpoint_path);
}

LoadedModel load_model(const std::filesystem::path& checkpoint_path) {
  auto vocab = corpus::Vocab::load(vocab_path_for(checkpoint_path));
  auto params = load_checkpoint(checkpoint_path, vocab.size());
  return LoadedModel{std::move(params), std::move(vocab), checkpoint_version(checkpoint_path)};
}

}  // namespace copygen::model
