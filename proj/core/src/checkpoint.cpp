// Copyright 2026 The ttfsnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ttfs/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "ttfs/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace ttfs {
namespace {

constexpr char kMagic[8] = {'T', 'T', 'F', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kKindSnn = 0;
constexpr std::uint8_t kKindAnn = 1;

std::uint32_t crc32(const std::uint8_t* data, std::size_t size) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      }
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i) {
    crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

class Writer {
 public:
  template <typename T>
  void put(const T& value) {
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(&value);
    buffer_.insert(buffer_.end(), bytes, bytes + sizeof(T));
  }
  void put_vector(const Vector& v) {
    put<std::uint64_t>(v.size());
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(v.data());
    buffer_.insert(buffer_.end(), bytes, bytes + v.size() * sizeof(double));
  }
  void put_matrix(const DenseMatrix& m) {
    put<std::uint32_t>(static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(static_cast<std::uint32_t>(m.cols()));
    const auto* bytes =
        reinterpret_cast<const std::uint8_t*>(m.data().data());
    buffer_.insert(buffer_.end(), bytes, bytes + m.size() * sizeof(double));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    buffer_.insert(buffer_.end(), s.begin(), s.end());
  }
  const std::vector<std::uint8_t>& buffer() const { return buffer_; }

 private:
  std::vector<std::uint8_t> buffer_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size)
      : data_(data), size_(size) {}

  template <typename T>
  T get() {
    T value;
    need(sizeof(T));
    std::memcpy(&value, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  Vector get_vector() {
    const std::uint64_t n = get<std::uint64_t>();
    need(n * sizeof(double));
    Vector v(n);
    std::memcpy(v.data(), data_ + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  DenseMatrix get_matrix() {
    const std::uint32_t rows = get<std::uint32_t>();
    const std::uint32_t cols = get<std::uint32_t>();
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    need(n * sizeof(double));
    std::vector<double> data(n);
    std::memcpy(data.data(), data_ + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return DenseMatrix(rows, cols, std::move(data));
  }
  std::string get_string() {
    const std::uint64_t n = get<std::uint64_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == size_; }

 private:
  void need(std::size_t bytes) {
    if (pos_ + bytes > size_) {
      throw FormatError("checkpoint truncated");
    }
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void put_gradient_set(Writer& w, const GradientSet& g) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.weight_grads.size()));
  for (std::size_t n = 0; n < g.weight_grads.size(); ++n) {
    w.put_matrix(g.weight_grads[n]);
    w.put_vector(g.shift_grads[n]);
  }
  w.put_matrix(g.output_weight_grad);
}

GradientSet get_gradient_set(Reader& r) {
  GradientSet g;
  const std::uint32_t layers = r.get<std::uint32_t>();
  g.weight_grads.reserve(layers);
  g.shift_grads.reserve(layers);
  for (std::uint32_t n = 0; n < layers; ++n) {
    g.weight_grads.push_back(r.get_matrix());
    g.shift_grads.push_back(r.get_vector());
  }
  g.output_weight_grad = r.get_matrix();
  return g;
}

void write_file(const std::string& path, std::uint8_t kind,
                const Writer& payload) {
  Writer framed;
  framed.put<std::uint32_t>(kVersion);
  framed.put<std::uint8_t>(kind);
  std::vector<std::uint8_t> body = framed.buffer();
  body.insert(body.end(), payload.buffer().begin(), payload.buffer().end());
  const std::uint32_t checksum = crc32(body.data(), body.size());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(body.data()),
            static_cast<std::streamsize>(body.size()));
  out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
  if (!out) throw FormatError("write failed: " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path,
                                    std::uint8_t expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path);
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (raw.size() < sizeof(kMagic) + 5 + sizeof(std::uint32_t)) {
    throw FormatError("checkpoint truncated: " + path);
  }
  if (std::memcmp(raw.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a checkpoint file: " + path);
  }
  const std::size_t body_size = raw.size() - sizeof(kMagic) - sizeof(std::uint32_t);
  const std::uint8_t* body = raw.data() + sizeof(kMagic);
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, raw.data() + raw.size() - sizeof(std::uint32_t),
              sizeof(stored_crc));
  if (crc32(body, body_size) != stored_crc) {
    throw FormatError("checkpoint checksum mismatch: " + path);
  }
  Reader header(body, body_size);
  const std::uint32_t version = header.get<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kVersion) + ")");
  }
  const std::uint8_t kind = header.get<std::uint8_t>();
  if (kind != expected_kind) {
    throw FormatError("checkpoint kind mismatch in " + path);
  }
  return std::vector<std::uint8_t>(body + 5, body + body_size);
}

}  // namespace

void save_checkpoint(const Network& net, const std::string& path,
                     const CheckpointExtras* extras) {
  Writer w;
  w.put<double>(net.config.tau_c);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(net.depth()));
  for (const SnnLayer& layer : net.layers) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(layer.alpha_policy));
    w.put_matrix(layer.weights);
    w.put_vector(layer.threshold_shift);
    w.put_vector(layer.base_threshold);
    w.put_vector(layer.alpha);
    w.put<double>(layer.t_min);
    w.put<double>(layer.t_max);
  }
  w.put_matrix(net.output.weights);
  w.put_vector(net.output.alpha);
  w.put<double>(net.output.t_min);
  w.put<double>(net.output.t_read);

  w.put<std::uint8_t>(extras != nullptr ? 1 : 0);
  if (extras != nullptr) {
    w.put<std::uint8_t>(extras->adam.has_value() ? 1 : 0);
    if (extras->adam.has_value()) {
      put_gradient_set(w, extras->adam->first_moment);
      put_gradient_set(w, extras->adam->second_moment);
      w.put<std::int64_t>(extras->adam->step);
    }
    w.put_string(extras->rng_state);
    w.put<std::int64_t>(extras->iteration);
  }
  write_file(path, kKindSnn, w);
}

Network load_checkpoint(const std::string& path, CheckpointExtras* extras) {
  const std::vector<std::uint8_t> payload = read_file(path, kKindSnn);
  Reader r(payload.data(), payload.size());
  Network net;
  net.config.tau_c = r.get<double>();
  const std::uint32_t depth = r.get<std::uint32_t>();
  net.layers.resize(depth);
  for (std::uint32_t n = 0; n < depth; ++n) {
    SnnLayer& layer = net.layers[n];
    layer.alpha_policy = static_cast<AlphaPolicy>(r.get<std::uint8_t>());
    layer.weights = r.get_matrix();
    layer.threshold_shift = r.get_vector();
    layer.base_threshold = r.get_vector();
    layer.alpha = r.get_vector();
    layer.t_min = r.get<double>();
    layer.t_max = r.get<double>();
  }
  net.output.weights = r.get_matrix();
  net.output.alpha = r.get_vector();
  net.output.t_min = r.get<double>();
  net.output.t_read = r.get<double>();

  const std::uint8_t has_extras = r.get<std::uint8_t>();
  if (has_extras) {
    CheckpointExtras parsed;
    if (r.get<std::uint8_t>()) {
      AdamState adam;
      adam.first_moment = get_gradient_set(r);
      adam.second_moment = get_gradient_set(r);
      adam.step = r.get<std::int64_t>();
      parsed.adam = std::move(adam);
    }
    parsed.rng_state = r.get_string();
    parsed.iteration = r.get<std::int64_t>();
    if (extras != nullptr) *extras = std::move(parsed);
  } else if (extras != nullptr) {
    *extras = CheckpointExtras{};
  }
  if (!r.done()) throw FormatError("trailing bytes in checkpoint: " + path);
  return net;
}

void save_ann_checkpoint(const AnnNetwork& ann, const std::string& path) {
  Writer w;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ann.depth()));
  for (const AnnLayer& layer : ann.hidden) {
    w.put_matrix(layer.weights);
    w.put_vector(layer.biases);
  }
  w.put_matrix(ann.output.weights);
  w.put_vector(ann.output.biases);
  write_file(path, kKindAnn, w);
}

CheckpointKind peek_checkpoint_kind(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path);
  char header[13];
  if (!in.read(header, sizeof(header))) {
    throw FormatError("checkpoint truncated: " + path);
  }
  if (std::memcmp(header, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a checkpoint file: " + path);
  }
  const std::uint8_t kind = static_cast<std::uint8_t>(header[12]);
  if (kind != kKindSnn && kind != kKindAnn) {
    throw FormatError("unknown checkpoint kind in " + path);
  }
  return static_cast<CheckpointKind>(kind);
}

AnnNetwork load_ann_checkpoint(const std::string& path) {
  const std::vector<std::uint8_t> payload = read_file(path, kKindAnn);
  Reader r(payload.data(), payload.size());
  AnnNetwork ann;
  const std::uint32_t depth = r.get<std::uint32_t>();
  ann.hidden.resize(depth);
  for (std::uint32_t n = 0; n < depth; ++n) {
    ann.hidden[n].weights = r.get_matrix();
    ann.hidden[n].biases = r.get_vector();
  }
  ann.output.weights = r.get_matrix();
  ann.output.biases = r.get_vector();
  if (!r.done()) throw FormatError("trailing bytes in checkpoint: " + path);
  return ann;
}

}  // namespace ttfs
