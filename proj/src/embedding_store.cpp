/*
 * Copyright (c) 2026, The lwgnn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lwgnn/embedding_store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "binary_io.hpp"
#include "lwgnn/error.hpp"

namespace lwgnn {

namespace {

constexpr char kFeatureMagic[] = "DGIF";
constexpr std::uint32_t kFeatureVersion = 1;
constexpr std::size_t kFeatureHeaderBytes = 4 + 4 + 8 + 4;

std::vector<std::uint8_t> feature_header(std::uint64_t rows, std::uint64_t dim) {
  io::ByteWriter w;
  w.magic(kFeatureMagic);
  w.u32(kFeatureVersion);
  w.u64(rows);
  w.u32(static_cast<std::uint32_t>(dim));
  return w.bytes();
}

std::string errno_text() { return std::strerror(errno); }

}  // namespace

class RowBackend {
 public:
  virtual ~RowBackend() = default;
  virtual Backing kind() const = 0;
  virtual void read(std::uint64_t offset, std::span<float> out) const = 0;
  virtual void write(std::uint64_t offset, std::span<const float> values) = 0;
};

namespace {

class MemoryRows final : public RowBackend {
 public:
  explicit MemoryRows(std::vector<float> values) : values_(std::move(values)) {}
  Backing kind() const override { return Backing::kMemory; }
  void read(std::uint64_t offset, std::span<float> out) const override {
    std::memcpy(out.data(), values_.data() + offset, out.size_bytes());
  }
  void write(std::uint64_t offset, std::span<const float> values) override {
    std::memcpy(values_.data() + offset, values.data(), values.size_bytes());
  }

 private:
  std::vector<float> values_;
};

class FileRows final : public RowBackend {
 public:
  FileRows(int fd, std::string path) : fd_(fd), path_(std::move(path)) {}
  ~FileRows() override { ::close(fd_); }
  FileRows(const FileRows&) = delete;
  FileRows& operator=(const FileRows&) = delete;

  Backing kind() const override { return Backing::kFile; }

  void read(std::uint64_t offset, std::span<float> out) const override {
    auto* dst = reinterpret_cast<char*>(out.data());
    std::size_t left = out.size_bytes();
    off_t at = static_cast<off_t>(kFeatureHeaderBytes + offset * sizeof(float));
    while (left > 0) {
      const ssize_t got = ::pread(fd_, dst, left, at);
      if (got < 0 && errno == EINTR) continue;
      if (got <= 0) fail(ErrorKind::kIo, "pread failed on " + path_ + ": " + (got == 0 ? "short file" : errno_text()));
      dst += got;
      at += got;
      left -= static_cast<std::size_t>(got);
    }
  }

  void write(std::uint64_t offset, std::span<const float> values) override {
    const auto* src = reinterpret_cast<const char*>(values.data());
    std::size_t left = values.size_bytes();
    off_t at = static_cast<off_t>(kFeatureHeaderBytes + offset * sizeof(float));
    while (left > 0) {
      const ssize_t put = ::pwrite(fd_, src, left, at);
      if (put < 0 && errno == EINTR) continue;
      if (put <= 0) fail(ErrorKind::kIo, "pwrite failed on " + path_ + ": " + errno_text());
      src += put;
      at += put;
      left -= static_cast<std::size_t>(put);
    }
  }

 private:
  int fd_;
  std::string path_;
};

}  // namespace

EmbeddingStore::EmbeddingStore() : backend_(std::make_unique<MemoryRows>(std::vector<float>{})) {}
EmbeddingStore::EmbeddingStore(EmbeddingStore&&) noexcept = default;
EmbeddingStore& EmbeddingStore::operator=(EmbeddingStore&&) noexcept = default;
EmbeddingStore::~EmbeddingStore() = default;

EmbeddingStore::EmbeddingStore(std::uint64_t rows, std::uint64_t dim, std::unique_ptr<RowBackend> backend)
    : rows_(rows), dim_(dim), backend_(std::move(backend)) {}

EmbeddingStore EmbeddingStore::create(std::uint64_t rows, std::uint64_t dim, Backing backing,
                                      const std::optional<std::filesystem::path>& path, const StoreOptions& options) {
  if (dim > UINT32_MAX) fail(ErrorKind::kConfig, "embedding dim " + std::to_string(dim) + " exceeds u32");
  const unsigned __int128 bytes = static_cast<unsigned __int128>(rows) * dim * sizeof(float);
  if (bytes > options.capacity_bytes) {
    fail(ErrorKind::kCapacity, "store of " + std::to_string(rows) + "x" + std::to_string(dim) +
                                   " exceeds external-store capacity of " + std::to_string(options.capacity_bytes) + " bytes");
  }
  if (backing == Backing::kMemory) {
    return EmbeddingStore(rows, dim, std::make_unique<MemoryRows>(std::vector<float>(rows * dim, 0.0f)));
  }
  if (!path) fail(ErrorKind::kConfig, "file-backed store requires a path");
  const int fd = ::open(path->c_str(), O_RDWR | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail(ErrorKind::kIo, "cannot create " + path->string() + ": " + errno_text());
  auto backend = std::make_unique<FileRows>(fd, path->string());
  const auto header = feature_header(rows, dim);
  if (::pwrite(fd, header.data(), header.size(), 0) != static_cast<ssize_t>(header.size()) ||
      ::ftruncate(fd, static_cast<off_t>(kFeatureHeaderBytes + rows * dim * sizeof(float))) != 0) {
    fail(ErrorKind::kIo, "cannot initialize " + path->string() + ": " + errno_text());
  }
  return EmbeddingStore(rows, dim, std::move(backend));
}

EmbeddingStore EmbeddingStore::open(const std::filesystem::path& path, Backing backing) {
  if (backing == Backing::kMemory) return from_matrix(decode_features(io::read_file(path), path.string()));

  const int fd = ::open(path.c_str(), O_RDWR | O_CLOEXEC);
  if (fd < 0) fail(ErrorKind::kIo, "cannot open " + path.string() + ": " + errno_text());
  auto backend = std::make_unique<FileRows>(fd, path.string());
  std::uint8_t raw[kFeatureHeaderBytes];
  if (::pread(fd, raw, sizeof raw, 0) != static_cast<ssize_t>(sizeof raw)) {
    fail(ErrorKind::kFormat, path.string() + ": offset 0: truncated feature header");
  }
  io::ByteReader r(raw, path.string());
  r.expect_magic(kFeatureMagic);
  if (const auto version = r.u32("version"); version != kFeatureVersion) {
    r.fail_at(4, "unsupported version " + std::to_string(version));
  }
  const std::uint64_t rows = r.u64("num_rows");
  const std::uint64_t dim = r.u32("dim");
  struct stat st {};
  if (::fstat(fd, &st) != 0) fail(ErrorKind::kIo, "cannot stat " + path.string());
  const unsigned __int128 expect = kFeatureHeaderBytes + static_cast<unsigned __int128>(rows) * dim * sizeof(float);
  if (static_cast<unsigned __int128>(st.st_size) != expect) {
    fail(ErrorKind::kFormat, path.string() + ": offset " + std::to_string(kFeatureHeaderBytes) + ": file size " +
                                 std::to_string(st.st_size) + " does not match " + std::to_string(rows) + "x" +
                                 std::to_string(dim) + " rows");
  }
  return EmbeddingStore(rows, dim, std::move(backend));
}

EmbeddingStore EmbeddingStore::from_matrix(const DenseMat& m) {
  return EmbeddingStore(m.rows(), m.cols(),
                        std::make_unique<MemoryRows>(std::vector<float>(m.values().begin(), m.values().end())));
}

Backing EmbeddingStore::backing() const { return backend_->kind(); }

void EmbeddingStore::check_row(NodeId v, std::size_t width) const {
  if (v >= rows_) fail(ErrorKind::kBounds, "row " + std::to_string(v) + " out of range for " + std::to_string(rows_) + " rows");
  if (width != dim_) fail(ErrorKind::kShape, "row width " + std::to_string(width) + " != store dim " + std::to_string(dim_));
}

void EmbeddingStore::read_row(NodeId v, std::span<float> out) const {
  check_row(v, out.size());
  backend_->read(v * dim_, out);
}

void EmbeddingStore::write_row(NodeId v, std::span<const float> values) {
  check_row(v, values.size());
  backend_->write(v * dim_, values);
}

DenseMat EmbeddingStore::gather_rows(std::span<const NodeId> ids) const {
  DenseMat out(ids.size(), dim_);
  for (std::size_t k = 0; k < ids.size(); ++k) read_row(ids[k], out.row(k));
  return out;
}

DenseMat EmbeddingStore::to_matrix() const {
  DenseMat out(rows_, dim_);
  if (rows_ * dim_ > 0) backend_->read(0, out.values());
  return out;
}

void EmbeddingStore::save(const std::filesystem::path& path) const { io::write_file(path, encode_features(to_matrix())); }

std::vector<std::uint8_t> encode_features(const DenseMat& m) {
  io::ByteWriter w;
  for (auto b : feature_header(m.rows(), m.cols())) w.u8(b);
  w.array(m.values());
  return w.bytes();
}

DenseMat decode_features(std::span<const std::uint8_t> bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  r.expect_magic(kFeatureMagic);
  if (const auto version = r.u32("version"); version != kFeatureVersion) {
    r.fail_at(4, "unsupported version " + std::to_string(version));
  }
  const std::uint64_t rows = r.u64("num_rows");
  const std::uint64_t dim = r.u32("dim");
  if (dim != 0 && rows > UINT64_MAX / dim) r.fail_at(8, "rows x dim overflows");
  auto values = r.array<float>(rows * dim, "feature rows");
  r.expect_end();
  return DenseMat(rows, dim, std::move(values));
}

}  // namespace lwgnn
