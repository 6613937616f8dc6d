#include "vorann/paged_file.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "vorann/error.hpp"

namespace vorann {
namespace {

class MemorySource final : public BlockSource {
 public:
  MemorySource(std::shared_ptr<const FileImage> image, std::uint64_t offset, std::uint32_t size)
      : image_(std::move(image)), offset_(offset), block_size_(size) {}

  void read(std::uint32_t block, std::span<std::uint8_t> out) override {
    const std::uint64_t begin = offset_ + std::uint64_t{block} * block_size_;
    if (begin + block_size_ > image_->size()) {
      throw Error(ErrorCode::CorruptIndex, "block " + std::to_string(block) + " past end of image");
    }
    std::copy_n(image_->data() + begin, block_size_, out.data());
  }

 private:
  std::shared_ptr<const FileImage> image_;
  std::uint64_t offset_;
  std::uint32_t block_size_;
};

class FileSource final : public BlockSource {
 public:
  FileSource(const std::filesystem::path& path, std::uint64_t offset, std::uint32_t size)
      : in_(path, std::ios::binary), path_(path.string()), offset_(offset), block_size_(size) {
    if (!in_) throw Error(ErrorCode::IoFailure, "cannot open " + path_);
  }

  void read(std::uint32_t block, std::span<std::uint8_t> out) override {
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(offset_ + std::uint64_t{block} * block_size_));
    in_.read(reinterpret_cast<char*>(out.data()), block_size_);
    if (in_.gcount() != static_cast<std::streamsize>(block_size_)) {
      throw Error(ErrorCode::CorruptIndex,
                  "short read of block " + std::to_string(block) + " in " + path_);
    }
  }

 private:
  std::ifstream in_;
  std::string path_;
  std::uint64_t offset_;
  std::uint32_t block_size_;
};

}  // namespace

std::unique_ptr<BlockSource> memory_block_source(std::shared_ptr<const FileImage> image,
                                                 std::uint64_t data_offset,
                                                 std::uint32_t block_size) {
  return std::make_unique<MemorySource>(std::move(image), data_offset, block_size);
}

std::unique_ptr<BlockSource> file_block_source(const std::filesystem::path& path,
                                               std::uint64_t data_offset,
                                               std::uint32_t block_size) {
  return std::make_unique<FileSource>(path, data_offset, block_size);
}

PagedFile::PagedFile(std::unique_ptr<BlockSource> source, std::uint32_t block_size,
                     std::uint32_t block_count, std::size_t capacity)
    : source_(std::move(source)),
      block_size_(block_size),
      block_count_(block_count),
      capacity_(capacity),
      scratch_(block_size) {}

std::span<const std::uint8_t> PagedFile::read(std::uint32_t block) {
  if (block >= block_count_) {
    throw Error(ErrorCode::CorruptIndex, "block " + std::to_string(block) + " out of range");
  }
  if (auto it = where_.find(block); it != where_.end()) {
    frames_.splice(frames_.begin(), frames_, it->second);
    return frames_.front().bytes;
  }

  ++ios_;
  if (capacity_ == 0) {
    source_->read(block, scratch_);
    return scratch_;
  }
  if (frames_.size() >= capacity_) {
    // Reuse the evicted frame's storage.
    frames_.splice(frames_.begin(), frames_, std::prev(frames_.end()));
    where_.erase(frames_.front().block);
  } else {
    frames_.push_front(Frame{0, std::vector<std::uint8_t>(block_size_)});
  }
  Frame& frame = frames_.front();
  frame.block = block;
  try {
    source_->read(block, frame.bytes);
  } catch (...) {
    frames_.pop_front();
    throw;
  }
  where_[block] = frames_.begin();
  return frame.bytes;
}

void PagedFile::drop_buffer() {
  frames_.clear();
  where_.clear();
}

FileImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  FileImage image((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return image;
}

void save_image(const std::filesystem::path& path, std::span<const std::uint8_t> image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

}  // namespace vorann
