#pragma once

#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace vorann {

using FileImage = std::vector<std::uint8_t>;

/// Raw access to the fixed-size data blocks of an index file.
class BlockSource {
 public:
  virtual ~BlockSource() = default;
  /// Fills `out` (exactly one block) with the contents of block `block`.
  virtual void read(std::uint32_t block, std::span<std::uint8_t> out) = 0;
};

/// Blocks served from an in-memory file image; many sources may share one image.
std::unique_ptr<BlockSource> memory_block_source(std::shared_ptr<const FileImage> image,
                                                 std::uint64_t data_offset,
                                                 std::uint32_t block_size);

/// Blocks read from disk with one positioned read per call.
std::unique_ptr<BlockSource> file_block_source(const std::filesystem::path& path,
                                               std::uint64_t data_offset,
                                               std::uint32_t block_size);

/// LRU buffer of blocks in front of a BlockSource, counting one IO per miss.
///
/// Not thread-safe: a PagedFile is owned by a single reader at a time.
class PagedFile {
 public:
  PagedFile(std::unique_ptr<BlockSource> source, std::uint32_t block_size,
            std::uint32_t block_count, std::size_t capacity);

  PagedFile(PagedFile&&) noexcept = default;
  PagedFile& operator=(PagedFile&&) noexcept = default;

  /// The returned bytes stay valid until the next call to read().
  std::span<const std::uint8_t> read(std::uint32_t block);

  std::uint64_t ios() const { return ios_; }
  void reset_ios() { ios_ = 0; }
  /// Empties the buffer without touching the counter.
  void drop_buffer();

  std::uint32_t block_size() const { return block_size_; }
  std::uint32_t block_count() const { return block_count_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t buffered() const { return frames_.size(); }
  bool is_buffered(std::uint32_t block) const { return where_.contains(block); }

 private:
  struct Frame {
    std::uint32_t block;
    std::vector<std::uint8_t> bytes;
  };

  std::unique_ptr<BlockSource> source_;
  std::uint32_t block_size_;
  std::uint32_t block_count_;
  std::size_t capacity_;
  std::uint64_t ios_ = 0;
  std::list<Frame> frames_;  // front = most recently used
  std::unordered_map<std::uint32_t, std::list<Frame>::iterator> where_;
  std::vector<std::uint8_t> scratch_;
};

FileImage load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, std::span<const std::uint8_t> image);

}  // namespace vorann
