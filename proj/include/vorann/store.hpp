#pragma once

// Block-structured Voronoi index files.
//
// Layout (all integers little-endian):
//   header     16 bytes  magic "VORIDX1\0", u32 block_size, u32 point_count
//   directory  point_count x (u32 block_number, u16 byte_offset), by point id
//   data       block_count x block_size bytes, starting right after the directory
//
// A record is u32 point_id, f64 x, f64 y, u16 degree, degree x u32 neighbour
// id. Records are placed first-fit in id order, never span a block, and the
// unused tail of each block is zero.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "vorann/delaunay.hpp"
#include "vorann/geom.hpp"
#include "vorann/paged_file.hpp"

namespace vorann {

inline constexpr std::uint32_t kDefaultBlockSize = 1024;
inline constexpr std::size_t kDefaultCacheBlocks = 64;
inline constexpr std::uint32_t kMinBlockSize = 64;
inline constexpr std::uint32_t kMaxBlockSize = 65536;
inline constexpr std::size_t kFileHeaderBytes = 16;
inline constexpr std::size_t kDirectoryEntryBytes = 6;
inline constexpr std::size_t kRecordFixedBytes = 4 + 8 + 8 + 2;

struct VoronoiFileRecord {
  PointId point_id = 0;
  double x = 0.0;
  double y = 0.0;
  std::vector<PointId> neighbour_ids;

  std::size_t serialized_size() const { return kRecordFixedBytes + 4 * neighbour_ids.size(); }

  friend bool operator==(const VoronoiFileRecord&, const VoronoiFileRecord&) = default;
};

struct DirectoryEntry {
  std::uint32_t block = 0;
  std::uint16_t offset = 0;
};

/// Serializes an index. Throws RecordTooLarge when a record cannot fit in a
/// block, InvalidArgument for a block size outside [64, 65536].
FileImage write_index(const DelaunayIndex& index, std::uint32_t block_size = kDefaultBlockSize);

/// Encodes one record at `out`, which must have room for serialized_size() bytes.
void encode_record(const VoronoiFileRecord& record, std::uint8_t* out);
/// Decodes the record at `bytes`; throws CorruptIndex if it overruns the span.
VoronoiFileRecord decode_record(std::span<const std::uint8_t> bytes);

/// Points and adjacency of a serialized index (triangles are not stored).
DelaunayIndex read_index(std::span<const std::uint8_t> image);

struct IoCounters {
  std::uint64_t ios = 0;         // block misses
  std::uint64_t expansions = 0;  // records fetched

  friend bool operator==(const IoCounters&, const IoCounters&) = default;
};

/// IO-counting accessor over a Voronoi index file.
///
/// The directory and every point's coordinates are loaded when the store is
/// opened and are free to consult. Only record reads go through the LRU block
/// buffer, and each buffer miss costs one IO.
class BlockStore {
 public:
  static BlockStore open(const std::filesystem::path& path,
                         std::size_t cache_blocks = kDefaultCacheBlocks);
  static BlockStore from_image(std::shared_ptr<const FileImage> image,
                               std::size_t cache_blocks = kDefaultCacheBlocks);

  /// Throws UnknownPoint for ids outside the directory.
  VoronoiFileRecord fetch_record(PointId id);

  Point2 point(PointId id) const { return coords_[id]; }
  bool contains(PointId id) const { return id < coords_.size(); }
  std::size_t size() const { return coords_.size(); }
  std::span<const Point2> points() const { return coords_; }
  DirectoryEntry location(PointId id) const { return directory_[id]; }

  std::uint32_t block_size() const { return pages_.block_size(); }
  std::uint32_t block_count() const { return pages_.block_count(); }
  std::size_t cache_blocks() const { return pages_.capacity(); }

  IoCounters counters() const { return {pages_.ios(), expansions_}; }
  /// Zeroes both counters and empties the buffer, giving a cold start.
  void reset_counters();

 private:
  BlockStore(std::vector<DirectoryEntry> directory, std::vector<Point2> coords, PagedFile pages)
      : directory_(std::move(directory)), coords_(std::move(coords)), pages_(std::move(pages)) {}

  using SourceFactory =
      std::function<std::unique_ptr<BlockSource>(std::uint64_t data_offset, std::uint32_t block_size)>;
  static BlockStore from_parsed(std::span<const std::uint8_t> image, const SourceFactory& make_source,
                                std::size_t cache_blocks);

  std::vector<DirectoryEntry> directory_;
  std::vector<Point2> coords_;
  PagedFile pages_;
  std::uint64_t expansions_ = 0;
};

}  // namespace vorann
