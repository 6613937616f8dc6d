#include "vorann/store.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "vorann/binary.hpp"
#include "vorann/error.hpp"

namespace vorann {
namespace {

constexpr char kMagic[8] = {'V', 'O', 'R', 'I', 'D', 'X', '1', '\0'};

struct ParsedIndex {
  std::uint32_t block_size = 0;
  std::uint32_t block_count = 0;
  std::uint64_t data_offset = 0;
  std::vector<DirectoryEntry> directory;
  DelaunayIndex index;
};

void check_block_size(std::uint32_t block_size) {
  if (block_size < kMinBlockSize || block_size > kMaxBlockSize) {
    throw Error(ErrorCode::InvalidArgument,
                "block size " + std::to_string(block_size) + " outside [64, 65536]");
  }
}

void check_neighbours(PointId id, std::span<const PointId> neighbours, std::size_t n,
                      ErrorCode code) {
  for (std::size_t i = 0; i < neighbours.size(); ++i) {
    const PointId v = neighbours[i];
    if (v >= n || v == id || (i > 0 && neighbours[i - 1] >= v)) {
      throw Error(code, "bad neighbour list for point " + std::to_string(id));
    }
  }
}

ParsedIndex parse_index(std::span<const std::uint8_t> image) {
  using namespace binary;
  if (image.size() < kFileHeaderBytes || std::memcmp(image.data(), kMagic, 8) != 0) {
    throw Error(ErrorCode::CorruptIndex, "missing VORIDX1 header");
  }
  ParsedIndex parsed;
  parsed.block_size = get_u32(image.data() + 8);
  const std::uint32_t count = get_u32(image.data() + 12);
  if (parsed.block_size < kMinBlockSize || parsed.block_size > kMaxBlockSize) {
    throw Error(ErrorCode::CorruptIndex, "invalid block size");
  }
  parsed.data_offset = kFileHeaderBytes + std::uint64_t{count} * kDirectoryEntryBytes;
  if (parsed.data_offset > image.size() ||
      (image.size() - parsed.data_offset) % parsed.block_size != 0) {
    throw Error(ErrorCode::CorruptIndex, "data section is not a whole number of blocks");
  }
  parsed.block_count =
      static_cast<std::uint32_t>((image.size() - parsed.data_offset) / parsed.block_size);

  parsed.directory.resize(count);
  parsed.index.points.resize(count);
  parsed.index.adjacency.resize(count);
  for (std::uint32_t id = 0; id < count; ++id) {
    const std::uint8_t* entry = image.data() + kFileHeaderBytes + std::size_t{id} * kDirectoryEntryBytes;
    DirectoryEntry& dir = parsed.directory[id];
    dir.block = get_u32(entry);
    dir.offset = get_u16(entry + 4);
    if (dir.block >= parsed.block_count || dir.offset >= parsed.block_size) {
      throw Error(ErrorCode::CorruptIndex, "directory entry " + std::to_string(id) + " out of range");
    }
    const auto block = image.subspan(parsed.data_offset + std::uint64_t{dir.block} * parsed.block_size,
                                     parsed.block_size);
    VoronoiFileRecord record = decode_record(block.subspan(dir.offset));
    if (record.point_id != id) {
      throw Error(ErrorCode::CorruptIndex, "directory entry " + std::to_string(id) +
                                               " points at record " + std::to_string(record.point_id));
    }
    check_neighbours(id, record.neighbour_ids, count, ErrorCode::CorruptIndex);
    if (!std::isfinite(record.x) || !std::isfinite(record.y)) {
      throw Error(ErrorCode::CorruptIndex, "non-finite coordinates for point " + std::to_string(id));
    }
    parsed.index.points[id] = PointRecord{id, record.x, record.y};
    parsed.index.adjacency[id] = std::move(record.neighbour_ids);
  }
  return parsed;
}

}  // namespace

void encode_record(const VoronoiFileRecord& record, std::uint8_t* out) {
  using namespace binary;
  put_u32(out, record.point_id);
  put_f64(out + 4, record.x);
  put_f64(out + 12, record.y);
  put_u16(out + 20, static_cast<std::uint16_t>(record.neighbour_ids.size()));
  out += kRecordFixedBytes;
  for (PointId v : record.neighbour_ids) {
    put_u32(out, v);
    out += 4;
  }
}

VoronoiFileRecord decode_record(std::span<const std::uint8_t> bytes) {
  using namespace binary;
  if (bytes.size() < kRecordFixedBytes) throw Error(ErrorCode::CorruptIndex, "truncated record");
  VoronoiFileRecord record;
  record.point_id = get_u32(bytes.data());
  record.x = get_f64(bytes.data() + 4);
  record.y = get_f64(bytes.data() + 12);
  const std::uint16_t degree = get_u16(bytes.data() + 20);
  if (kRecordFixedBytes + 4 * std::size_t{degree} > bytes.size()) {
    throw Error(ErrorCode::CorruptIndex,
                "record " + std::to_string(record.point_id) + " overruns its block");
  }
  record.neighbour_ids.resize(degree);
  for (std::uint16_t i = 0; i < degree; ++i) {
    record.neighbour_ids[i] = get_u32(bytes.data() + kRecordFixedBytes + 4 * std::size_t{i});
  }
  return record;
}

FileImage write_index(const DelaunayIndex& index, std::uint32_t block_size) {
  check_block_size(block_size);
  const std::size_t n = index.points.size();
  if (index.adjacency.size() != n) {
    throw Error(ErrorCode::InvalidInput, "adjacency size does not match point count");
  }

  // First-fit placement in id order. Blocks that can no longer take even a
  // degree-0 record drop out of the open list.
  std::vector<DirectoryEntry> directory(n);
  std::vector<std::uint32_t> used;
  std::vector<std::uint32_t> open;
  for (std::size_t id = 0; id < n; ++id) {
    if (index.points[id].id != id) throw Error(ErrorCode::InvalidInput, "point ids must be 0..n-1");
    check_neighbours(static_cast<PointId>(id), index.adjacency[id], n, ErrorCode::InvalidInput);
    const std::size_t degree = index.adjacency[id].size();
    const std::size_t size = kRecordFixedBytes + 4 * degree;
    if (degree > UINT16_MAX || size > block_size) {
      throw Error(ErrorCode::RecordTooLarge, "record for point " + std::to_string(id) + " needs " +
                                                 std::to_string(size) + " bytes, block holds " +
                                                 std::to_string(block_size));
    }
    auto slot = std::find_if(open.begin(), open.end(),
                             [&](std::uint32_t b) { return block_size - used[b] >= size; });
    if (slot == open.end()) {
      used.push_back(0);
      open.push_back(static_cast<std::uint32_t>(used.size() - 1));
      slot = std::prev(open.end());
    }
    const std::uint32_t block = *slot;
    directory[id] = {block, static_cast<std::uint16_t>(used[block])};
    used[block] += static_cast<std::uint32_t>(size);
    if (block_size - used[block] < kRecordFixedBytes) open.erase(slot);
  }

  const std::size_t data_offset = kFileHeaderBytes + n * kDirectoryEntryBytes;
  FileImage image(data_offset + used.size() * std::size_t{block_size}, 0);
  std::memcpy(image.data(), kMagic, 8);
  binary::put_u32(image.data() + 8, block_size);
  binary::put_u32(image.data() + 12, static_cast<std::uint32_t>(n));
  for (std::size_t id = 0; id < n; ++id) {
    std::uint8_t* entry = image.data() + kFileHeaderBytes + id * kDirectoryEntryBytes;
    binary::put_u32(entry, directory[id].block);
    binary::put_u16(entry + 4, directory[id].offset);

    const PointRecord& p = index.points[id];
    VoronoiFileRecord record{p.id, p.x, p.y, index.adjacency[id]};
    encode_record(record, image.data() + data_offset +
                              std::size_t{directory[id].block} * block_size + directory[id].offset);
  }
  return image;
}

DelaunayIndex read_index(std::span<const std::uint8_t> image) {
  return std::move(parse_index(image).index);
}

BlockStore BlockStore::from_parsed(std::span<const std::uint8_t> image, const SourceFactory& make_source,
                                   std::size_t cache_blocks) {
  ParsedIndex parsed = parse_index(image);
  std::vector<Point2> coords(parsed.index.points.size());
  std::transform(parsed.index.points.begin(), parsed.index.points.end(), coords.begin(),
                 [](const PointRecord& p) { return p.pos(); });
  PagedFile pages(make_source(parsed.data_offset, parsed.block_size), parsed.block_size,
                  parsed.block_count, cache_blocks);
  return BlockStore(std::move(parsed.directory), std::move(coords), std::move(pages));
}

BlockStore BlockStore::open(const std::filesystem::path& path, std::size_t cache_blocks) {
  return from_parsed(
      load_image(path),
      [&](std::uint64_t offset, std::uint32_t block_size) {
        return file_block_source(path, offset, block_size);
      },
      cache_blocks);
}

BlockStore BlockStore::from_image(std::shared_ptr<const FileImage> image, std::size_t cache_blocks) {
  if (!image) throw Error(ErrorCode::InvalidArgument, "null file image");
  return from_parsed(
      *image,
      [&](std::uint64_t offset, std::uint32_t block_size) {
        return memory_block_source(image, offset, block_size);
      },
      cache_blocks);
}

VoronoiFileRecord BlockStore::fetch_record(PointId id) {
  if (id >= directory_.size()) throw Error(ErrorCode::UnknownPoint, "point " + std::to_string(id));
  ++expansions_;
  const DirectoryEntry dir = directory_[id];
  const auto block = pages_.read(dir.block);
  return decode_record(block.subspan(dir.offset));
}

void BlockStore::reset_counters() {
  pages_.reset_ios();
  pages_.drop_buffer();
  expansions_ = 0;
}

}  // namespace vorann
