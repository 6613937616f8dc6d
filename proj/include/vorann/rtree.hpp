#pragma once

// Packed R-tree baseline sharing the block/IO model of the Voronoi store.
// The on-disk layout is described in docs/rtree_format.md.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "vorann/ann.hpp"
#include "vorann/geom.hpp"
#include "vorann/nnsearch.hpp"
#include "vorann/paged_file.hpp"
#include "vorann/store.hpp"

namespace vorann {

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  static Rect of(Point2 p) { return {p.x, p.y, p.x, p.y}; }
  bool contains(Point2 p) const {
    return min_x <= p.x && p.x <= max_x && min_y <= p.y && p.y <= max_y;
  }
  bool contains(const Rect& r) const {
    return min_x <= r.min_x && r.max_x <= max_x && min_y <= r.min_y && r.max_y <= max_y;
  }
  void expand(const Rect& r);

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Squared distance from `q` to the nearest point of `r`; never exceeds
/// squared_distance(q, p) for any p inside r, rounding included.
double min_sq_dist(const Rect& r, Point2 q);

struct RTreeEntry {
  Rect box;
  std::uint32_t ref = 0;  // child node number, or point id in a leaf
};

struct RTreeNode {
  bool leaf = true;
  std::vector<RTreeEntry> entries;

  Rect mbr() const;
};

inline constexpr std::size_t kNodeHeaderBytes = 4;
inline constexpr std::size_t kLeafEntryBytes = 20;      // u32 id, f64 x, f64 y
inline constexpr std::size_t kInternalEntryBytes = 36;  // 4 x f64 box, u32 child

inline std::size_t leaf_capacity(std::uint32_t block_size) {
  return (block_size - kNodeHeaderBytes) / kLeafEntryBytes;
}
inline std::size_t internal_capacity(std::uint32_t block_size) {
  return (block_size - kNodeHeaderBytes) / kInternalEntryBytes;
}

/// Node i of `nodes` lives in data block i. Leaves come first, the root last.
struct RTreeIndex {
  std::uint32_t block_size = kDefaultBlockSize;
  std::uint32_t root = 0;
  std::uint32_t height = 0;  // 1 when the root is a leaf
  std::uint32_t point_count = 0;
  std::vector<RTreeNode> nodes;
};

/// Sort-tile-recursive bulk load. Every non-root node holds between half and
/// all of its capacity. Throws NonFiniteCoordinate, InvalidInput (no points or
/// ids not 0..n-1), InvalidArgument (block size).
RTreeIndex build_rtree(std::span<const PointRecord> points,
                       std::uint32_t block_size = kDefaultBlockSize);

FileImage write_rtree(const RTreeIndex& tree);
RTreeIndex read_rtree(std::span<const std::uint8_t> image);

struct RTreeAudit {
  std::size_t containment_violations = 0;  // child box or point outside its parent box
  std::size_t fill_violations = 0;         // node entry count outside [cap/2, cap]
  std::size_t depth_violations = 0;        // leaves not all at depth `height`
  std::size_t points_seen = 0;

  bool ok(std::size_t expected_points) const {
    return containment_violations == 0 && fill_violations == 0 && depth_violations == 0 &&
           points_seen == expected_points;
  }
};

RTreeAudit audit_rtree(const RTreeIndex& tree);

/// IO-counting node reader over an R-tree file; one IO per node block miss.
class RTreeStore {
 public:
  static RTreeStore open(const std::filesystem::path& path,
                         std::size_t cache_blocks = kDefaultCacheBlocks);
  static RTreeStore from_image(std::shared_ptr<const FileImage> image,
                               std::size_t cache_blocks = kDefaultCacheBlocks);

  RTreeNode fetch_node(std::uint32_t node);

  std::uint32_t root() const { return root_; }
  std::uint32_t height() const { return height_; }
  std::uint32_t point_count() const { return point_count_; }
  std::uint32_t block_size() const { return pages_.block_size(); }
  std::uint32_t block_count() const { return pages_.block_count(); }

  IoCounters counters() const { return {pages_.ios(), expansions_}; }
  void reset_counters();

 private:
  RTreeStore(std::uint32_t root, std::uint32_t height, std::uint32_t points, PagedFile pages)
      : root_(root), height_(height), point_count_(points), pages_(std::move(pages)) {}

  std::uint32_t root_;
  std::uint32_t height_;
  std::uint32_t point_count_;
  PagedFile pages_;
  std::uint64_t expansions_ = 0;
};

/// Best-first search ordered by box distance; exact. Expansions count nodes read.
NnAnswer rtree_nn(RTreeStore& store, Point2 query);

enum class QueryOrder { Hilbert, Given };

/// Position of (x, y) along a Hilbert curve over a 2^16 x 2^16 grid spanning `bounds`.
std::uint64_t hilbert_key(const Rect& bounds, Point2 p);

/// Query ids sorted by Hilbert key over the queries' bounding box, ties by id.
std::vector<PointId> hilbert_order(std::span<const PointRecord> queries);

/// One rtree_nn per query, in the requested order. The query set is charged
/// as a sequential scan of packed 20-byte points: ceil(m * 20 / block_size) IOs.
AnnResult rtree_ann(RTreeStore& store, std::span<const PointRecord> queries,
                    QueryOrder order = QueryOrder::Hilbert);

}  // namespace vorann
