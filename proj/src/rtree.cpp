#include "vorann/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>
#include <string>

#include "vorann/binary.hpp"
#include "vorann/delaunay.hpp"
#include "vorann/error.hpp"

namespace vorann {
namespace {

constexpr char kMagic[8] = {'R', 'T', 'R', 'I', 'D', 'X', '1', '\0'};
constexpr std::size_t kMetaBytes = 16;
constexpr std::size_t kDataOffset = kFileHeaderBytes + kMetaBytes;

double center_x(const Rect& r) { return r.min_x * 0.5 + r.max_x * 0.5; }
double center_y(const Rect& r) { return r.min_y * 0.5 + r.max_y * 0.5; }

// Splits `entries` into ceil(k / capacity) groups of near-equal size, tiled
// into vertical slices by x-center and ordered by y-center inside a slice.
std::vector<std::vector<RTreeEntry>> pack_level(std::vector<RTreeEntry> entries,
                                                std::size_t capacity) {
  const std::size_t k = entries.size();
  const std::size_t groups = (k + capacity - 1) / capacity;
  const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(groups))));

  std::vector<std::size_t> sizes(groups, k / groups);
  for (std::size_t i = 0; i < k % groups; ++i) ++sizes[i];

  const auto by_x = [](const RTreeEntry& a, const RTreeEntry& b) {
    const double ax = center_x(a.box), bx = center_x(b.box);
    return ax < bx || (ax == bx && a.ref < b.ref);
  };
  const auto by_y = [](const RTreeEntry& a, const RTreeEntry& b) {
    const double ay = center_y(a.box), by = center_y(b.box);
    return ay < by || (ay == by && a.ref < b.ref);
  };
  std::sort(entries.begin(), entries.end(), by_x);

  std::vector<std::vector<RTreeEntry>> out;
  out.reserve(groups);
  std::size_t next_entry = 0;
  for (std::size_t s = 0; s < slices; ++s) {
    const std::size_t g0 = s * groups / slices;
    const std::size_t g1 = (s + 1) * groups / slices;
    std::size_t count = 0;
    for (std::size_t g = g0; g < g1; ++g) count += sizes[g];
    const auto first = entries.begin() + static_cast<std::ptrdiff_t>(next_entry);
    std::sort(first, first + static_cast<std::ptrdiff_t>(count), by_y);
    auto it = first;
    for (std::size_t g = g0; g < g1; ++g) {
      out.emplace_back(it, it + static_cast<std::ptrdiff_t>(sizes[g]));
      it += static_cast<std::ptrdiff_t>(sizes[g]);
    }
    next_entry += count;
  }
  return out;
}

void encode_node(const RTreeNode& node, std::uint8_t* out) {
  using namespace binary;
  out[0] = node.leaf ? 1 : 0;
  out[1] = 0;
  put_u16(out + 2, static_cast<std::uint16_t>(node.entries.size()));
  std::uint8_t* p = out + kNodeHeaderBytes;
  for (const RTreeEntry& e : node.entries) {
    if (node.leaf) {
      put_u32(p, e.ref);
      put_f64(p + 4, e.box.min_x);
      put_f64(p + 12, e.box.min_y);
      p += kLeafEntryBytes;
    } else {
      put_f64(p, e.box.min_x);
      put_f64(p + 8, e.box.min_y);
      put_f64(p + 16, e.box.max_x);
      put_f64(p + 24, e.box.max_y);
      put_u32(p + 32, e.ref);
      p += kInternalEntryBytes;
    }
  }
}

RTreeNode decode_node(std::span<const std::uint8_t> block) {
  using namespace binary;
  RTreeNode node;
  if (block[0] > 1) throw Error(ErrorCode::CorruptIndex, "bad node kind");
  node.leaf = block[0] == 1;
  const std::size_t count = get_u16(block.data() + 2);
  const std::size_t entry_bytes = node.leaf ? kLeafEntryBytes : kInternalEntryBytes;
  if (kNodeHeaderBytes + count * entry_bytes > block.size()) {
    throw Error(ErrorCode::CorruptIndex, "node overruns its block");
  }
  node.entries.resize(count);
  const std::uint8_t* p = block.data() + kNodeHeaderBytes;
  for (RTreeEntry& e : node.entries) {
    if (node.leaf) {
      e.ref = get_u32(p);
      const Point2 pt{get_f64(p + 4), get_f64(p + 12)};
      e.box = Rect::of(pt);
    } else {
      e.box = {get_f64(p), get_f64(p + 8), get_f64(p + 16), get_f64(p + 24)};
      e.ref = get_u32(p + 32);
    }
    p += entry_bytes;
  }
  return node;
}

struct Header {
  std::uint32_t block_size;
  std::uint32_t node_count;
  std::uint32_t root;
  std::uint32_t height;
  std::uint32_t point_count;
};

Header parse_header(std::span<const std::uint8_t> image) {
  using namespace binary;
  if (image.size() < kDataOffset || std::memcmp(image.data(), kMagic, 8) != 0) {
    throw Error(ErrorCode::CorruptIndex, "missing RTRIDX1 header");
  }
  Header h{get_u32(image.data() + 8), get_u32(image.data() + 12), get_u32(image.data() + 16),
           get_u32(image.data() + 20), get_u32(image.data() + 24)};
  if (h.block_size < kMinBlockSize || h.block_size > kMaxBlockSize ||
      image.size() != kDataOffset + std::uint64_t{h.node_count} * h.block_size ||
      h.root >= h.node_count || h.height == 0) {
    throw Error(ErrorCode::CorruptIndex, "inconsistent RTRIDX1 header");
  }
  return h;
}

}  // namespace

void Rect::expand(const Rect& r) {
  min_x = std::min(min_x, r.min_x);
  min_y = std::min(min_y, r.min_y);
  max_x = std::max(max_x, r.max_x);
  max_y = std::max(max_y, r.max_y);
}

double min_sq_dist(const Rect& r, Point2 q) {
  const double dx = q.x < r.min_x ? r.min_x - q.x : (q.x > r.max_x ? q.x - r.max_x : 0.0);
  const double dy = q.y < r.min_y ? r.min_y - q.y : (q.y > r.max_y ? q.y - r.max_y : 0.0);
  return dx * dx + dy * dy;
}

Rect RTreeNode::mbr() const {
  Rect r = entries.front().box;
  for (const RTreeEntry& e : entries) r.expand(e.box);
  return r;
}

RTreeIndex build_rtree(std::span<const PointRecord> points, std::uint32_t block_size) {
  if (block_size < kMinBlockSize || block_size > kMaxBlockSize) {
    throw Error(ErrorCode::InvalidArgument, "block size outside [64, 65536]");
  }
  if (points.empty()) throw Error(ErrorCode::InvalidInput, "R-tree needs at least one point");
  std::vector<bool> seen(points.size(), false);
  std::vector<RTreeEntry> level;
  level.reserve(points.size());
  for (const PointRecord& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::NonFiniteCoordinate, "point " + std::to_string(p.id));
    }
    if (p.id >= points.size() || seen[p.id]) {
      throw Error(ErrorCode::InvalidInput, "point ids must be exactly 0..n-1");
    }
    seen[p.id] = true;
    level.push_back({Rect::of(p.pos()), p.id});
  }

  RTreeIndex tree;
  tree.block_size = block_size;
  tree.point_count = static_cast<std::uint32_t>(points.size());
  bool leaves = true;
  for (;;) {
    const std::size_t capacity = leaves ? leaf_capacity(block_size) : internal_capacity(block_size);
    std::vector<RTreeEntry> parents;
    for (auto& group : pack_level(std::move(level), capacity)) {
      RTreeNode node{leaves, std::move(group)};
      parents.push_back({node.mbr(), static_cast<std::uint32_t>(tree.nodes.size())});
      tree.nodes.push_back(std::move(node));
    }
    ++tree.height;
    leaves = false;
    if (parents.size() == 1) {
      tree.root = parents.front().ref;
      break;
    }
    level = std::move(parents);
  }
  return tree;
}

FileImage write_rtree(const RTreeIndex& tree) {
  const std::size_t n = tree.nodes.size();
  FileImage image(kDataOffset + n * std::size_t{tree.block_size}, 0);
  std::memcpy(image.data(), kMagic, 8);
  binary::put_u32(image.data() + 8, tree.block_size);
  binary::put_u32(image.data() + 12, static_cast<std::uint32_t>(n));
  binary::put_u32(image.data() + 16, tree.root);
  binary::put_u32(image.data() + 20, tree.height);
  binary::put_u32(image.data() + 24, tree.point_count);
  for (std::size_t i = 0; i < n; ++i) {
    const RTreeNode& node = tree.nodes[i];
    const std::size_t entry_bytes = node.leaf ? kLeafEntryBytes : kInternalEntryBytes;
    if (kNodeHeaderBytes + node.entries.size() * entry_bytes > tree.block_size) {
      throw Error(ErrorCode::RecordTooLarge, "node " + std::to_string(i) + " exceeds block");
    }
    encode_node(node, image.data() + kDataOffset + i * tree.block_size);
  }
  return image;
}

RTreeIndex read_rtree(std::span<const std::uint8_t> image) {
  const Header h = parse_header(image);
  RTreeIndex tree;
  tree.block_size = h.block_size;
  tree.root = h.root;
  tree.height = h.height;
  tree.point_count = h.point_count;
  tree.nodes.reserve(h.node_count);
  for (std::uint32_t i = 0; i < h.node_count; ++i) {
    tree.nodes.push_back(decode_node(image.subspan(kDataOffset + std::size_t{i} * h.block_size, h.block_size)));
  }
  return tree;
}

RTreeAudit audit_rtree(const RTreeIndex& tree) {
  RTreeAudit audit;
  struct Visit {
    std::uint32_t node;
    std::uint32_t depth;
    Rect bound;
  };
  if (tree.nodes.empty()) return audit;
  std::vector<Visit> todo{{tree.root, 1, tree.nodes[tree.root].mbr()}};
  while (!todo.empty()) {
    const Visit v = todo.back();
    todo.pop_back();
    const RTreeNode& node = tree.nodes[v.node];
    const std::size_t cap = node.leaf ? leaf_capacity(tree.block_size) : internal_capacity(tree.block_size);
    const std::size_t count = node.entries.size();
    const bool is_root = v.node == tree.root;
    if (count > cap || count == 0 || (!is_root && count < cap / 2)) ++audit.fill_violations;
    if (node.leaf != (v.depth == tree.height)) ++audit.depth_violations;
    for (const RTreeEntry& e : node.entries) {
      if (!v.bound.contains(e.box)) ++audit.containment_violations;
      if (node.leaf) {
        ++audit.points_seen;
      } else if (e.ref < tree.nodes.size() && !tree.nodes[e.ref].entries.empty()) {
        if (!e.box.contains(tree.nodes[e.ref].mbr())) ++audit.containment_violations;
        todo.push_back({e.ref, v.depth + 1, e.box});
      } else {
        ++audit.containment_violations;
      }
    }
  }
  return audit;
}

RTreeStore RTreeStore::open(const std::filesystem::path& path, std::size_t cache_blocks) {
  const FileImage image = load_image(path);
  const Header h = parse_header(image);
  return RTreeStore(h.root, h.height, h.point_count,
                    PagedFile(file_block_source(path, kDataOffset, h.block_size), h.block_size,
                              h.node_count, cache_blocks));
}

RTreeStore RTreeStore::from_image(std::shared_ptr<const FileImage> image, std::size_t cache_blocks) {
  if (!image) throw Error(ErrorCode::InvalidArgument, "null file image");
  const Header h = parse_header(*image);
  return RTreeStore(h.root, h.height, h.point_count,
                    PagedFile(memory_block_source(image, kDataOffset, h.block_size), h.block_size,
                              h.node_count, cache_blocks));
}

RTreeNode RTreeStore::fetch_node(std::uint32_t node) {
  ++expansions_;
  return decode_node(pages_.read(node));
}

void RTreeStore::reset_counters() {
  pages_.reset_ios();
  pages_.drop_buffer();
  expansions_ = 0;
}

NnAnswer rtree_nn(RTreeStore& store, Point2 query) {
  struct Item {
    double sq_dist;
    bool is_point;
    std::uint32_t ref;
  };
  // Nearest first; at equal distance points before nodes, then lower ref.
  const auto after = [](const Item& a, const Item& b) {
    if (a.sq_dist != b.sq_dist) return a.sq_dist > b.sq_dist;
    if (a.is_point != b.is_point) return b.is_point;
    return a.ref > b.ref;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(after)> queue(after);
  const IoCounters before = store.counters();
  queue.push({0.0, false, store.root()});
  while (!queue.empty()) {
    const Item item = queue.top();
    queue.pop();
    if (item.is_point) {
      const IoCounters now = store.counters();
      NnAnswer answer{item.ref, item.sq_dist, {}};
      answer.stats.expansions = now.expansions - before.expansions;
      answer.stats.ios = now.ios - before.ios;
      answer.stats.steps_to_answer = answer.stats.expansions;
      return answer;
    }
    const RTreeNode node = store.fetch_node(item.ref);
    for (const RTreeEntry& e : node.entries) {
      if (node.leaf) {
        queue.push({squared_distance(query, {e.box.min_x, e.box.min_y}), true, e.ref});
      } else {
        queue.push({min_sq_dist(e.box, query), false, e.ref});
      }
    }
  }
  throw Error(ErrorCode::CorruptIndex, "R-tree holds no points");
}

std::uint64_t hilbert_key(const Rect& bounds, Point2 p) {
  constexpr std::uint64_t side = 1u << 16;
  const auto cell = [&](double v, double lo, double hi) -> std::uint64_t {
    if (!(hi > lo)) return 0;
    const double t = (v - lo) / (hi - lo) * static_cast<double>(side - 1);
    return static_cast<std::uint64_t>(std::clamp(t, 0.0, static_cast<double>(side - 1)));
  };
  std::uint64_t x = cell(p.x, bounds.min_x, bounds.max_x);
  std::uint64_t y = cell(p.y, bounds.min_y, bounds.max_y);
  std::uint64_t d = 0;
  for (std::uint64_t s = side / 2; s > 0; s /= 2) {
    const std::uint64_t rx = (x & s) ? 1 : 0;
    const std::uint64_t ry = (y & s) ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = side - 1 - x;
        y = side - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

std::vector<PointId> hilbert_order(std::span<const PointRecord> queries) {
  if (queries.empty()) return {};
  Rect bounds = Rect::of(queries.front().pos());
  for (const PointRecord& q : queries) bounds.expand(Rect::of(q.pos()));
  std::vector<std::pair<std::uint64_t, PointId>> keyed;
  keyed.reserve(queries.size());
  for (const PointRecord& q : queries) keyed.emplace_back(hilbert_key(bounds, q.pos()), q.id);
  std::sort(keyed.begin(), keyed.end());
  std::vector<PointId> order;
  order.reserve(keyed.size());
  for (const auto& [key, id] : keyed) order.push_back(id);
  return order;
}

AnnResult rtree_ann(RTreeStore& store, std::span<const PointRecord> queries, QueryOrder order) {
  if (queries.empty()) throw Error(ErrorCode::EmptyQuery, "query set is empty");
  std::vector<PointRecord> by_id = validated_points(queries);

  std::vector<PointId> sequence;
  if (order == QueryOrder::Hilbert) {
    sequence = hilbert_order(by_id);
  } else {
    for (const PointRecord& q : queries) sequence.push_back(q.id);
  }

  store.reset_counters();
  AnnResult result;
  result.pairs.resize(by_id.size());
  result.visit_order = sequence;
  for (PointId q : sequence) {
    const NnAnswer nn = rtree_nn(store, by_id[q].pos());
    result.pairs[q] = AnnPair{q, nn.nn_id, nn.sq_dist, nn.stats};
  }
  result.p_side = store.counters();
  const std::uint64_t bytes = std::uint64_t{by_id.size()} * kLeafEntryBytes;
  result.q_side = {(bytes + store.block_size() - 1) / store.block_size(), by_id.size()};
  return result;
}

}  // namespace vorann
