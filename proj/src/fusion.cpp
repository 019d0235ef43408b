#include "tkga/fusion.hpp"

#include <algorithm>
#include <string>

#include "tkga/error.hpp"

namespace tkga {

std::size_t ViewLayout::width(View v) const noexcept {
  switch (v) {
    case View::Name:
      return name_dim;
    case View::Structural:
      return struct_dim;
    default:
      return time_dim;
  }
}

std::size_t ViewLayout::offset(View v) const noexcept {
  std::size_t off = 0;
  for (const auto u : kViews) {
    if (u == v) break;
    off += width(u);
  }
  return off;
}

std::vector<double> fuse_views(std::span<const double> name, std::span<const double> year,
                               std::span<const double> month, std::span<const double> date,
                               std::span<const double> structural, const ViewLayout& layout,
                               const Gates& gates) {
  const std::array<std::span<const double>, 5> blocks{name, year, month, date, structural};
  std::vector<double> out(layout.total());
  for (const auto v : kViews) {
    const auto b = static_cast<std::size_t>(v);
    if (blocks[b].size() != layout.width(v)) {
      throw LayoutError("view " + std::to_string(b) + " has " + std::to_string(blocks[b].size()) +
                        " components, layout expects " + std::to_string(layout.width(v)));
    }
    std::transform(blocks[b].begin(), blocks[b].end(),
                   out.begin() + static_cast<long>(layout.offset(v)),
                   [g = gates[b]](double x) { return g * x; });
  }
  return out;
}

std::span<const double> view_block(std::span<const double> fused, const ViewLayout& layout,
                                   View v) {
  if (fused.size() != layout.total()) throw LayoutError("fused vector does not match layout");
  return fused.subspan(layout.offset(v), layout.width(v));
}

}  // namespace tkga
