#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tkga {

// Blocks of a fused entity vector, in layout order.
enum class View : std::size_t { Name = 0, Year = 1, Month = 2, Date = 3, Structural = 4 };

inline constexpr std::array<View, 5> kViews{View::Name, View::Year, View::Month, View::Date,
                                            View::Structural};

// Fixed layout [name | year | month | date | structural] with total width
// d_n + 3 d_t + d.
struct ViewLayout {
  std::size_t name_dim = 0;
  std::size_t time_dim = 0;
  std::size_t struct_dim = 0;

  std::size_t width(View v) const noexcept;
  std::size_t offset(View v) const noexcept;
  std::size_t total() const noexcept { return name_dim + 3 * time_dim + struct_dim; }

  bool operator==(const ViewLayout&) const = default;
};

// One scalar per view.
using Gates = std::array<double, 5>;
inline constexpr Gates kUnitGates{1.0, 1.0, 1.0, 1.0, 1.0};

// Gated block concatenation. Throws LayoutError if any view's size differs
// from its layout width.
std::vector<double> fuse_views(std::span<const double> name, std::span<const double> year,
                               std::span<const double> month, std::span<const double> date,
                               std::span<const double> structural, const ViewLayout& layout,
                               const Gates& gates = kUnitGates);

// Block v of a fused vector.
std::span<const double> view_block(std::span<const double> fused, const ViewLayout& layout,
                                   View v);

}  // namespace tkga
