#pragma once

#include <cstddef>
#include <vector>

namespace pdebench {

// Dense row-major rank-3 array. Trajectories use (n_t, n_x, n_y); channel
// stacks fold the channel axis into d0.
template <typename T>
struct Tensor3 {
  int d0 = 0, d1 = 0, d2 = 0;
  std::vector<T> v;

  Tensor3() = default;
  Tensor3(int a, int b, int c, T fill = T{})
      : d0(a), d1(b), d2(c), v(static_cast<size_t>(a) * b * c, fill) {}

  size_t size() const { return v.size(); }
  bool same_shape(const Tensor3& o) const {
    return d0 == o.d0 && d1 == o.d1 && d2 == o.d2;
  }

  T& at(int i, int j, int k) {
    return v[(static_cast<size_t>(i) * d1 + j) * d2 + k];
  }
  const T& at(int i, int j, int k) const {
    return v[(static_cast<size_t>(i) * d1 + j) * d2 + k];
  }

  // Pointer to slab i (a d1 x d2 plane).
  T* plane(int i) { return v.data() + static_cast<size_t>(i) * d1 * d2; }
  const T* plane(int i) const {
    return v.data() + static_cast<size_t>(i) * d1 * d2;
  }
};

using Volume = Tensor3<double>;
using VolumeF = Tensor3<float>;

}  // namespace pdebench
