#pragma once

#include <cmath>
#include <concepts>

namespace canfilt {

template <std::floating_point T>
struct Vec2 {
  T x{};
  T y{};

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(T s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, T s) noexcept { return s * a; }
};

template <std::floating_point T>
[[nodiscard]] constexpr T dot(Vec2<T> a, Vec2<T> b) noexcept {
  return a.x * b.x + a.y * b.y;
}

template <std::floating_point T>
[[nodiscard]] T norm(Vec2<T> v) noexcept {
  return std::hypot(v.x, v.y);
}

/// Rotation of v by +90 degrees; exactly orthogonal to v, same norm.
template <std::floating_point T>
[[nodiscard]] constexpr Vec2<T> perp(Vec2<T> v) noexcept {
  return {-v.y, v.x};
}

template <std::floating_point T>
[[nodiscard]] constexpr bool is_finite(Vec2<T> v) noexcept {
  return std::isfinite(v.x) && std::isfinite(v.y);
}

/// General (possibly non-symmetric) 2x2 matrix, row major.
template <std::floating_point T>
struct Mat2 {
  T a11{}, a12{}, a21{}, a22{};

  [[nodiscard]] static constexpr Mat2 identity() noexcept { return {T(1), T(0), T(0), T(1)}; }

  [[nodiscard]] constexpr Mat2 transpose() const noexcept { return {a11, a21, a12, a22}; }

  friend constexpr Mat2 operator+(const Mat2& a, const Mat2& b) noexcept {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend constexpr Mat2 operator-(const Mat2& a, const Mat2& b) noexcept {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend constexpr Mat2 operator*(T s, const Mat2& a) noexcept {
    return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
  }
  friend constexpr Mat2 operator*(const Mat2& a, T s) noexcept { return s * a; }
  friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) noexcept {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend constexpr Vec2<T> operator*(const Mat2& a, Vec2<T> v) noexcept {
    return {a.a11 * v.x + a.a12 * v.y, a.a21 * v.x + a.a22 * v.y};
  }
};

template <std::floating_point T>
[[nodiscard]] constexpr bool is_finite(const Mat2<T>& m) noexcept {
  return std::isfinite(m.a11) && std::isfinite(m.a12) && std::isfinite(m.a21) && std::isfinite(m.a22);
}

/// trace(a^T b)
template <std::floating_point T>
[[nodiscard]] constexpr T frob_inner(const Mat2<T>& a, const Mat2<T>& b) noexcept {
  return a.a11 * b.a11 + a.a12 * b.a12 + a.a21 * b.a21 + a.a22 * b.a22;
}

template <std::floating_point T>
[[nodiscard]] T frob_norm(const Mat2<T>& m) noexcept {
  return std::sqrt(frob_inner(m, m));
}

/// Real symmetric 2x2 matrix [[h11, h12], [h12, h22]]; the off-diagonal is
/// stored once, so symmetry is structural.
template <std::floating_point T>
struct SymMat2 {
  T h11{}, h12{}, h22{};

  [[nodiscard]] static constexpr SymMat2 identity() noexcept { return {T(1), T(0), T(1)}; }

  [[nodiscard]] constexpr Mat2<T> full() const noexcept { return {h11, h12, h12, h22}; }

  friend constexpr SymMat2 operator+(const SymMat2& a, const SymMat2& b) noexcept {
    return {a.h11 + b.h11, a.h12 + b.h12, a.h22 + b.h22};
  }
  friend constexpr SymMat2 operator-(const SymMat2& a, const SymMat2& b) noexcept {
    return {a.h11 - b.h11, a.h12 - b.h12, a.h22 - b.h22};
  }
  friend constexpr SymMat2 operator*(T s, const SymMat2& a) noexcept {
    return {s * a.h11, s * a.h12, s * a.h22};
  }
  friend constexpr SymMat2 operator*(const SymMat2& a, T s) noexcept { return s * a; }
  friend constexpr Vec2<T> operator*(const SymMat2& a, Vec2<T> v) noexcept {
    return {a.h11 * v.x + a.h12 * v.y, a.h12 * v.x + a.h22 * v.y};
  }
};

template <std::floating_point T>
[[nodiscard]] constexpr bool is_finite(const SymMat2<T>& m) noexcept {
  return std::isfinite(m.h11) && std::isfinite(m.h12) && std::isfinite(m.h22);
}

template <std::floating_point T>
[[nodiscard]] constexpr T frob_inner(const SymMat2<T>& a, const SymMat2<T>& b) noexcept {
  return a.h11 * b.h11 + T(2) * a.h12 * b.h12 + a.h22 * b.h22;
}

template <std::floating_point T>
[[nodiscard]] T frob_norm(const SymMat2<T>& m) noexcept {
  return std::sqrt(frob_inner(m, m));
}

/// (m + m^T) / 2
template <std::floating_point T>
[[nodiscard]] constexpr SymMat2<T> symmetrize(const Mat2<T>& m) noexcept {
  return {m.a11, (m.a12 + m.a21) / T(2), m.a22};
}

/// Eigendecomposition of a symmetric 2x2 matrix.  lambda1 >= lambda2; v1, v2
/// are unit length and orthogonal; lambda1 v1 v1^T + lambda2 v2 v2^T
/// reconstructs the input.
template <std::floating_point T>
struct EigenPair2 {
  T lambda1{};
  T lambda2{};
  Vec2<T> v1{};
  Vec2<T> v2{};
};

namespace detail {

// Deterministic sign: the largest-magnitude component is made positive
// (ties resolved by the first component).
template <std::floating_point T>
[[nodiscard]] constexpr Vec2<T> canonical_sign(Vec2<T> v) noexcept {
  const T pick = std::abs(v.x) >= std::abs(v.y) ? v.x : v.y;
  return pick < T(0) ? -v : v;
}

}  // namespace detail

/// Closed-form (trace / discriminant) eigendecomposition.
///
/// Degenerate rule: when |h12| <= 1e-14 and |h11 - h22| <= 1e-14 the matrix is
/// treated as a multiple of the identity and the canonical basis e1, e2 is
/// returned, which makes the output deterministic.
template <std::floating_point T>
[[nodiscard]] EigenPair2<T> eig(const SymMat2<T>& m) noexcept {
  const T mean = (m.h11 + m.h22) / T(2);
  const T diff = (m.h11 - m.h22) / T(2);
  const T disc = std::hypot(diff, m.h12);

  EigenPair2<T> out;
  out.lambda1 = mean + disc;
  out.lambda2 = mean - disc;

  constexpr T kDegenerate = T(1e-14);
  if (std::abs(m.h12) <= kDegenerate && std::abs(m.h11 - m.h22) <= kDegenerate) {
    out.v1 = {T(1), T(0)};
    out.v2 = {T(0), T(1)};
    return out;
  }

  // Two algebraic representations of the lambda1 eigenvector; pick the
  // better conditioned one.  At least one has norm >= disc > 0 here.
  const Vec2<T> u{m.h12, out.lambda1 - m.h11};
  const Vec2<T> w{out.lambda1 - m.h22, m.h12};
  Vec2<T> v = dot(u, u) > dot(w, w) ? u : w;
  const T n = norm(v);
  v = {v.x / n, v.y / n};

  out.v1 = detail::canonical_sign(v);
  out.v2 = detail::canonical_sign(perp(out.v1));
  return out;
}

/// Smallest eigenvalue (convenience over eig).
template <std::floating_point T>
[[nodiscard]] T lambda_min(const SymMat2<T>& m) noexcept {
  return eig(m).lambda2;
}

/// Largest singular value.  For symmetric input this is max |eigenvalue|.
template <std::floating_point T>
[[nodiscard]] T spectral_norm(const SymMat2<T>& m) noexcept {
  const auto ep = eig(m);
  return std::max(std::abs(ep.lambda1), std::abs(ep.lambda2));
}

template <std::floating_point T>
[[nodiscard]] T spectral_norm(const Mat2<T>& m) noexcept {
  // Gram matrix is symmetric by construction.
  const SymMat2<T> gram{m.a11 * m.a11 + m.a21 * m.a21, m.a11 * m.a12 + m.a21 * m.a22,
                        m.a12 * m.a12 + m.a22 * m.a22};
  return std::sqrt(std::max(T(0), eig(gram).lambda1));
}

/// Frobenius-nearest symmetric positive semidefinite matrix: symmetrize,
/// eigendecompose, clip negative eigenvalues, reconstruct.  The input is
/// always symmetrized first so there is a single code path.
template <std::floating_point T>
[[nodiscard]] SymMat2<T> project_psd(const Mat2<T>& m) noexcept {
  const SymMat2<T> s = symmetrize(m);
  const auto ep = eig(s);
  if (ep.lambda2 >= T(0)) return s;  // already in the cone
  const T l1 = std::max(ep.lambda1, T(0));
  const T l2 = std::max(ep.lambda2, T(0));
  return {l1 * ep.v1.x * ep.v1.x + l2 * ep.v2.x * ep.v2.x,
          l1 * ep.v1.x * ep.v1.y + l2 * ep.v2.x * ep.v2.y,
          l1 * ep.v1.y * ep.v1.y + l2 * ep.v2.y * ep.v2.y};
}

template <std::floating_point T>
[[nodiscard]] SymMat2<T> project_psd(const SymMat2<T>& m) noexcept {
  return project_psd(m.full());
}

using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;
using SymMat2d = SymMat2<double>;

}  // namespace canfilt
