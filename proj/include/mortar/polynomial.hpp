#pragma once

#include <Eigen/Dense>

namespace mortar {

// Bivariate polynomial sum_{i,j<=2} c(i,j) x1^i x2^j in screen coordinates.
template <typename Scalar>
struct Poly2T {
  Eigen::Matrix<Scalar, 3, 3> c = Eigen::Matrix<Scalar, 3, 3>::Zero();

  static Poly2T constant(Scalar a) {
    Poly2T p;
    p.c(0, 0) = a;
    return p;
  }
  // a + b x1 + d x2
  static Poly2T linear(Scalar a, Scalar b, Scalar d) {
    Poly2T p;
    p.c(0, 0) = a;
    p.c(1, 0) = b;
    p.c(0, 1) = d;
    return p;
  }

  Scalar operator()(Scalar x1, Scalar x2) const {
    Scalar r0 = c(0, 0) + x2 * (c(0, 1) + x2 * c(0, 2));
    Scalar r1 = c(1, 0) + x2 * (c(1, 1) + x2 * c(1, 2));
    Scalar r2 = c(2, 0) + x2 * (c(2, 1) + x2 * c(2, 2));
    return r0 + x1 * (r1 + x1 * r2);
  }
  template <typename V>
  Scalar operator()(const V& x) const {
    return (*this)(x(0), x(1));
  }

  bool is_zero() const { return (c.array() == Scalar(0)).all(); }
  int total_degree() const {
    int d = -1;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (c(i, j) != Scalar(0) && i + j > d) d = i + j;
    return d;
  }

  Poly2T operator+(const Poly2T& o) const {
    Poly2T p;
    p.c = c + o.c;
    return p;
  }
  Poly2T operator-(const Poly2T& o) const {
    Poly2T p;
    p.c = c - o.c;
    return p;
  }
  Poly2T operator*(Scalar s) const {
    Poly2T p;
    p.c = c * s;
    return p;
  }
  bool operator==(const Poly2T& o) const { return c == o.c; }
};

using Poly2 = Poly2T<double>;

}  // namespace mortar
