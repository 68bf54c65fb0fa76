#pragma once

// Dense third-order tensors stored first-index-fastest, with the two matrix
// unfoldings, their inverse foldings, mode contractions and the Frobenius
// inner product. Everything here is a pure function of immutable inputs.

#include <Eigen/Dense>

#include <cassert>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace ttproj {

using Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Extents of a third-order tensor. Zero extents are permitted and denote an
// empty tensor; gap factors of width zero rely on this.
struct Dims3 {
  Index n1 = 0;
  Index n2 = 0;
  Index n3 = 0;

  Index count() const { return n1 * n2 * n3; }
  friend bool operator==(const Dims3&, const Dims3&) = default;
};

inline std::string to_string(const Dims3& d) {
  std::ostringstream os;
  os << d.n1 << "x" << d.n2 << "x" << d.n3;
  return os.str();
}

// Tensor in R^{n1 x n2 x n3}. Entry (i, j, k) lives at linear position
// i + n1*j + n1*n2*k (0-based), i.e. the first index varies fastest. Both
// unfoldings below are plain reshapes of this one buffer, so fold/unfold
// round trips are exact.
class Tensor3 {
 public:
  Tensor3() = default;

  explicit Tensor3(Dims3 dims) : dims_(dims) {
    if (dims.n1 < 0 || dims.n2 < 0 || dims.n3 < 0)
      throw std::invalid_argument("Tensor3: negative extent in " + to_string(dims));
    data_ = Vector::Zero(dims.count());
  }

  Tensor3(Index n1, Index n2, Index n3) : Tensor3(Dims3{n1, n2, n3}) {}

  Tensor3(Dims3 dims, Vector data) : dims_(dims), data_(std::move(data)) {
    if (data_.size() != dims_.count())
      throw std::invalid_argument("Tensor3: buffer of length " + std::to_string(data_.size()) +
                                  " does not match extents " + to_string(dims_));
  }

  const Dims3& dims() const { return dims_; }
  Index n1() const { return dims_.n1; }
  Index n2() const { return dims_.n2; }
  Index n3() const { return dims_.n3; }
  Index size() const { return data_.size(); }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  double operator()(Index i, Index j, Index k) const {
    assert(i >= 0 && i < dims_.n1 && j >= 0 && j < dims_.n2 && k >= 0 && k < dims_.n3);
    return data_[i + dims_.n1 * (j + dims_.n2 * k)];
  }
  double& operator()(Index i, Index j, Index k) {
    assert(i >= 0 && i < dims_.n1 && j >= 0 && j < dims_.n2 && k >= 0 && k < dims_.n3);
    return data_[i + dims_.n1 * (j + dims_.n2 * k)];
  }

  // n1 x (n2 n3) matrix; entry (i, j + n2*k) equals (i, j, k).
  Matrix unfold_left() const {
    return Eigen::Map<const Matrix>(data_.data(), dims_.n1, dims_.n2 * dims_.n3);
  }

  // (n1 n2) x n3 matrix; entry (i + n1*j, k) equals (i, j, k).
  Matrix unfold_right() const {
    return Eigen::Map<const Matrix>(data_.data(), dims_.n1 * dims_.n2, dims_.n3);
  }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

  Tensor3& operator+=(const Tensor3& o) {
    require_same_dims(o, "operator+=");
    data_ += o.data_;
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    require_same_dims(o, "operator-=");
    data_ -= o.data_;
    return *this;
  }
  Tensor3& operator*=(double c) {
    data_ *= c;
    return *this;
  }

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double c, Tensor3 t) { return t *= c; }
  friend Tensor3 operator*(Tensor3 t, double c) { return t *= c; }
  friend Tensor3 operator-(Tensor3 t) { return t *= -1.0; }

 private:
  void require_same_dims(const Tensor3& o, const char* what) const {
    if (!(dims_ == o.dims_))
      throw std::invalid_argument(std::string("Tensor3::") + what + ": extents " +
                                  to_string(dims_) + " vs " + to_string(o.dims_));
  }

  Dims3 dims_;
  Vector data_;
};

// Inverse of unfold_left: reinterpret an n1 x (n2 n3) matrix as a tensor.
inline Tensor3 fold_left(const Matrix& m, Dims3 dims) {
  if (m.rows() != dims.n1 || m.cols() != dims.n2 * dims.n3)
    throw std::invalid_argument("fold_left: matrix " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " does not reshape to " + to_string(dims));
  return Tensor3(dims, Eigen::Map<const Vector>(m.data(), m.size()));
}

// Inverse of unfold_right.
inline Tensor3 fold_right(const Matrix& m, Dims3 dims) {
  if (m.rows() != dims.n1 * dims.n2 || m.cols() != dims.n3)
    throw std::invalid_argument("fold_right: matrix " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " does not reshape to " + to_string(dims));
  return Tensor3(dims, Eigen::Map<const Vector>(m.data(), m.size()));
}

// Contract the first mode with a matrix: (m * t)(p, j, k) = sum_i m(p, i) t(i, j, k).
inline Tensor3 mode1_multiply(const Matrix& m, const Tensor3& t) {
  if (m.cols() != t.n1())
    throw std::invalid_argument("mode1_multiply: " + std::to_string(m.cols()) +
                                " columns against extent " + std::to_string(t.n1()));
  return fold_left(m * t.unfold_left(), Dims3{m.rows(), t.n2(), t.n3()});
}

// Contract the third mode with a matrix: (t * m)(i, j, q) = sum_k t(i, j, k) m(k, q).
inline Tensor3 mode3_multiply(const Tensor3& t, const Matrix& m) {
  if (m.rows() != t.n3())
    throw std::invalid_argument("mode3_multiply: " + std::to_string(m.rows()) +
                                " rows against extent " + std::to_string(t.n3()));
  return fold_right(t.unfold_right() * m, Dims3{t.n1(), t.n2(), m.cols()});
}

// Three-factor contraction a . b . c with a: n1 x r1, b: r1 x n2 x r2,
// c: r2 x n3. Computed as the fold of a * unfold_left(fold(unfold_right(b) * c)).
inline Tensor3 contract3(const Matrix& a, const Tensor3& b, const Matrix& c) {
  if (a.cols() != b.n1())
    throw std::invalid_argument("contract3: left factor has " + std::to_string(a.cols()) +
                                " columns, core extent is " + std::to_string(b.n1()));
  if (c.rows() != b.n3())
    throw std::invalid_argument("contract3: right factor has " + std::to_string(c.rows()) +
                                " rows, core extent is " + std::to_string(b.n3()));
  const Tensor3 bc = mode3_multiply(b, c);
  return mode1_multiply(a, bc);
}

// Frobenius inner product sum_{ijk} s(i,j,k) t(i,j,k).
inline double inner(const Tensor3& s, const Tensor3& t) {
  if (!(s.dims() == t.dims()))
    throw std::invalid_argument("inner: extents " + to_string(s.dims()) + " vs " +
                                to_string(t.dims()));
  return s.data().dot(t.data());
}

inline double norm(const Tensor3& t) { return t.data().norm(); }

// --- "t3d" text format ----------------------------------------------------
//
// Header line `t3d n1 n2 n3` followed by n1*n2*n3 whitespace-separated
// decimal scalars in first-index-fastest order. Written at full double
// precision so a store/load round trip is exact.

inline void save_t3d(const Tensor3& t, std::ostream& os) {
  const Dims3 d = t.dims();
  os << "t3d " << d.n1 << " " << d.n2 << " " << d.n3 << "\n";
  os.precision(17);
  for (Index i = 0; i < t.size(); ++i) os << t.data()[i] << "\n";
}

inline void save_t3d(const Tensor3& t, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_t3d: cannot open '" + path + "' for writing");
  save_t3d(t, os);
  if (!os) throw std::runtime_error("save_t3d: write to '" + path + "' failed");
}

inline Tensor3 load_t3d(std::istream& is, const std::string& name = "<stream>") {
  auto fail = [&name](Index line, const std::string& msg) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
  };

  std::string header;
  if (!std::getline(is, header)) fail(1, "missing 't3d' header line");
  std::istringstream hs(header);
  std::string magic;
  Index n1 = 0, n2 = 0, n3 = 0;
  if (!(hs >> magic >> n1 >> n2 >> n3) || magic != "t3d")
    fail(1, "malformed header, expected 't3d n1 n2 n3'");
  if (n1 <= 0 || n2 <= 0 || n3 <= 0) fail(1, "extents must be positive");

  Tensor3 t(Dims3{n1, n2, n3});
  // Track the line of the scalar currently being parsed for error reports.
  Index line = 2;
  std::string tok;
  Index parsed = 0;
  std::string body((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  Index pos = 0;
  auto skip_ws = [&]() {
    while (pos < static_cast<Index>(body.size()) && std::isspace(static_cast<unsigned char>(body[pos]))) {
      if (body[pos] == '\n') ++line;
      ++pos;
    }
  };
  while (true) {
    skip_ws();
    if (pos >= static_cast<Index>(body.size())) break;
    Index start = pos;
    while (pos < static_cast<Index>(body.size()) && !std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
    tok = body.substr(start, pos - start);
    if (parsed >= t.size())
      fail(line, "expected " + std::to_string(t.size()) + " scalars, found extra token '" + tok + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      t.data()[parsed++] = v;
    } catch (const std::exception&) {
      fail(line, "cannot parse scalar '" + tok + "'");
    }
  }
  if (parsed != t.size())
    fail(line, "expected " + std::to_string(t.size()) + " scalars, found " + std::to_string(parsed));
  return t;
}

inline Tensor3 load_t3d(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_t3d: cannot open '" + path + "'");
  return load_t3d(is, path);
}

}  // namespace ttproj
